#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace quickic {

/// Smallest magnitude accepted for an initial estimate entry when forming
/// adaptive weights; anything below is treated as a degenerate anchor.
inline constexpr double kWeightFloor = 1e-12;

enum class Criterion { BIC, AIC, Custom };

/// An information criterion identified by the per-parameter price it charges:
/// score = -loglik + lambda * d_free.
struct ICSpec {
  Criterion kind = Criterion::BIC;
  std::optional<double> custom_lambda;

  static ICSpec bic() { return {Criterion::BIC, std::nullopt}; }
  static ICSpec aic() { return {Criterion::AIC, std::nullopt}; }
  static ICSpec custom(double lambda) { return {Criterion::Custom, lambda}; }
};

/// Per-parameter penalization price: 0.5*ln(n) for BIC, 1 for AIC, or the
/// user-supplied value. n must be >= 1.
double lambda_ic(const ICSpec& spec, std::size_t n);

/// -loglik + lambda * d_free.
double ic_score(double loglik, std::size_t d_free, double lambda);

/// Adaptive-Lasso penalty sum_i |theta_i| / |init_i|^gamma. Construction
/// rejects anchors below kWeightFloor; callers must pre-screen exact zeros.
class ALassoPenalty {
 public:
  explicit ALassoPenalty(Eigen::VectorXd init_estimate, double gamma = 1.0);

  /// sum_i w_i |theta_i|; theta must match the anchor length.
  double value(const Eigen::VectorXd& theta) const;

  const Eigen::VectorXd& init_estimate() const noexcept { return init_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double gamma() const noexcept { return gamma_; }

 private:
  Eigen::VectorXd init_;
  Eigen::VectorXd weights_;
  double gamma_;
};

/// Log-likelihood that is exactly quadratic around its maximizer:
/// l(theta) = l(mle) - 0.5 (theta - mle)^T H (theta - mle), H = n * I(mle).
class QuadraticLikelihood {
 public:
  QuadraticLikelihood(Eigen::VectorXd mle, Eigen::MatrixXd hessian,
                      double loglik_at_mle);

  double operator()(const Eigen::VectorXd& theta) const;

  const Eigen::VectorXd& mle() const noexcept { return mle_; }
  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
  double loglik_at_mle() const noexcept { return loglik_at_mle_; }
  Eigen::Index dim() const noexcept { return mle_.size(); }

 private:
  Eigen::VectorXd mle_;
  Eigen::MatrixXd hessian_;
  double loglik_at_mle_;
};

/// Outcome of a selection procedure: the retained index set, the fitted
/// parameters (exact zeros off support), the final objective, and the
/// per-iteration objective trace of the solver that produced it.
struct SelectionResult {
  std::vector<int> support;
  Eigen::VectorXd estimate;
  double objective = 0.0;
  std::vector<std::pair<int, double>> trace;
  bool converged = true;
  bool degenerate = false;

  int selected_size() const noexcept {
    return static_cast<int>(support.size());
  }
};

/// Closed-form maximizer of the one-dimensional penalized quadratic
///   -0.5 h_ii (theta - theta_hat)^2 - 2 lambda |theta| / |theta_hat|,
/// i.e. sgn(theta_hat) * (|theta_hat| - 2 lambda / (h_ii |theta_hat|))^+.
double soft_threshold_diagonal(double theta_hat_i, double h_ii,
                               double lambda_ic);

/// True iff h_ii * theta_hat_i^2 > 2 lambda (strict; ties deselect).
bool selection_condition_diagonal(double theta_hat_i, double h_ii,
                                  double lambda_ic);

/// Least drop in the quadratic log-likelihood caused by pinning parameter i
/// to zero: 0.5 * mle_i^2 / [H^-1]_ii.
double saliency(const QuadraticLikelihood& ql, int i);

/// Indices kept by exact IC selection on a quadratic likelihood:
/// { i : [Ht^-1]_ii < 1/(2 lambda) } with Ht = diag(mle) H diag(mle).
std::vector<int> prop2_ic_selection(const QuadraticLikelihood& ql,
                                    double lambda_ic);

/// Indices kept by the penalized-likelihood route, via the row-sum condition
/// { i : [Ht^-1]_{i.} 1 < 1/(2 lambda) }.
std::vector<int> prop2_quickic_selection(const QuadraticLikelihood& ql,
                                         double lambda_ic);

}  // namespace quickic
