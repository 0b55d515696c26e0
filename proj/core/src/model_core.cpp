#include "quickic/model_core.hpp"

#include <cmath>
#include <stdexcept>

#include "quickic/errors.hpp"
#include "quickic/linalg.hpp"

namespace quickic {

double lambda_ic(const ICSpec& spec, std::size_t n) {
  if (n < 1) throw std::invalid_argument("lambda_ic: sample count must be >= 1");
  switch (spec.kind) {
    case Criterion::BIC:
      return 0.5 * std::log(static_cast<double>(n));
    case Criterion::AIC:
      return 1.0;
    case Criterion::Custom:
      if (!spec.custom_lambda || *spec.custom_lambda < 0.0) {
        throw std::invalid_argument(
            "lambda_ic: Custom criterion requires a nonnegative custom_lambda");
      }
      return *spec.custom_lambda;
  }
  throw std::invalid_argument("lambda_ic: unknown criterion kind");
}

double ic_score(double loglik, std::size_t d_free, double lambda) {
  return -loglik + lambda * static_cast<double>(d_free);
}

ALassoPenalty::ALassoPenalty(Eigen::VectorXd init_estimate, double gamma)
    : init_(std::move(init_estimate)), gamma_(gamma) {
  if (gamma_ <= 0.0) {
    throw std::invalid_argument("ALassoPenalty: gamma must be positive");
  }
  weights_.resize(init_.size());
  for (Eigen::Index i = 0; i < init_.size(); ++i) {
    const double mag = std::abs(init_[i]);
    if (mag < kWeightFloor) {
      throw std::invalid_argument(
          "ALassoPenalty: initial estimate entry below weight floor at index " +
          std::to_string(i));
    }
    weights_[i] = 1.0 / std::pow(mag, gamma_);
  }
}

double ALassoPenalty::value(const Eigen::VectorXd& theta) const {
  if (theta.size() != init_.size()) {
    throw std::invalid_argument("ALassoPenalty: theta length mismatch");
  }
  return weights_.dot(theta.cwiseAbs());
}

QuadraticLikelihood::QuadraticLikelihood(Eigen::VectorXd mle,
                                         Eigen::MatrixXd hessian,
                                         double loglik_at_mle)
    : mle_(std::move(mle)),
      hessian_(std::move(hessian)),
      loglik_at_mle_(loglik_at_mle) {
  if (hessian_.rows() != hessian_.cols() || hessian_.rows() != mle_.size()) {
    throw std::invalid_argument("QuadraticLikelihood: dimension mismatch");
  }
  const double scale = hessian_.cwiseAbs().maxCoeff();
  if ((hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(scale, 1.0)) {
    throw std::invalid_argument("QuadraticLikelihood: hessian not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "QuadraticLikelihood: hessian must be positive definite");
  }
}

double QuadraticLikelihood::operator()(const Eigen::VectorXd& theta) const {
  if (theta.size() != mle_.size()) {
    throw std::invalid_argument("QuadraticLikelihood: theta length mismatch");
  }
  if (theta == mle_) return loglik_at_mle_;
  const Eigen::VectorXd u = theta - mle_;
  return loglik_at_mle_ - 0.5 * u.dot(hessian_ * u);
}

double soft_threshold_diagonal(double theta_hat_i, double h_ii,
                               double lambda_ic) {
  if (theta_hat_i == 0.0) {
    throw std::invalid_argument(
        "soft_threshold_diagonal: zero initial estimate has no weight");
  }
  if (h_ii <= 0.0) {
    throw std::invalid_argument("soft_threshold_diagonal: h_ii must be > 0");
  }
  const double mag = std::abs(theta_hat_i);
  const double shrunk = mag - 2.0 * lambda_ic / (h_ii * mag);
  if (shrunk <= 0.0) return 0.0;
  return (theta_hat_i > 0.0 ? shrunk : -shrunk);
}

bool selection_condition_diagonal(double theta_hat_i, double h_ii,
                                  double lambda_ic) {
  if (theta_hat_i == 0.0) {
    throw std::invalid_argument(
        "selection_condition_diagonal: zero initial estimate");
  }
  if (h_ii <= 0.0) {
    throw std::invalid_argument("selection_condition_diagonal: h_ii must be > 0");
  }
  return h_ii * theta_hat_i * theta_hat_i > 2.0 * lambda_ic;
}

double saliency(const QuadraticLikelihood& ql, int i) {
  if (i < 0 || i >= ql.dim()) {
    throw std::invalid_argument("saliency: index out of range");
  }
  const double t = ql.mle()[i];
  if (t == 0.0) return 0.0;
  const Eigen::MatrixXd hinv = spd_inverse_guarded(ql.hessian());
  return 0.5 * t * t / hinv(i, i);
}

namespace {

Eigen::MatrixXd scaled_hessian_inverse(const QuadraticLikelihood& ql) {
  const Eigen::VectorXd& t = ql.mle();
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t[i] == 0.0) {
      throw std::invalid_argument(
          "prop2 selection: all mle entries must be nonzero");
    }
  }
  const Eigen::MatrixXd ht =
      t.asDiagonal() * ql.hessian() * t.asDiagonal();
  return spd_inverse_guarded(ht);
}

}  // namespace

std::vector<int> prop2_ic_selection(const QuadraticLikelihood& ql,
                                    double lambda_ic) {
  if (lambda_ic <= 0.0) {
    throw std::invalid_argument("prop2_ic_selection: lambda must be positive");
  }
  const Eigen::MatrixXd inv = scaled_hessian_inverse(ql);
  const double bound = 1.0 / (2.0 * lambda_ic);
  std::vector<int> kept;
  for (Eigen::Index i = 0; i < inv.rows(); ++i) {
    if (inv(i, i) < bound) kept.push_back(static_cast<int>(i));
  }
  return kept;
}

std::vector<int> prop2_quickic_selection(const QuadraticLikelihood& ql,
                                         double lambda_ic) {
  if (lambda_ic <= 0.0) {
    throw std::invalid_argument(
        "prop2_quickic_selection: lambda must be positive");
  }
  const Eigen::MatrixXd inv = scaled_hessian_inverse(ql);
  const double bound = 1.0 / (2.0 * lambda_ic);
  std::vector<int> kept;
  for (Eigen::Index i = 0; i < inv.rows(); ++i) {
    if (inv.row(i).sum() < bound) kept.push_back(static_cast<int>(i));
  }
  return kept;
}

}  // namespace quickic
