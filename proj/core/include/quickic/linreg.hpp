#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "quickic/model_core.hpp"

namespace quickic {

/// Centered regression instance: n x p design and n responses. The library
/// fits no intercept; producers are expected to center both.
struct RegressionData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index n() const noexcept { return X.rows(); }
  Eigen::Index p() const noexcept { return X.cols(); }
};

struct RegressionFit {
  Eigen::VectorXd coefficients;
  double noise_variance = 0.0;  // RSS/n, floored at 1e-12
  double loglik = 0.0;
};

/// Gaussian log-likelihood of a coefficient vector under a fixed noise
/// variance; the common noise scale shared by all selectors in this module.
double gaussian_loglik(const RegressionData& data, const Eigen::VectorXd& beta,
                       double sigma2);

/// Full-model least squares with a 1e12 condition guard on X^T X.
RegressionFit ols_full_fit(const RegressionData& data);

/// H = X^T X / sigma2, the curvature of the Gaussian log-likelihood.
Eigen::MatrixXd observed_fisher_linreg(const RegressionData& data,
                                       double sigma2);

struct QuickICOptions {
  double tol = 1e-8;       // max coordinate change per sweep
  int max_sweeps = 10000;
};

/// Maximizes l(theta) - 2 lambda_IC sum_i |theta_i|/|theta_hat_i| by cyclic
/// coordinate descent with exact per-coordinate updates, warm-started at the
/// full-model fit. Non-convergence returns the best iterate flagged.
SelectionResult quick_ic_regression(const RegressionData& data,
                                    const ICSpec& spec,
                                    const QuickICOptions& opts = {});

struct ExhaustiveOptions {
  std::uint64_t subset_budget = 10'000'000;
};

/// Scores every support of size in [size_min, size_max] by refitting OLS on
/// the subset and evaluating the IC under the full-model noise variance.
/// Ties break toward smaller supports, then lexicographic order.
SelectionResult exhaustive_ic_regression(const RegressionData& data,
                                         const ICSpec& spec, int size_min,
                                         int size_max,
                                         const ExhaustiveOptions& opts = {});

/// Number of candidate subsets an exhaustive run would visit.
std::uint64_t exhaustive_subset_count(int p, int size_min, int size_max);

struct PathPoint {
  double lambda = 0.0;            // penalization parameter, likelihood scale
  Eigen::VectorXd coefficients;   // original (unweighted) coordinates
};

struct ALassoPath {
  std::vector<PathPoint> points;  // ordered by decreasing lambda
  bool grid_fallback = false;
};

/// Full adaptive-Lasso solution path of
///   -l(beta) + lambda sum_i |beta_i|/|theta_hat_i|
/// via a LARS-style homotopy on the reweighted design. Degenerate steps fall
/// back to a 100-point log-spaced lambda grid solved by coordinate descent.
ALassoPath alasso_path(const RegressionData& data);

/// Scores each path breakpoint with the IC, using the breakpoint's own
/// coefficients (not a refit) and the full-model noise variance; the number
/// of nonzero coefficients stands in for D.
SelectionResult alasso_plus_ic(const ALassoPath& path,
                               const RegressionData& data, const ICSpec& spec);

}  // namespace quickic
