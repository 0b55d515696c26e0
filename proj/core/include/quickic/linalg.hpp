#pragma once

#include <Eigen/Dense>

namespace quickic {

/// Condition number of a symmetric matrix from its eigenvalue spread.
/// Returns +inf when the smallest eigenvalue is not positive.
double spd_condition(const Eigen::MatrixXd& m);

/// Inverse of a symmetric positive-definite matrix via eigendecomposition,
/// throwing numeric_error when the matrix is not PD or its condition number
/// exceeds cond_limit.
Eigen::MatrixXd spd_inverse_guarded(const Eigen::MatrixXd& m,
                                    double cond_limit = 1e12);

/// Gaussian log-density log N(x; mu, C) evaluated through a Cholesky factor
/// of C. Throws numeric_error when C is not positive definite.
class GaussianDensity {
 public:
  GaussianDensity(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance);

  double log_density(const Eigen::VectorXd& x) const;
  double log_det() const noexcept { return log_det_; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const noexcept { return llt_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

}  // namespace quickic
