#include "quickic/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "quickic/errors.hpp"

namespace quickic {

double spd_condition(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::MatrixXd spd_inverse_guarded(const Eigen::MatrixXd& m,
                                    double cond_limit) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (lo <= 0.0 || hi / lo > cond_limit) {
    throw numeric_error("matrix is singular or ill-conditioned (cond > guard)");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

GaussianDensity::GaussianDensity(Eigen::VectorXd mean,
                                 const Eigen::MatrixXd& covariance)
    : mean_(std::move(mean)) {
  llt_.compute(covariance);
  if (llt_.info() != Eigen::Success) {
    throw numeric_error("covariance is not positive definite");
  }
  log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double GaussianDensity::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd u = x - mean_;
  const double quad = u.dot(llt_.solve(u));
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det_ + quad);
}

}  // namespace quickic
