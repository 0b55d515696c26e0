#include "quickic/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quickic/errors.hpp"
#include "quickic/linalg.hpp"

namespace quickic {

namespace {

constexpr double kVarianceFloor = 1e-12;

void check_data(const RegressionData& data) {
  if (data.X.rows() != data.y.size()) {
    throw std::invalid_argument("regression data: X rows must match y length");
  }
  if (!data.X.allFinite() || !data.y.allFinite()) {
    throw std::invalid_argument("regression data: non-finite entries");
  }
}

double loglik_from_rss(double rss, Eigen::Index n, double sigma2) {
  return -0.5 * static_cast<double>(n) *
             std::log(2.0 * std::numbers::pi * sigma2) -
         rss / (2.0 * sigma2);
}

}  // namespace

double gaussian_loglik(const RegressionData& data, const Eigen::VectorXd& beta,
                       double sigma2) {
  if (sigma2 <= 0.0) {
    throw std::invalid_argument("gaussian_loglik: sigma2 must be positive");
  }
  const double rss = (data.y - data.X * beta).squaredNorm();
  return loglik_from_rss(rss, data.n(), sigma2);
}

RegressionFit ols_full_fit(const RegressionData& data) {
  check_data(data);
  if (data.n() <= data.p()) {
    throw std::invalid_argument("ols_full_fit: requires n > p");
  }
  const Eigen::MatrixXd gram = data.X.transpose() * data.X;
  const Eigen::MatrixXd gram_inv = spd_inverse_guarded(gram);  // 1e12 guard
  RegressionFit fit;
  fit.coefficients = gram_inv * (data.X.transpose() * data.y);
  const double rss = (data.y - data.X * fit.coefficients).squaredNorm();
  fit.noise_variance =
      std::max(rss / static_cast<double>(data.n()), kVarianceFloor);
  fit.loglik = loglik_from_rss(rss, data.n(), fit.noise_variance);
  return fit;
}

Eigen::MatrixXd observed_fisher_linreg(const RegressionData& data,
                                       double sigma2) {
  check_data(data);
  if (sigma2 <= 0.0) {
    throw std::invalid_argument("observed_fisher_linreg: sigma2 must be > 0");
  }
  return (data.X.transpose() * data.X) / sigma2;
}

SelectionResult quick_ic_regression(const RegressionData& data,
                                    const ICSpec& spec,
                                    const QuickICOptions& opts) {
  const RegressionFit full = ols_full_fit(data);
  const double lambda = lambda_ic(spec, static_cast<std::size_t>(data.n()));
  const ALassoPenalty penalty(full.coefficients);
  const Eigen::VectorXd& w = penalty.weights();
  const double sigma2 = full.noise_variance;

  const Eigen::MatrixXd gram = data.X.transpose() * data.X;
  const Eigen::VectorXd xty = data.X.transpose() * data.y;
  const Eigen::Index p = data.p();

  Eigen::VectorXd theta = full.coefficients;
  Eigen::VectorXd gram_theta = gram * theta;

  const auto penalized_loglik = [&](const Eigen::VectorXd& t) {
    return gaussian_loglik(data, t, sigma2) - 2.0 * lambda * penalty.value(t);
  };

  SelectionResult result;
  result.trace.emplace_back(0, penalized_loglik(theta));

  bool converged = false;
  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      // Correlation of column j with the partial residual.
      const double cj = xty[j] - (gram_theta[j] - gram(j, j) * theta[j]);
      const double threshold = 2.0 * lambda * sigma2 * w[j];
      double updated = 0.0;
      if (std::abs(cj) > threshold) {
        updated = (cj > 0.0 ? cj - threshold : cj + threshold) / gram(j, j);
      }
      const double delta = updated - theta[j];
      if (delta != 0.0) {
        gram_theta += delta * gram.col(j);
        theta[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    result.trace.emplace_back(sweep + 1, penalized_loglik(theta));
    if (max_change < opts.tol) {
      converged = true;
      break;
    }
  }

  result.converged = converged;
  result.estimate = theta;
  result.objective = result.trace.back().second;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (theta[j] != 0.0) result.support.push_back(static_cast<int>(j));
  }
  return result;
}

std::uint64_t exhaustive_subset_count(int p, int size_min, int size_max) {
  std::uint64_t total = 0;
  for (int k = size_min; k <= size_max; ++k) {
    // C(p, k) built incrementally; p <= 64 keeps this exact.
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
      c = c * static_cast<std::uint64_t>(p - k + i) /
          static_cast<std::uint64_t>(i);
    }
    total += c;
  }
  return total;
}

SelectionResult exhaustive_ic_regression(const RegressionData& data,
                                         const ICSpec& spec, int size_min,
                                         int size_max,
                                         const ExhaustiveOptions& opts) {
  check_data(data);
  const int p = static_cast<int>(data.p());
  if (size_min < 0 || size_min > size_max || size_max > p) {
    throw std::invalid_argument("exhaustive_ic_regression: bad size range");
  }
  if (exhaustive_subset_count(p, size_min, size_max) > opts.subset_budget) {
    throw budget_exceeded("exhaustive_ic_regression: subset budget exceeded");
  }

  const RegressionFit full = ols_full_fit(data);
  const double sigma2 = full.noise_variance;
  const double lambda = lambda_ic(spec, static_cast<std::size_t>(data.n()));
  const Eigen::MatrixXd gram = data.X.transpose() * data.X;
  const Eigen::VectorXd xty = data.X.transpose() * data.y;
  const double yty = data.y.squaredNorm();
  const Eigen::Index n = data.n();

  double best_score = std::numeric_limits<double>::infinity();
  std::vector<int> best_subset;
  Eigen::VectorXd best_coeffs;

  Eigen::MatrixXd sub_gram(size_max, size_max);
  Eigen::VectorXd sub_xty(size_max);

  const auto score_subset = [&](const std::vector<int>& subset) {
    const int k = static_cast<int>(subset.size());
    double rss = yty;
    Eigen::VectorXd coeffs;
    if (k > 0) {
      for (int a = 0; a < k; ++a) {
        sub_xty[a] = xty[subset[a]];
        for (int b = 0; b <= a; ++b) {
          sub_gram(a, b) = gram(subset[a], subset[b]);
          sub_gram(b, a) = sub_gram(a, b);
        }
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(sub_gram.topLeftCorner(k, k));
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return;
      coeffs = ldlt.solve(sub_xty.head(k));
      rss = yty - coeffs.dot(sub_xty.head(k));
      if (rss < 0.0) rss = 0.0;
    }
    const double score =
        ic_score(loglik_from_rss(rss, n, sigma2), subset.size(), lambda);
    // Enumeration goes smallest size first, lexicographic within size, so a
    // strict comparison realizes the documented tie-breaking.
    if (score < best_score) {
      best_score = score;
      best_subset = subset;
      best_coeffs = coeffs;
    }
  };

  std::vector<int> subset;
  for (int k = size_min; k <= size_max; ++k) {
    if (k == 0) {
      score_subset({});
      continue;
    }
    subset.resize(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    while (true) {
      score_subset(subset);
      int i = k - 1;
      while (i >= 0 && subset[i] == p - k + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
  }

  SelectionResult result;
  result.support = best_subset;
  result.estimate = Eigen::VectorXd::Zero(p);
  for (std::size_t a = 0; a < best_subset.size(); ++a) {
    result.estimate[best_subset[a]] = best_coeffs[static_cast<Eigen::Index>(a)];
  }
  result.objective = best_score;
  return result;
}

namespace {

// Coordinate-descent solve of -l(beta) + lambda sum w_i |beta_i| at one
// lambda, used by the grid fallback.
Eigen::VectorXd cd_solve(const Eigen::MatrixXd& gram,
                         const Eigen::VectorXd& xty, double sigma2,
                         const Eigen::VectorXd& w, double lambda,
                         Eigen::VectorXd theta) {
  Eigen::VectorXd gram_theta = gram * theta;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      const double cj = xty[j] - (gram_theta[j] - gram(j, j) * theta[j]);
      const double threshold = lambda * sigma2 * w[j];
      double updated = 0.0;
      if (std::abs(cj) > threshold) {
        updated = (cj > 0.0 ? cj - threshold : cj + threshold) / gram(j, j);
      }
      const double delta = updated - theta[j];
      if (delta != 0.0) {
        gram_theta += delta * gram.col(j);
        theta[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < 1e-10) break;
  }
  return theta;
}

ALassoPath grid_fallback_path(const Eigen::MatrixXd& gram,
                              const Eigen::VectorXd& xty, double sigma2,
                              const Eigen::VectorXd& w,
                              const Eigen::VectorXd& theta_hat,
                              double lambda_max) {
  ALassoPath path;
  path.grid_fallback = true;
  path.points.push_back(
      {lambda_max, Eigen::VectorXd::Zero(theta_hat.size())});
  const int grid_points = 100;
  const double lambda_min = lambda_max * 1e-6;
  const double step = std::log(lambda_max / lambda_min) / (grid_points - 1);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(theta_hat.size());
  for (int g = 1; g < grid_points; ++g) {
    const double lambda = lambda_max * std::exp(-step * g);
    theta = cd_solve(gram, xty, sigma2, w, lambda, theta);
    path.points.push_back({lambda, theta});
  }
  path.points.push_back({0.0, theta_hat});
  return path;
}

}  // namespace

ALassoPath alasso_path(const RegressionData& data) {
  const RegressionFit full = ols_full_fit(data);
  const Eigen::VectorXd theta_hat = full.coefficients;
  const double sigma2 = full.noise_variance;
  const Eigen::Index p = data.p();
  const Eigen::VectorXd scale = theta_hat.cwiseAbs();
  const ALassoPenalty penalty(theta_hat);

  // Reweighted design on the likelihood scale: Z = X diag(|theta_hat|)/sigma,
  // so knots are expressed in the same units as -l(beta) + lambda * penalty.
  const Eigen::MatrixXd gram_x = data.X.transpose() * data.X;
  const Eigen::VectorXd xty = data.X.transpose() * data.y;
  const Eigen::MatrixXd gram =
      scale.asDiagonal() * gram_x * scale.asDiagonal() / sigma2;
  const Eigen::VectorXd b = scale.asDiagonal() * xty / sigma2;

  ALassoPath path;
  const double lambda_max = b.cwiseAbs().maxCoeff();
  path.points.push_back({lambda_max, Eigen::VectorXd::Zero(p)});

  std::vector<int> active;
  std::vector<char> is_active(p, 0);
  Eigen::VectorXd signs = Eigen::VectorXd::Zero(p);
  {
    Eigen::Index j0;
    b.cwiseAbs().maxCoeff(&j0);
    active.push_back(static_cast<int>(j0));
    is_active[j0] = 1;
    signs[j0] = (b[j0] > 0.0 ? 1.0 : -1.0);
  }

  double lambda_cur = lambda_max;
  const int max_knots = 20 * static_cast<int>(p) + 10;
  const double tol = 1e-10 * std::max(lambda_max, 1.0);

  for (int knot = 0; knot < max_knots; ++knot) {
    const int ka = static_cast<int>(active.size());
    Eigen::MatrixXd gram_aa(ka, ka);
    Eigen::VectorXd b_a(ka), s_a(ka);
    for (int a = 0; a < ka; ++a) {
      b_a[a] = b[active[a]];
      s_a[a] = signs[active[a]];
      for (int c = 0; c < ka; ++c) gram_aa(a, c) = gram(active[a], active[c]);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram_aa);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      return grid_fallback_path(gram_x, xty, sigma2, penalty.weights(),
                                theta_hat, lambda_max);
    }
    // On the segment the active solution is affine in lambda:
    //   u_A(lambda) = u0 - lambda * dir.
    const Eigen::VectorXd u0 = ldlt.solve(b_a);
    const Eigen::VectorXd dir = ldlt.solve(s_a);
    if (!u0.allFinite() || !dir.allFinite()) {
      return grid_fallback_path(gram_x, xty, sigma2, penalty.weights(),
                                theta_hat, lambda_max);
    }

    double lambda_next = 0.0;
    int event_index = -1;      // index into active (drop) or column (entry)
    bool event_is_drop = false;
    double entry_sign = 0.0;

    for (Eigen::Index j = 0; j < p; ++j) {
      if (is_active[j]) continue;
      double alpha = b[j];
      double beta = 0.0;
      for (int a = 0; a < ka; ++a) {
        alpha -= gram(j, active[a]) * u0[a];
        beta += gram(j, active[a]) * dir[a];
      }
      // c_j(lambda) = alpha + lambda*beta meets +/-lambda.
      const double denom_pos = 1.0 - beta;
      const double denom_neg = 1.0 + beta;
      if (std::abs(denom_pos) > 1e-14) {
        const double cand = alpha / denom_pos;
        if (cand > lambda_next && cand < lambda_cur - tol) {
          lambda_next = cand;
          event_index = static_cast<int>(j);
          event_is_drop = false;
          entry_sign = 1.0;
        }
      }
      if (std::abs(denom_neg) > 1e-14) {
        const double cand = -alpha / denom_neg;
        if (cand > lambda_next && cand < lambda_cur - tol) {
          lambda_next = cand;
          event_index = static_cast<int>(j);
          event_is_drop = false;
          entry_sign = -1.0;
        }
      }
    }
    for (int a = 0; a < ka; ++a) {
      if (dir[a] == 0.0) continue;
      const double cand = u0[a] / dir[a];
      if (cand > lambda_next && cand < lambda_cur - tol) {
        lambda_next = cand;
        event_index = a;
        event_is_drop = true;
      }
    }

    const double lambda_knot = (event_index >= 0 ? lambda_next : 0.0);
    Eigen::VectorXd beta_knot = Eigen::VectorXd::Zero(p);
    for (int a = 0; a < ka; ++a) {
      beta_knot[active[a]] = scale[active[a]] * (u0[a] - lambda_knot * dir[a]);
    }
    path.points.push_back({lambda_knot, beta_knot});
    lambda_cur = lambda_knot;

    if (event_index < 0) break;  // reached lambda = 0
    if (event_is_drop) {
      const int col = active[event_index];
      active.erase(active.begin() + event_index);
      is_active[col] = 0;
      signs[col] = 0.0;
    } else {
      active.push_back(event_index);
      is_active[event_index] = 1;
      signs[event_index] = entry_sign;
    }
  }

  if (path.points.back().lambda != 0.0) {
    // Knot budget exhausted without reaching the unpenalized end.
    return grid_fallback_path(gram_x, xty, sigma2, penalty.weights(),
                              theta_hat, lambda_max);
  }
  path.points.back().coefficients = theta_hat;
  return path;
}

SelectionResult alasso_plus_ic(const ALassoPath& path,
                               const RegressionData& data,
                               const ICSpec& spec) {
  if (path.points.empty()) {
    throw std::invalid_argument("alasso_plus_ic: empty path");
  }
  const RegressionFit full = ols_full_fit(data);
  const double sigma2 = full.noise_variance;
  const double lambda = lambda_ic(spec, static_cast<std::size_t>(data.n()));

  double best_score = std::numeric_limits<double>::infinity();
  const PathPoint* best = nullptr;
  for (const PathPoint& pt : path.points) {
    std::size_t d_free = 0;
    for (Eigen::Index j = 0; j < pt.coefficients.size(); ++j) {
      if (pt.coefficients[j] != 0.0) ++d_free;
    }
    const double score = ic_score(
        gaussian_loglik(data, pt.coefficients, sigma2), d_free, lambda);
    if (score < best_score) {
      best_score = score;
      best = &pt;
    }
  }

  SelectionResult result;
  result.estimate = best->coefficients;
  result.objective = best_score;
  for (Eigen::Index j = 0; j < best->coefficients.size(); ++j) {
    if (best->coefficients[j] != 0.0) {
      result.support.push_back(static_cast<int>(j));
    }
  }
  return result;
}

}  // namespace quickic
