#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "quickic/datagen.hpp"
#include "quickic/errors.hpp"
#include "quickic/linreg.hpp"
#include "quickic/model_core.hpp"

using namespace quickic;

namespace {

// Exactly orthogonal design: orthonormal columns from a thin QR, rescaled so
// X^T X is diagonal with entries around n.
RegressionData orthogonal_design(int n, int p, const Eigen::VectorXd& theta,
                                 double noise_sd, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = normal(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  std::uniform_real_distribution<double> scale(0.7, 1.4);
  for (int j = 0; j < p; ++j) {
    q.col(j) *= std::sqrt(static_cast<double>(n)) * scale(rng);
  }
  Eigen::VectorXd y = q * theta;
  for (int i = 0; i < n; ++i) y[i] += noise_sd * normal(rng);
  return {std::move(q), std::move(y)};
}

Eigen::MatrixXd correlated_design(int n, int p, double rho,
                                  std::mt19937_64& rng) {
  Eigen::MatrixXd corr(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) corr(i, j) = std::pow(rho, std::abs(i - j));
  }
  const Eigen::MatrixXd chol = corr.llt().matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(i, j) = normal(rng);
  }
  return z * chol.transpose();
}

std::vector<int> support_of(const Eigen::VectorXd& v) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

}  // namespace

TEST_CASE("ols recovers an exact interpolation on orthogonal designs") {
  std::mt19937_64 rng(3);
  Eigen::VectorXd theta(4);
  theta << 1.0, -2.0, 0.5, 3.0;
  const RegressionData data = orthogonal_design(50, 4, theta, 0.0, rng);
  const RegressionFit fit = ols_full_fit(data);
  CHECK((fit.coefficients - theta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.noise_variance <= 1e-12 * 10);
  CHECK(std::isfinite(fit.loglik));
}

TEST_CASE("ols on a zero response hits the variance floor but stays finite") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd x(40, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = normal(rng);
  }
  const RegressionData data{x, Eigen::VectorXd::Zero(40)};
  const RegressionFit fit = ols_full_fit(data);
  CHECK(fit.coefficients.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fit.noise_variance == 1e-12);
  CHECK(std::isfinite(fit.loglik));
}

TEST_CASE("ols matches an independent dense solve") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(200, 5);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 5; ++j) x(i, j) = normal(rng);
  }
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) y[i] = normal(rng);
  const RegressionData data{x, y};
  const RegressionFit fit = ols_full_fit(data);
  // Oracle: QR factorization of X itself, a different route than the
  // normal-equations solve inside the library.
  const Eigen::VectorXd oracle = x.colPivHouseholderQr().solve(y);
  CHECK((fit.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("singular designs are rejected") {
  Eigen::MatrixXd x(30, 2);
  for (int i = 0; i < 30; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 2.0 * static_cast<double>(i);
  }
  const RegressionData data{x, Eigen::VectorXd::Ones(30)};
  CHECK_THROWS_AS(ols_full_fit(data), numeric_error);
}

TEST_CASE("observed fisher information for regression") {
  std::mt19937_64 rng(11);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);
  RegressionData data = orthogonal_design(60, 3, theta, 1.0, rng);
  // Rebuild columns with unit scale so X^T X = n I exactly.
  for (int j = 0; j < 3; ++j) {
    data.X.col(j) *= std::sqrt(60.0) / data.X.col(j).norm();
  }
  const Eigen::MatrixXd h = observed_fisher_linreg(data, 1.0);
  CHECK((h - 60.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-8);
  const Eigen::MatrixXd h_scaled = observed_fisher_linreg(data, 2.0);
  CHECK((2.0 * h_scaled - h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fisher matrix converges to the population correlation law") {
  const RegressionSample sample = gen_regression(DesignCase::II, 10000, 99);
  const double sigma2 = 0.5;
  const Eigen::MatrixXd h = observed_fisher_linreg(sample.data, sigma2);
  const Eigen::MatrixXd scaled = h * sigma2 / 10000.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      CHECK(std::abs(scaled(i, j) - std::pow(0.5, std::abs(i - j))) < 5e-2);
    }
  }
}

TEST_CASE("quick selection on orthogonal designs follows the diagonal rule") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 4 + static_cast<int>(rng() % 5);
    const int n = 80 + static_cast<int>(rng() % 200);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    std::uniform_real_distribution<double> mag(0.0, 0.6);
    for (int j = 0; j < p; ++j) theta[j] = mag(rng) - 0.3;
    const RegressionData data = orthogonal_design(n, p, theta, 0.7, rng);

    const RegressionFit full = ols_full_fit(data);
    const Eigen::MatrixXd h =
        observed_fisher_linreg(data, full.noise_variance);
    const double lambda = lambda_ic(ICSpec::bic(), static_cast<std::size_t>(n));

    const SelectionResult quick = quick_ic_regression(data, ICSpec::bic());
    std::vector<int> expected;
    for (int j = 0; j < p; ++j) {
      if (selection_condition_diagonal(full.coefficients[j], h(j, j), lambda)) {
        expected.push_back(j);
      }
    }
    CHECK(quick.support == expected);
    CHECK(quick.converged);
  }
}

TEST_CASE("zero penalty keeps the full model") {
  std::mt19937_64 rng(17);
  Eigen::VectorXd theta(5);
  theta << 0.5, -0.2, 1.0, 0.0, 0.8;
  const RegressionData data = orthogonal_design(100, 5, theta, 0.5, rng);
  const RegressionFit full = ols_full_fit(data);
  const SelectionResult res = quick_ic_regression(data, ICSpec::custom(0.0));
  CHECK(res.support.size() == 5);
  CHECK((res.estimate - full.coefficients).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("large penalties empty the support") {
  std::mt19937_64 rng(19);
  Eigen::VectorXd theta(4);
  theta << 0.5, -0.4, 0.3, 0.2;
  const RegressionData data = orthogonal_design(100, 4, theta, 0.5, rng);
  const RegressionFit full = ols_full_fit(data);
  const Eigen::MatrixXd h = observed_fisher_linreg(data, full.noise_variance);
  double max_sal = 0.0;
  for (int j = 0; j < 4; ++j) {
    max_sal = std::max(max_sal,
                       0.5 * h(j, j) * full.coefficients[j] *
                           full.coefficients[j]);
  }
  const SelectionResult res =
      quick_ic_regression(data, ICSpec::custom(max_sal * 1.01));
  CHECK(res.support.empty());
}

TEST_CASE("quick selection objective trace never decreases") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const RegressionSample sample = gen_regression(DesignCase::III, 120, seed);
    const SelectionResult res = quick_ic_regression(sample.data, ICSpec::bic());
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].second >=
            res.trace[i - 1].second - 1e-10 * std::abs(res.trace[i - 1].second));
    }
  }
}

TEST_CASE("quick selection support is invariant to joint rescaling") {
  const RegressionSample sample = gen_regression(DesignCase::II, 150, 31);
  const SelectionResult base = quick_ic_regression(sample.data, ICSpec::bic());
  RegressionData scaled = sample.data;
  scaled.X *= 3.7;
  scaled.y *= 3.7;
  const SelectionResult res = quick_ic_regression(scaled, ICSpec::bic());
  CHECK(res.support == base.support);
}

TEST_CASE("exhaustive search at a single full size returns the full model") {
  const RegressionSample sample = gen_regression(DesignCase::I, 100, 5);
  const int p = static_cast<int>(sample.data.p());
  const SelectionResult res =
      exhaustive_ic_regression(sample.data, ICSpec::bic(), p, p);
  CHECK(static_cast<int>(res.support.size()) == p);
}

TEST_CASE("exhaustive search finds a noiseless generating pair") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(80, 6);
  for (int i = 0; i < 80; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = normal(rng);
  }
  const Eigen::VectorXd y = 1.5 * x.col(1) - 2.0 * x.col(4);
  const RegressionData data{x, y};
  const SelectionResult res =
      exhaustive_ic_regression(data, ICSpec::bic(), 1, 3);
  CHECK(res.support == std::vector<int>{1, 4});
}

TEST_CASE("subset counting matches the binomial sum") {
  // Independent recomputation through the multiplicative formula.
  const auto binom = [](int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
      c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return static_cast<std::uint64_t>(c + 0.5);
  };
  std::uint64_t total = 0;
  for (int k = 4; k <= 8; ++k) total += binom(20, k);
  CHECK(exhaustive_subset_count(20, 4, 8) == total);
  CHECK(total == 262599);
}

TEST_CASE("subset budget is enforced before enumeration") {
  const RegressionSample sample = gen_regression(DesignCase::I, 100, 5);
  ExhaustiveOptions opts;
  opts.subset_budget = 10;
  CHECK_THROWS_AS(
      exhaustive_ic_regression(sample.data, ICSpec::bic(), 4, 8, opts),
      budget_exceeded);
}

TEST_CASE("orthogonal designs: quick and exhaustive selections coincide") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 15; ++rep) {
    const int p = 4 + static_cast<int>(rng() % 4);
    const int n = 60 + static_cast<int>(rng() % 100);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    std::uniform_real_distribution<double> mag(-0.7, 0.7);
    for (int j = 0; j < p; ++j) theta[j] = mag(rng);
    const RegressionData data = orthogonal_design(n, p, theta, 0.6, rng);
    const SelectionResult quick = quick_ic_regression(data, ICSpec::bic());
    const SelectionResult exh =
        exhaustive_ic_regression(data, ICSpec::bic(), 0, p);
    CHECK(quick.support == exh.support);
  }
}

TEST_CASE("correlated design: quick matches exhaustive on a p=10 instance") {
  std::mt19937_64 rng(43);
  Eigen::MatrixXd x = correlated_design(300, 10, 0.5, rng);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(10);
  theta << 1.2, 0.0, -0.8, 0.0, 0.0, 0.6, 0.0, -1.5, 0.0, 0.0;
  Eigen::VectorXd y = x * theta;
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  for (int i = 0; i < 300; ++i) y[i] += noise(rng);
  const RegressionData data{std::move(x), std::move(y)};

  const SelectionResult quick = quick_ic_regression(data, ICSpec::bic());
  const SelectionResult exh =
      exhaustive_ic_regression(data, ICSpec::bic(), 0, 10);
  CHECK(quick.support == exh.support);
}

TEST_CASE("alasso path on orthogonal designs enters at the diagonal knots") {
  std::mt19937_64 rng(47);
  Eigen::VectorXd theta(4);
  theta << 1.1, -0.6, 0.35, 0.8;
  const RegressionData data = orthogonal_design(120, 4, theta, 0.4, rng);
  const RegressionFit full = ols_full_fit(data);
  const Eigen::MatrixXd h = observed_fisher_linreg(data, full.noise_variance);

  const ALassoPath path = alasso_path(data);
  CHECK_FALSE(path.grid_fallback);

  // Entry knot of coordinate j at lambda = H_jj * theta_hat_j^2.
  for (int j = 0; j < 4; ++j) {
    const double expected =
        h(j, j) * full.coefficients[j] * full.coefficients[j];
    double entry = 0.0;
    for (std::size_t b = 1; b < path.points.size(); ++b) {
      if (path.points[b].coefficients[j] != 0.0) {
        entry = path.points[b - 1].lambda;
        break;
      }
    }
    CHECK(entry == doctest::Approx(expected).epsilon(1e-6));
  }

  // Interior knots reproduce the diagonal soft threshold at lambda_ic = l/2.
  for (const PathPoint& pt : path.points) {
    for (int j = 0; j < 4; ++j) {
      const double closed = soft_threshold_diagonal(
          full.coefficients[j], h(j, j), pt.lambda / 2.0);
      CHECK(pt.coefficients[j] == doctest::Approx(closed).epsilon(1e-6));
    }
  }
}

TEST_CASE("single predictor paths have exactly two breakpoints") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(50, 1);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    x(i, 0) = normal(rng);
    y[i] = 0.8 * x(i, 0) + 0.3 * normal(rng);
  }
  const RegressionData data{x, y};
  const ALassoPath path = alasso_path(data);
  REQUIRE(path.points.size() == 2);
  CHECK(path.points[0].coefficients.isZero(0.0));
  const RegressionFit full = ols_full_fit(data);
  CHECK(path.points[1].coefficients[0] ==
        doctest::Approx(full.coefficients[0]));
}

TEST_CASE("path breakpoints satisfy the stationarity conditions") {
  std::mt19937_64 rng(59);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 150;
    const int p = 6;
    Eigen::MatrixXd x = correlated_design(n, p, 0.4, rng);
    Eigen::VectorXd theta(p);
    theta << 1.0, 0.0, -0.4, 0.9, 0.0, 0.3;
    Eigen::VectorXd y = x * theta;
    std::normal_distribution<double> noise(0.0, 0.6);
    for (int i = 0; i < n; ++i) y[i] += noise(rng);
    const RegressionData data{std::move(x), std::move(y)};

    const RegressionFit full = ols_full_fit(data);
    const Eigen::VectorXd scale = full.coefficients.cwiseAbs();
    const Eigen::MatrixXd gram =
        scale.asDiagonal() * (data.X.transpose() * data.X) *
        scale.asDiagonal() / full.noise_variance;
    const Eigen::VectorXd b = scale.asDiagonal() *
                              (data.X.transpose() * data.y) /
                              full.noise_variance;
    const double tol_scale = std::max(1.0, b.cwiseAbs().maxCoeff());

    const ALassoPath path = alasso_path(data);
    CHECK_FALSE(path.grid_fallback);
    double last_lambda = std::numeric_limits<double>::infinity();
    for (const PathPoint& pt : path.points) {
      CHECK(pt.lambda < last_lambda + 1e-12);
      last_lambda = pt.lambda;
      const Eigen::VectorXd u = pt.coefficients.cwiseQuotient(scale);
      const Eigen::VectorXd c = b - gram * u;
      for (int j = 0; j < p; ++j) {
        if (u[j] != 0.0) {
          CHECK(std::abs(c[j] - pt.lambda * (u[j] > 0 ? 1.0 : -1.0)) <
                1e-6 * tol_scale);
        } else {
          CHECK(std::abs(c[j]) < pt.lambda + 1e-6 * tol_scale);
        }
      }
    }
    CHECK(path.points.back().lambda == 0.0);
    CHECK((path.points.back().coefficients - full.coefficients)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }
}

TEST_CASE("alasso_plus_ic scores a degenerate all-zero path as the null model") {
  const RegressionSample sample = gen_regression(DesignCase::I, 100, 61);
  ALassoPath path;
  path.points.push_back({1.0, Eigen::VectorXd::Zero(20)});
  const SelectionResult res =
      alasso_plus_ic(path, sample.data, ICSpec::bic());
  CHECK(res.support.empty());
  const RegressionFit full = ols_full_fit(sample.data);
  const double null_loglik =
      gaussian_loglik(sample.data, Eigen::VectorXd::Zero(20),
                      full.noise_variance);
  CHECK(res.objective ==
        doctest::Approx(ic_score(null_loglik, 0,
                                 lambda_ic(ICSpec::bic(), 100))));
}

TEST_CASE("alasso_plus_ic prefers the exact fit on noiseless data") {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(60, 4);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = normal(rng);
  }
  Eigen::VectorXd theta(4);
  theta << 1.0, -0.5, 0.7, 2.0;
  const Eigen::VectorXd y = x * theta;
  const RegressionData data{x, y};
  const ALassoPath path = alasso_path(data);
  const SelectionResult res = alasso_plus_ic(path, data, ICSpec::bic());
  CHECK(res.support.size() == 4);
  CHECK((res.estimate - theta).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("alasso_plus_ic returns a valid selection on a hard instance") {
  const RegressionSample sample = gen_regression(DesignCase::III, 100, 71);
  const ALassoPath path = alasso_path(sample.data);
  const SelectionResult res = alasso_plus_ic(path, sample.data, ICSpec::bic());
  CHECK(std::isfinite(res.objective));
  CHECK(res.support == support_of(res.estimate));
  CHECK_THROWS_AS(alasso_plus_ic(ALassoPath{}, sample.data, ICSpec::bic()),
                  std::invalid_argument);
}
