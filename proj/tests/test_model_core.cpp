#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "quickic/errors.hpp"
#include "quickic/model_core.hpp"

using namespace quickic;

namespace {

Eigen::MatrixXd random_spd(int dim, std::mt19937_64& rng, double ridge = 0.5) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  }
  return a.transpose() * a + ridge * Eigen::MatrixXd::Identity(dim, dim);
}

Eigen::VectorXd random_nonzero_vector(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = (coin(rng) ? 1.0 : -1.0) * unif(rng);
  return v;
}

// Independent 1-D oracle: minimize 0.5*h*(t - theta_hat)^2 + 2*lambda*|t|/|theta_hat|
// over a uniform grid that always contains 0 and theta_hat.
double grid_minimize_penalized_quadratic(double theta_hat, double h,
                                         double lambda, double step) {
  const double lo = std::min(0.0, theta_hat) - 0.25;
  const double hi = std::max(0.0, theta_hat) + 0.25;
  const double w = 2.0 * lambda / std::abs(theta_hat);
  const auto objective = [&](double t) {
    return 0.5 * h * (t - theta_hat) * (t - theta_hat) + w * std::abs(t);
  };
  double best_t = 0.0;
  double best = objective(0.0);
  const long long steps = static_cast<long long>((hi - lo) / step);
  for (long long i = 0; i <= steps; ++i) {
    const double t = lo + step * static_cast<double>(i);
    const double val = objective(t);
    if (val < best) {
      best = val;
      best_t = t;
    }
  }
  return best_t;
}

// Backward-elimination sweep from the stationarity formula of the penalized
// quadratic: coordinates zero out as lambda grows toward 2*lambda_ic; any
// coordinate coming back above zero after crossing is counted as a violation.
struct SweepOutcome {
  std::vector<int> support;
  int violations = 0;
};

SweepOutcome lambda_sweep_support(const Eigen::MatrixXd& hessian,
                                  const Eigen::VectorXd& mle,
                                  double lambda_ic, int grid_points = 4000) {
  const Eigen::MatrixXd ht =
      mle.asDiagonal() * hessian * mle.asDiagonal();
  const Eigen::VectorXd row_sums =
      ht.inverse() * Eigen::VectorXd::Ones(mle.size());  // LU route
  SweepOutcome out;
  std::vector<char> zeroed(static_cast<std::size_t>(mle.size()), 0);
  const double lambda_end = 2.0 * lambda_ic;
  for (int g = 1; g <= grid_points; ++g) {
    const double lambda = lambda_end * static_cast<double>(g) /
                          static_cast<double>(grid_points);
    for (Eigen::Index i = 0; i < mle.size(); ++i) {
      const double scaled = 1.0 - lambda * row_sums[i];
      if (scaled <= 0.0) {
        zeroed[static_cast<std::size_t>(i)] = 1;
      } else if (zeroed[static_cast<std::size_t>(i)]) {
        ++out.violations;
      }
    }
  }
  for (Eigen::Index i = 0; i < mle.size(); ++i) {
    if (1.0 - lambda_end * row_sums[i] > 0.0) {
      out.support.push_back(static_cast<int>(i));
    }
  }
  return out;
}

// Symmetric hollow perturbation with zero row sums (needs dim >= 4), built
// from paired +/- quadruples.
Eigen::MatrixXd hollow_zero_rowsum(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.3, 0.3);
  std::uniform_int_distribution<int> pick(0, dim - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  for (int rep = 0; rep < 4 * dim; ++rep) {
    int idx[4];
    idx[0] = pick(rng);
    int filled = 1;
    while (filled < 4) {
      const int c = pick(rng);
      bool dup = false;
      for (int a = 0; a < filled; ++a) dup |= (idx[a] == c);
      if (!dup) idx[filled++] = c;
    }
    const double v = unif(rng);
    b(idx[0], idx[1]) += v;
    b(idx[1], idx[0]) += v;
    b(idx[2], idx[3]) += v;
    b(idx[3], idx[2]) += v;
    b(idx[0], idx[2]) -= v;
    b(idx[2], idx[0]) -= v;
    b(idx[1], idx[3]) -= v;
    b(idx[3], idx[1]) -= v;
  }
  return b;
}

}  // namespace

TEST_CASE("lambda_ic evaluates the criterion prices") {
  CHECK(lambda_ic(ICSpec::bic(), 100) == doctest::Approx(2.302585092994046));
  CHECK(lambda_ic(ICSpec::aic(), 7) == 1.0);
  CHECK(lambda_ic(ICSpec::bic(), 1) == 0.0);
  CHECK(lambda_ic(ICSpec::custom(0.75), 10) == 0.75);
  CHECK_THROWS_AS(lambda_ic(ICSpec::bic(), 0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_ic({Criterion::Custom, std::nullopt}, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(lambda_ic(ICSpec::custom(-1.0), 10), std::invalid_argument);
}

TEST_CASE("ic_score arithmetic and monotonicity in d_free") {
  CHECK(ic_score(-50.0, 0, 2.302585) == doctest::Approx(50.0));
  CHECK(ic_score(-50.0, 3, 2.302585) == doctest::Approx(56.907755));
  const double lambda = lambda_ic(ICSpec::bic(), 100);
  CHECK(ic_score(-10.0, 2, lambda) + lambda ==
        doctest::Approx(ic_score(-10.0, 3, lambda)));
  for (std::size_t d = 0; d < 10; ++d) {
    CHECK(ic_score(-1.0, d, 0.3) < ic_score(-1.0, d + 1, 0.3));
  }
}

TEST_CASE("alasso penalty values and construction guards") {
  Eigen::VectorXd init(2);
  init << 1.0, 2.0;
  const ALassoPenalty pen(init);

  CHECK(pen.value(Eigen::VectorXd::Zero(2)) == 0.0);
  CHECK(pen.value(init) == doctest::Approx(2.0));  // one per nonzero entry

  Eigen::VectorXd theta(2);
  theta << 0.5, -1.0;
  CHECK(pen.value(theta) == doctest::Approx(1.0));

  CHECK_THROWS_AS(pen.value(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  Eigen::VectorXd bad(2);
  bad << 1.0, 1e-13;
  CHECK_THROWS_AS(ALassoPenalty{bad}, std::invalid_argument);
}

TEST_CASE("alasso penalty is 1-homogeneous and sign-flip invariant") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 1 + static_cast<int>(rng() % 8);
    const Eigen::VectorXd anchor = random_nonzero_vector(dim, rng);
    const ALassoPenalty pen(anchor);
    Eigen::VectorXd theta = random_nonzero_vector(dim, rng);
    std::uniform_real_distribution<double> cdist(0.1, 5.0);
    const double c = cdist(rng);
    CHECK(pen.value(c * theta) ==
          doctest::Approx(c * pen.value(theta)).epsilon(1e-12));
    Eigen::VectorXd flipped = theta;
    for (int i = 0; i < dim; ++i) {
      if (rng() % 2) flipped[i] = -flipped[i];
    }
    CHECK(pen.value(flipped) == doctest::Approx(pen.value(theta)));
  }
}

TEST_CASE("quadratic likelihood construction and evaluation") {
  Eigen::MatrixXd h(2, 2);
  h << 2.0, 1.0, 1.0, 2.0;
  Eigen::VectorXd mle(2);
  mle << 1.0, 1.0;
  const QuadraticLikelihood ql(mle, h, -3.5);
  CHECK(ql(mle) == -3.5);  // exact at the maximizer
  Eigen::VectorXd off(2);
  off << 0.0, 1.0;
  CHECK(ql(off) == doctest::Approx(-3.5 - 0.5 * 2.0));

  Eigen::MatrixXd asym = h;
  asym(0, 1) = 1.5;
  CHECK_THROWS_AS(QuadraticLikelihood(mle, asym, 0.0), std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(QuadraticLikelihood(mle, indef, 0.0), std::invalid_argument);
}

TEST_CASE("soft threshold closed form") {
  const double lambda = 2.302585;
  CHECK(soft_threshold_diagonal(1.0, 10.0, lambda) ==
        doctest::Approx(1.0 - 2.0 * lambda / 10.0));
  CHECK(soft_threshold_diagonal(0.3, 10.0, lambda) == 0.0);
  CHECK(soft_threshold_diagonal(-1.2, 50.0, 1.0) ==
        doctest::Approx(-1.2 + 2.0 / (50.0 * 1.2)));
  CHECK_THROWS_AS(soft_threshold_diagonal(0.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("soft threshold matches the 1-D grid oracle") {
  const double closed = soft_threshold_diagonal(-1.2, 50.0, 1.0);
  const double gridded = grid_minimize_penalized_quadratic(-1.2, 50.0, 1.0, 1e-5);
  CHECK(std::abs(closed - gridded) < 1e-4);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> h_dist(0.5, 60.0);
  std::uniform_real_distribution<double> l_dist(0.0, 4.0);
  for (int rep = 0; rep < 25; ++rep) {
    double theta_hat = t_dist(rng);
    if (std::abs(theta_hat) < 0.05) theta_hat = 0.05;
    const double h = h_dist(rng);
    const double lambda = l_dist(rng);
    const double closed_form = soft_threshold_diagonal(theta_hat, h, lambda);
    const double grid = grid_minimize_penalized_quadratic(theta_hat, h, lambda, 1e-5);
    CHECK(std::abs(closed_form - grid) < 1e-4);
  }
}

TEST_CASE("selection condition is strict and agrees with the threshold") {
  CHECK(selection_condition_diagonal(1.0, 10.0, 2.302585));
  CHECK_FALSE(selection_condition_diagonal(0.3, 10.0, 2.302585));
  // exact boundary: H * theta^2 == 2 lambda deselects
  CHECK_FALSE(selection_condition_diagonal(1.0, 2.0, 1.0));
  CHECK(soft_threshold_diagonal(1.0, 2.0, 1.0) == 0.0);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> t_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> h_dist(0.1, 20.0);
  std::uniform_real_distribution<double> l_dist(0.0, 5.0);
  for (int rep = 0; rep < 500; ++rep) {
    double theta_hat = t_dist(rng);
    if (theta_hat == 0.0) theta_hat = 0.5;
    const double h = h_dist(rng);
    const double lambda = l_dist(rng);
    const bool nonzero =
        soft_threshold_diagonal(theta_hat, h, lambda) != 0.0;
    CHECK(nonzero == selection_condition_diagonal(theta_hat, h, lambda));
  }
}

TEST_CASE("saliency: diagonal identity and the 2x2 pinned-coordinate oracle") {
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 10.0;
  diag(1, 1) = 4.0;
  Eigen::VectorXd mle(2);
  mle << 1.0, 0.0;
  const QuadraticLikelihood ql_diag(mle, diag, 0.0);
  CHECK(saliency(ql_diag, 0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(saliency(ql_diag, 1) == 0.0);

  Eigen::MatrixXd h(2, 2);
  h << 2.0, 1.0, 1.0, 2.0;
  Eigen::VectorXd theta(2);
  theta << 1.0, 1.0;
  const QuadraticLikelihood ql(theta, h, 0.0);
  CHECK(saliency(ql, 0) == doctest::Approx(0.75));

  // Oracle: maximize the quadratic with coordinate 0 pinned to zero and
  // difference the log-likelihoods.
  const double u1 = -theta[0];
  const double u2 = -h(1, 0) * u1 / h(1, 1);
  Eigen::VectorXd pinned(2);
  pinned << 0.0, theta[1] + u2;
  const double drop = ql.loglik_at_mle() - ql(pinned);
  CHECK(saliency(ql, 0) == doctest::Approx(drop).epsilon(1e-12));
}

TEST_CASE("saliency for diagonal hessians equals the closed form broadly") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> h_dist(0.2, 30.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 2 + static_cast<int>(rng() % 6);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = h_dist(rng);
    const Eigen::VectorXd mle = random_nonzero_vector(dim, rng);
    const QuadraticLikelihood ql(mle, h, 0.0);
    for (int i = 0; i < dim; ++i) {
      CHECK(saliency(ql, i) ==
            doctest::Approx(0.5 * h(i, i) * mle[i] * mle[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("prop2 ic selection matches the saliency rule on random instances") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> l_dist(0.2, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = 2 + static_cast<int>(rng() % 4);  // up to 5
    const Eigen::MatrixXd h = random_spd(dim, rng);
    const Eigen::VectorXd mle = random_nonzero_vector(dim, rng);
    const QuadraticLikelihood ql(mle, h, 0.0);
    const double lambda = l_dist(rng);
    const std::vector<int> kept = prop2_ic_selection(ql, lambda);
    std::vector<int> by_saliency;
    for (int i = 0; i < dim; ++i) {
      if (saliency(ql, i) > lambda) by_saliency.push_back(i);
    }
    CHECK(kept == by_saliency);
  }
}

TEST_CASE("prop2 selections coincide for diagonal hessians") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> h_dist(0.2, 30.0);
  std::uniform_real_distribution<double> l_dist(0.2, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = 2 + static_cast<int>(rng() % 7);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = h_dist(rng);
    const Eigen::VectorXd mle = random_nonzero_vector(dim, rng);
    const QuadraticLikelihood ql(mle, h, 0.0);
    const double lambda = l_dist(rng);

    const std::vector<int> ic = prop2_ic_selection(ql, lambda);
    const std::vector<int> quick = prop2_quickic_selection(ql, lambda);
    CHECK(ic == quick);

    std::vector<int> coordwise;
    for (int i = 0; i < dim; ++i) {
      if (selection_condition_diagonal(mle[i], h(i, i), lambda)) {
        coordwise.push_back(i);
      }
    }
    CHECK(ic == coordwise);
  }
}

TEST_CASE("prop2 with vanishing lambda keeps everything") {
  std::mt19937_64 rng(29);
  const Eigen::MatrixXd h = random_spd(5, rng);
  const Eigen::VectorXd mle = random_nonzero_vector(5, rng);
  const QuadraticLikelihood ql(mle, h, 0.0);
  CHECK(prop2_ic_selection(ql, 1e-12).size() == 5);
  CHECK(prop2_quickic_selection(ql, 1e-12).size() == 5);
}

TEST_CASE("prop2 quick selection agrees with the lambda-sweep oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> l_dist(0.2, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = 4;
    const Eigen::MatrixXd h = random_spd(dim, rng);
    const Eigen::VectorXd mle = random_nonzero_vector(dim, rng);
    const QuadraticLikelihood ql(mle, h, 0.0);
    const double lambda = l_dist(rng);
    const SweepOutcome sweep = lambda_sweep_support(h, mle, lambda);
    CHECK(prop2_quickic_selection(ql, lambda) == sweep.support);
    CHECK(sweep.violations == 0);  // affine sweep cannot re-enter
  }
}

TEST_CASE("zero off-diagonal inverse row sums align the two prop2 rules") {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 4 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd b = hollow_zero_rowsum(dim, rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    const double shift = std::abs(es.eigenvalues().minCoeff()) + 0.5;
    const Eigen::MatrixXd k = b + shift * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd h = k.inverse();  // H^-1 = k has zero row sums

    std::uniform_real_distribution<double> c_dist(0.3, 2.0);
    const double c = c_dist(rng);
    const Eigen::VectorXd mle = Eigen::VectorXd::Constant(dim, c);
    const QuadraticLikelihood ql(mle, 0.5 * (h + h.transpose()), 0.0);
    std::uniform_real_distribution<double> l_dist(0.2, 2.0);
    const double lambda = l_dist(rng);
    CHECK(prop2_ic_selection(ql, lambda) ==
          prop2_quickic_selection(ql, lambda));
  }
}

TEST_CASE("ill-conditioned scaled hessian raises numeric failure") {
  Eigen::MatrixXd near(2, 2);
  near << 1.0, 0.0, 0.0, 1e-13;
  Eigen::VectorXd t(2);
  t << 1.0, 1.0;
  const QuadraticLikelihood ql(t, near, 0.0);
  CHECK_THROWS_AS(prop2_ic_selection(ql, 1.0), numeric_error);
  CHECK_THROWS_AS(prop2_quickic_selection(ql, 1.0), numeric_error);
}

TEST_CASE("saliency on a singular hessian is a numeric failure") {
  // Constructor rejects non-PD, so drive the guard via conditioning.
  Eigen::MatrixXd h(2, 2);
  h << 1.0, 0.0, 0.0, 1e-13;
  Eigen::VectorXd mle(2);
  mle << 1.0, 1.0;
  const QuadraticLikelihood ql(mle, h, 0.0);
  CHECK_THROWS_AS(saliency(ql, 0), numeric_error);
}
