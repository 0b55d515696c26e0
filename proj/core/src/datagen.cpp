#include "quickic/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quickic/rng.hpp"

namespace quickic {

namespace {

constexpr int kRegressionP = 20;
constexpr int kRegressionNonzero = 6;

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

void center_and_normalize_columns(Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j).array() -= x.col(j).mean();
    const double var = x.col(j).squaredNorm() / static_cast<double>(n);
    if (var > 0.0) x.col(j) /= std::sqrt(var);
  }
}

}  // namespace

RegressionSample gen_regression(DesignCase design, int n, std::uint64_t seed) {
  if (n < 30) {
    throw std::invalid_argument("gen_regression: n must be >= 30");
  }
  std::mt19937_64 rng = make_rng(seed, "regression");
  const int p = kRegressionP;

  // Support, magnitudes and signs of the generating coefficients.
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> magnitude(0.2, 2.5);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < kRegressionNonzero; ++i) {
    theta[order[static_cast<std::size_t>(i)]] =
        (coin(rng) ? 1.0 : -1.0) * magnitude(rng);
  }

  Eigen::MatrixXd x;
  switch (design) {
    case DesignCase::I:
      x = standard_normal_matrix(n, p, rng);
      break;
    case DesignCase::II: {
      Eigen::MatrixXd corr(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) corr(i, j) = std::pow(0.5, std::abs(i - j));
      }
      const Eigen::MatrixXd chol = corr.llt().matrixL();
      x = standard_normal_matrix(n, p, rng) * chol.transpose();
      break;
    }
    case DesignCase::III: {
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      Eigen::MatrixXd m(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) m(i, j) = unif(rng);
      }
      // x = M z gives covariance M M^T exactly.
      x = standard_normal_matrix(n, p, rng) * m.transpose();
      break;
    }
  }

  RegressionSample sample;
  sample.noise_variance = 0.5;
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  Eigen::VectorXd y = x * theta;
  for (Eigen::Index t = 0; t < y.size(); ++t) y[t] += noise(rng);

  // Normalization touches X only; the generating theta is reported on the
  // raw-predictor scale.
  center_and_normalize_columns(x);
  y.array() -= y.mean();

  sample.data = {std::move(x), std::move(y)};
  sample.coefficients = theta;
  return sample;
}

FASample gen_fa(int n, std::uint64_t seed) {
  if (n < 20) {
    throw std::invalid_argument("gen_fa: n must be >= 20");
  }
  constexpr int d = 10;
  constexpr int k = 5;
  std::mt19937_64 rng = make_rng(seed, "fa");
  std::uniform_real_distribution<double> load_unif(-1.5, 1.5);
  std::uniform_real_distribution<double> psi_unif(
      std::numeric_limits<double>::min(), 1.0);

  FASample sample;
  sample.loading.resize(d, k);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) sample.loading(i, j) = load_unif(rng);
  }
  sample.noise_vars.resize(d);
  for (int i = 0; i < d; ++i) sample.noise_vars[i] = psi_unif(rng);

  const Eigen::MatrixXd factors = standard_normal_matrix(n, k, rng);
  Eigen::MatrixXd noise = standard_normal_matrix(n, d, rng);
  noise *= sample.noise_vars.cwiseSqrt().asDiagonal();
  sample.data = factors * sample.loading.transpose() + noise;
  return sample;
}

Eigen::MatrixXd gen_spiral(int n, double noise_sd, std::uint64_t seed) {
  if (n < 30) {
    throw std::invalid_argument("gen_spiral: n must be >= 30");
  }
  std::mt19937_64 rng = make_rng(seed, "spiral");
  std::uniform_real_distribution<double> t_unif(0.0, 4.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd data(n, 3);
  for (int i = 0; i < n; ++i) {
    const double t = t_unif(rng);
    const double radius = 13.0 - 0.5 * t;
    data(i, 0) = radius * std::cos(t);
    data(i, 1) = -radius * std::sin(t);
    data(i, 2) = t;
    for (int j = 0; j < 3; ++j) data(i, j) += noise_sd * noise(rng);
  }
  return data;
}

TriangleSample gen_triangle(int n, std::uint64_t seed,
                            const TriangleOptions& opts) {
  if (n < 3 || n % 3 != 0) {
    throw std::invalid_argument("gen_triangle: n must be divisible by 3");
  }
  std::mt19937_64 rng = make_rng(seed, "triangle");
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Vector2d sds(std::sqrt(2.25), std::sqrt(0.25));

  TriangleSample sample;
  const double s = opts.side;
  // Equilateral triangle centered at the origin.
  sample.centers[0] = {0.0, s / std::sqrt(3.0)};
  sample.centers[1] = {-0.5 * s, -0.5 * s / std::sqrt(3.0)};
  sample.centers[2] = {0.5 * s, -0.5 * s / std::sqrt(3.0)};

  sample.data.resize(n, 2);
  sample.labels.resize(static_cast<std::size_t>(n));
  const int per_cluster = n / 3;
  for (int c = 0; c < 3; ++c) {
    const double angle = opts.angles_deg[static_cast<std::size_t>(c)] *
                         std::numbers::pi / 180.0;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    sample.covariances[static_cast<std::size_t>(c)] =
        rot * Eigen::Vector2d(2.25, 0.25).asDiagonal() * rot.transpose();
    for (int i = 0; i < per_cluster; ++i) {
      const Eigen::Vector2d base(normal(rng) * sds[0], normal(rng) * sds[1]);
      const int row = c * per_cluster + i;
      sample.data.row(row) =
          (rot * base + sample.centers[static_cast<std::size_t>(c)])
              .transpose();
      sample.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return sample;
}

MFASample gen_mfa(int n, int d, int m, const std::vector<int>& k,
                  double separation, std::uint64_t seed) {
  if (m < 1 || static_cast<int>(k.size()) != m) {
    throw std::invalid_argument("gen_mfa: k must list one count per analyzer");
  }
  for (int ki : k) {
    if (ki < 0 || ki >= d) {
      throw std::invalid_argument("gen_mfa: requires 0 <= k_i < d");
    }
  }
  std::mt19937_64 rng = make_rng(seed, "mfa");
  std::uniform_real_distribution<double> load_unif(-1.5, 1.5);
  std::uniform_real_distribution<double> psi_unif(
      std::numeric_limits<double>::min(), 0.5);
  std::normal_distribution<double> normal(0.0, 1.0);

  MFASample sample;
  sample.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  sample.noise_vars.resize(d);
  for (int i = 0; i < d; ++i) sample.noise_vars[i] = psi_unif(rng);

  // Means pairwise `separation` apart when a regular simplex fits, random
  // directions of that radius otherwise.
  if (m <= d + 1) {
    Eigen::MatrixXd vertices = Eigen::MatrixXd::Zero(m, d);
    for (int i = 1; i < m; ++i) vertices(i, i - 1) = 1.0;
    const Eigen::RowVectorXd centroid = vertices.colwise().mean();
    vertices.rowwise() -= centroid;
    if (m > 1) {
      const double edge = (vertices.row(0) - vertices.row(1)).norm();
      vertices *= separation / edge;
    }
    for (int i = 0; i < m; ++i) {
      sample.means.push_back(vertices.row(i).transpose());
    }
  } else {
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd dir(d);
      for (int j = 0; j < d; ++j) dir[j] = normal(rng);
      sample.means.push_back(dir / dir.norm() * separation /
                             std::numbers::sqrt2);
    }
  }

  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd loading(d, k[static_cast<std::size_t>(i)]);
    for (int r = 0; r < d; ++r) {
      for (int j = 0; j < k[static_cast<std::size_t>(i)]; ++j) {
        loading(r, j) = load_unif(rng);
      }
    }
    sample.loadings.push_back(std::move(loading));
  }

  std::uniform_int_distribution<int> label(0, m - 1);
  sample.data.resize(n, d);
  sample.labels.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const int c = label(rng);
    sample.labels[static_cast<std::size_t>(t)] = c;
    Eigen::VectorXd x = sample.means[static_cast<std::size_t>(c)];
    const auto& loading = sample.loadings[static_cast<std::size_t>(c)];
    for (int j = 0; j < loading.cols(); ++j) {
      x += loading.col(j) * normal(rng);
    }
    for (int r = 0; r < d; ++r) {
      x[r] += std::sqrt(sample.noise_vars[r]) * normal(rng);
    }
    sample.data.row(t) = x.transpose();
  }
  return sample;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& data,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  const Eigen::Index d = data.cols();
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != d) {
    throw std::invalid_argument("write_csv: header length mismatch");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j > 0) out << ',';
    if (header.empty()) {
      out << 'x' << (j + 1);
    } else {
      out << header[static_cast<std::size_t>(j)];
    }
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j > 0) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", data(i, j));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace quickic
