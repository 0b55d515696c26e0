#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quickic/linreg.hpp"

namespace quickic {

enum class DesignCase { I, II, III };

struct RegressionSample {
  RegressionData data;           // centered, columns variance-normalized
  Eigen::VectorXd coefficients;  // generating values, pre-normalization scale
  double noise_variance = 0.5;
};

/// Regression benchmark instances: p = 20 predictors, 6 nonzero coefficients
/// with magnitudes uniform on [0.2, 2.5] and random signs, Gaussian noise of
/// variance 0.5. Case I draws independent predictors, Case II imposes
/// correlation 0.5^|i-j|, Case III uses a random covariance M M^T with M
/// entries uniform on [-0.5, 0.5]. Columns are centered and scaled to unit
/// sample variance after the response is generated.
RegressionSample gen_regression(DesignCase design, int n, std::uint64_t seed);

struct FASample {
  Eigen::MatrixXd data;      // n x 10
  Eigen::MatrixXd loading;   // 10 x 5
  Eigen::VectorXd noise_vars;
};

/// Factor-analysis benchmark: d = 10, k = 5, loadings uniform on [-1.5, 1.5],
/// noise variances uniform on (0, 1), standard-normal factors.
FASample gen_fa(int n, std::uint64_t seed);

/// Shrinking spiral in R^3: t uniform on [0, 4*pi], clean point
/// ((13 - 0.5t) cos t, -(13 - 0.5t) sin t, t), isotropic Gaussian noise.
Eigen::MatrixXd gen_spiral(int n, double noise_sd, std::uint64_t seed);

struct TriangleOptions {
  double side = 8.0;
  std::array<double, 3> angles_deg = {0.0, 60.0, 120.0};
};

struct TriangleSample {
  Eigen::MatrixXd data;  // n x 2
  std::vector<int> labels;
  std::array<Eigen::Vector2d, 3> centers;
  std::array<Eigen::Matrix2d, 3> covariances;
};

/// Three equal clusters of bivariate N(0, diag(2.25, 0.25)) points, rotated
/// and shifted to the vertices of an equilateral triangle. n must be
/// divisible by 3.
TriangleSample gen_triangle(int n, std::uint64_t seed,
                            const TriangleOptions& opts = {});

struct MFASample {
  Eigen::MatrixXd data;  // n x d
  std::vector<int> labels;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> loadings;
  Eigen::VectorXd noise_vars;  // shared
  Eigen::VectorXd weights;
};

/// Parameterized mixture-of-factor-analyzers generator: analyzer means a
/// fixed distance apart (regular simplex for m <= d+1, random directions
/// otherwise), loadings uniform on [-1.5, 1.5], shared noise variances
/// uniform on (0, 0.5), uniform mixing.
MFASample gen_mfa(int n, int d, int m, const std::vector<int>& k,
                  double separation, std::uint64_t seed);

/// Writes a data matrix as CSV with a header row and 17 significant digits.
/// Default column names are x1..xd.
void write_csv(const std::string& path, const Eigen::MatrixXd& data,
               const std::vector<std::string>& header = {});

}  // namespace quickic
