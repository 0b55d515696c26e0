#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "quickic/model_core.hpp"

namespace quickic {

struct GMMModel {
  Eigen::VectorXd weights;                  // simplex
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances; // SPD

  int components() const noexcept {
    return static_cast<int>(weights.size());
  }
  Eigen::Index dim() const noexcept {
    return means.empty() ? 0 : means.front().size();
  }
};

/// Free parameters per component: d (mean) + d(d+1)/2 (covariance).
double gmm_component_df(int d);

/// Data-adaptive log-penalty weights w_i = 1/log((eps + pi_hat_i)/eps),
/// anchored so that w_i * log((pi_hat_i + eps)/eps) = 1 at construction.
struct LogPenaltyWeights {
  double epsilon = 1e-3;
  Eigen::VectorXd w;

  static LogPenaltyWeights from_mixing(const Eigen::VectorXd& pi_hat,
                                       double epsilon = 1e-3);
};

/// Mixture log-likelihood with log-sum-exp stabilization. Tolerates weight
/// vectors off the simplex (evaluated as-is), which the gradient checks use.
double gmm_loglik(const Eigen::MatrixXd& data, const GMMModel& model);

/// Message length for mixture selection: components with zero weight do not
/// contribute.
double gmm_mml_length(const GMMModel& model, std::size_t n, double loglik);

/// Continuous approximation of the message length, replacing the discrete
/// component count by the weighted log-penalty sum.
double gmm_npl(const Eigen::MatrixXd& data, const GMMModel& model,
               const LogPenaltyWeights& weights, std::size_t n);

struct GMMNplGradient {
  Eigen::VectorXd weights;                  // d npl / d pi (pi unconstrained)
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances; // symmetric-matrix convention
};

/// Analytic gradient of gmm_npl in (pi, mu, Sigma), with pi treated as free
/// coordinates. Off-diagonal covariance entries follow the symmetric-pair
/// convention (perturbing (a,b) and (b,a) together).
GMMNplGradient gmm_npl_gradient(const Eigen::MatrixXd& data,
                                const GMMModel& model,
                                const LogPenaltyWeights& weights,
                                std::size_t n);

/// Penalized M-step update for the mixing weights, clamped at zero; surviving
/// entries are renormalized to the simplex. Throws step_degenerate when the
/// shared denominator is not positive.
Eigen::VectorXd pi_update(const Eigen::VectorXd& resp_sums,
                          const LogPenaltyWeights& weights, std::size_t n,
                          int m, int d);

struct GMMFitOptions {
  double tol = 1e-7;
  int max_iter = 2000;
  std::uint64_t seed = 0;
};

struct GMMFit {
  GMMModel model;
  double loglik = 0.0;
  std::vector<double> trace;
  bool converged = false;
};

/// Plain maximum-likelihood EM at a fixed component count; the baseline the
/// message-length cross-checks fit against.
GMMFit gmm_em_fit(const Eigen::MatrixXd& data, int m,
                  const GMMFitOptions& opts = {});

struct QuickMMLOptions {
  double epsilon = 1e-3;
  double tol = 1e-7;
  int max_iter = 3000;
  int weight_refresh_interval = 50;  // iterations between scheduled refreshes
  bool refresh_on_drop = true;
};

enum class StructuralEventKind {
  ComponentDrop,
  ColumnDrop,
  CovarianceCollapse,
  WeightRefresh
};

struct StructuralEvent {
  int iteration = 0;
  StructuralEventKind kind = StructuralEventKind::ComponentDrop;
  int component = -1;  // original component index, -1 for refreshes
};

struct QuickMMLGMMResult {
  GMMModel model;
  SelectionResult selection;  // support: surviving initial component indices
  LogPenaltyWeights weights;
  std::vector<double> npl_trace;
  std::vector<StructuralEvent> events;
};

/// Penalized EM minimizing gmm_npl: responsibilities in the E step, weighted
/// ML means/covariances and the clamped pi_update in the M step, components
/// dropped when their weight falls below 1/n, adaptive weights refreshed
/// after drops and on a fixed cadence.
QuickMMLGMMResult quick_mml_gmm(const Eigen::MatrixXd& data, int m_max,
                                std::uint64_t seed,
                                const QuickMMLOptions& opts = {});

}  // namespace quickic
