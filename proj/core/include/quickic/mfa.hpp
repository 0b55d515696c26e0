#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "quickic/gaussian_mixture.hpp"
#include "quickic/model_core.hpp"

namespace quickic {

/// Mixture of factor analyzers: x = mu_i + A_i y_i + e with probability
/// pi_i, local factors y_i ~ N(0, I_{k_i}) and a noise covariance
/// diag(noise_vars) shared across analyzers.
struct MFAComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd loading;  // d x k_i, k_i >= 0

  int factors() const noexcept { return static_cast<int>(loading.cols()); }
};

struct MFAModel {
  Eigen::VectorXd weights;
  std::vector<MFAComponent> components;
  Eigen::VectorXd noise_vars;  // shared Psi

  int count() const noexcept { return static_cast<int>(weights.size()); }
  Eigen::Index dim() const noexcept { return noise_vars.size(); }
  std::vector<int> factor_counts() const {
    std::vector<int> k;
    for (const auto& c : components) k.push_back(c.factors());
    return k;
  }
  Eigen::MatrixXd component_covariance(int i) const {
    Eigen::MatrixXd c =
        components[static_cast<std::size_t>(i)].loading *
        components[static_cast<std::size_t>(i)].loading.transpose();
    c.diagonal() += noise_vars;
    return c;
  }
};

/// Free parameters of one analyzer: d (for Psi's share/mean bookkeeping kept
/// as in the message length) plus the loading count dk - k(k-1)/2.
double mfa_component_df(int d, int k);

double mfa_loglik(const Eigen::MatrixXd& data, const MFAModel& model);

struct MFAFitOptions {
  double tol = 1e-7;
  int max_iter = 2000;
  std::uint64_t seed = 0;
  double psi_floor = 1e-8;
};

struct MFAFit {
  MFAModel model;
  double loglik = 0.0;
  std::vector<double> trace;
  bool converged = false;
};

/// Unpenalized maximum-likelihood EM at fixed analyzer count and per-analyzer
/// factor counts.
MFAFit mfa_em_fit(const Eigen::MatrixXd& data, int m,
                  const std::vector<int>& k, const MFAFitOptions& opts = {});

/// Message length for MFA with constant terms dropped.
double mfa_mml_length(const MFAModel& model, std::size_t n, double loglik);

/// Continuous approximator of the loading free-parameter count:
///   k(k-1)/2 + (d-k+1) sum_j ||A_(j)||/anchor_j.
/// Equals dk - k(k-1)/2 exactly at A = anchor loadings.
double nf_hat(const Eigen::MatrixXd& loading, const Eigen::VectorXd& anchors,
              int d, int k);

/// Penalty bookkeeping for the joint objective: log-penalty weights over the
/// mixing vector plus per-analyzer column-norm anchors.
struct MFAPenaltyState {
  LogPenaltyWeights pi_weights;
  std::vector<Eigen::VectorXd> column_norm_anchors;
};

/// Continuous approximation of the MFA message length combining column
/// shrinkage with mixing-weight shrinkage.
double mfa_npl(const Eigen::MatrixXd& data, const MFAModel& model,
               const MFAPenaltyState& penalty, std::size_t n);

struct MFANplGradient {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> loadings;
  Eigen::VectorXd noise_vars;
};

/// Analytic gradient of mfa_npl; requires positive mixing weights and
/// nonzero column norms (away from the penalty kinks).
MFANplGradient mfa_npl_gradient(const Eigen::MatrixXd& data,
                                const MFAModel& model,
                                const MFAPenaltyState& penalty, std::size_t n);

struct QuickMMLMFAOptions {
  double epsilon = 1e-3;
  double tol = 1e-7;
  int max_iter = 3000;
  int burn_in = 50;               // unpenalized EM iterations before anchoring
  double lqa_ridge = 1e-8;
  double column_drop_rel = 1e-4;
  int weight_refresh_interval = 50;
};

struct QuickMMLMFAResult {
  MFAModel model;
  SelectionResult selection;  // support: surviving initial analyzer indices
  MFAPenaltyState penalty;
  std::vector<double> npl_trace;
  std::vector<StructuralEvent> events;
};

/// Joint selection of the analyzer count and all local factor counts by
/// penalized EM on mfa_npl: per-component generalized pi update, LQA group
/// shrinkage on loading columns, component drops at pi < 1/n, column drops
/// below the relative-norm threshold, anchors and weights refreshed on every
/// structural change.
QuickMMLMFAResult quick_mml_mfa(const Eigen::MatrixXd& data, int m_init,
                                int k_init, std::uint64_t seed,
                                const QuickMMLMFAOptions& opts = {});

}  // namespace quickic
