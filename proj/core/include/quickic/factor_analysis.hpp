#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "quickic/model_core.hpp"

namespace quickic {

/// Zero-mean factor model x = A y + e with y ~ N(0, I_k) and independent
/// Gaussian errors e ~ N(0, diag(noise_vars)).
struct FAModel {
  Eigen::MatrixXd loading;    // d x k
  Eigen::VectorXd noise_vars; // d, each > 0

  Eigen::Index dim() const noexcept { return loading.rows(); }
  int factors() const noexcept { return static_cast<int>(loading.cols()); }
  Eigen::MatrixXd covariance() const {
    Eigen::MatrixXd c = loading * loading.transpose();
    c.diagonal() += noise_vars;
    return c;
  }
};

/// Penalty bookkeeping for the grouped column penalty: anchor norms from the
/// initial maximum-likelihood fit and the current free-parameter change
/// d_free = d - k + 1 maintained as columns are removed.
struct FAPenaltyState {
  Eigen::VectorXd init_column_norms;
  int d_free = 0;
};

/// Number of free parameters in a d x k loading matrix after discounting the
/// rotation indeterminacy: d*k - k*(k-1)/2.
double fa_loading_df(int d, int k);

/// Gaussian log-likelihood of zero-mean rows under A A^T + diag(Psi).
double fa_loglik(const Eigen::MatrixXd& data, const FAModel& model);

struct FAFitOptions {
  double tol = 1e-7;        // relative log-likelihood change
  int max_iter = 2000;
  std::uint64_t seed = 0;
  double psi_floor = 1e-8;  // Heywood detection threshold
  std::optional<FAModel> init;  // warm start instead of the seeded random init
};

struct FAFit {
  FAModel model;
  double loglik = 0.0;
  std::vector<double> trace;  // log-likelihood per iteration
  bool converged = false;
};

/// Maximum-likelihood factor analysis by EM. The log-likelihood trace is
/// non-decreasing; a noise variance falling below psi_floor raises
/// heywood_error with the offending coordinate.
FAFit fa_em_fit(const Eigen::MatrixXd& data, int k,
                const FAFitOptions& opts = {});

struct QuickBICFAOptions {
  FAFitOptions em;               // used for the anchor ML fit
  double tol = 1e-7;             // relative objective change
  int max_iter = 2000;
  double lqa_ridge = 1e-8;       // added to column norms in the LQA divisor
  double column_drop_rel = 1e-4; // drop when below this fraction of anchor
  bool reweight_on_drop = false; // refresh anchors from an ML refit per drop
};

struct QuickBICFAResult {
  FAModel model;
  SelectionResult selection;     // support: retained initial column indices
  FAPenaltyState penalty;
  std::vector<double> npl_trace;
  /// Iteration indices at which a structural change (column drop) occurred.
  std::vector<int> structural_events;
};

/// Negative penalized likelihood -l + 2 d_free lambda sum_i ||A_(i)||/anchor_i.
double fa_npl(const Eigen::MatrixXd& data, const FAModel& model,
              const FAPenaltyState& penalty, double lambda_bic);

struct FANplGradient {
  Eigen::MatrixXd loading;     // same shape as model.loading
  Eigen::VectorXd noise_vars;  // d
};

/// Analytic gradient of fa_npl in (A, Psi); valid wherever every column norm
/// is away from zero.
FANplGradient fa_npl_gradient(const Eigen::MatrixXd& data, const FAModel& model,
                              const FAPenaltyState& penalty, double lambda_bic);

/// Column-shrinkage model selection: EM on the grouped negative penalized
/// likelihood with local quadratic approximation of the column norms, columns
/// removed online and d_free updated as k shrinks.
QuickBICFAResult quick_bic_fa(const Eigen::MatrixXd& data, int k_init,
                              const QuickBICFAOptions& opts = {});

struct FAICSelection {
  int k = 0;
  FAModel model;
  std::vector<double> scores;  // IC score per candidate k
};

/// Fits each k in [k_min, k_max] by ML and scores with
/// D = d*k - k*(k-1)/2 + d; ties break toward smaller k.
FAICSelection fa_ic_select(const Eigen::MatrixXd& data, int k_min, int k_max,
                           const ICSpec& spec, const FAFitOptions& opts = {});

struct FACVSelection {
  int k = 0;
  std::vector<double> mean_heldout_loglik;  // per candidate k, per observation
};

/// K-fold cross-validation over the factor count; fold assignment is a
/// seeded permutation dealt round-robin.
FACVSelection fa_cv_select(const Eigen::MatrixXd& data, int k_min, int k_max,
                           int folds, std::uint64_t seed,
                           const FAFitOptions& opts = {});

}  // namespace quickic
