#include "quickic/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quickic/errors.hpp"
#include "quickic/linalg.hpp"

namespace quickic {

namespace {

void check_fa_inputs(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index d = data.cols();
  if (k < 1 || k >= d) {
    throw std::invalid_argument("factor analysis: requires 1 <= k < d");
  }
  if (data.rows() <= d) {
    throw std::invalid_argument("factor analysis: requires n > d");
  }
  if (!data.allFinite()) {
    throw std::invalid_argument("factor analysis: non-finite data");
  }
}

Eigen::MatrixXd sample_second_moment(const Eigen::MatrixXd& data) {
  return data.transpose() * data / static_cast<double>(data.rows());
}

// loglik of a zero-mean Gaussian with covariance C against second moment S:
//   -n/2 (d log 2pi + log|C| + tr(C^-1 S))
double gaussian_loglik_spd(const Eigen::MatrixXd& s, Eigen::Index n,
                           const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const double d = static_cast<double>(s.rows());
  const double log_det =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double trace = llt.solve(s).trace();
  return -0.5 * static_cast<double>(n) *
         (d * std::log(2.0 * std::numbers::pi) + log_det + trace);
}

Eigen::LLT<Eigen::MatrixXd> model_llt(const FAModel& model) {
  Eigen::LLT<Eigen::MatrixXd> llt(model.covariance());
  if (llt.info() != Eigen::Success) {
    throw numeric_error("factor model covariance not positive definite");
  }
  return llt;
}

FAModel init_model(const Eigen::MatrixXd& s, int k, std::uint64_t seed) {
  const Eigen::Index d = s.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  FAModel model;
  model.loading.resize(d, k);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double sd = std::sqrt(std::max(s(i, i), 1e-12));
    for (int j = 0; j < k; ++j) model.loading(i, j) = unif(rng) * sd;
  }
  model.noise_vars = s.diagonal();
  return model;
}

struct EStepMoments {
  Eigen::MatrixXd beta;  // k x d, A^T C^-1
  Eigen::MatrixXd m1;    // d x k, S beta^T
  Eigen::MatrixXd m2;    // k x k, I - beta A + beta S beta^T
  double loglik = 0.0;
};

EStepMoments fa_e_step(const Eigen::MatrixXd& s, Eigen::Index n,
                       const FAModel& model) {
  const auto llt = model_llt(model);
  EStepMoments e;
  e.loglik = gaussian_loglik_spd(s, n, llt);
  e.beta = llt.solve(model.loading).transpose();
  e.m1 = s * e.beta.transpose();
  e.m2 = Eigen::MatrixXd::Identity(model.factors(), model.factors()) -
         e.beta * model.loading + e.beta * e.m1;
  return e;
}

void check_heywood(const Eigen::VectorXd& psi, double floor) {
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (psi[i] < floor) {
      throw heywood_error(static_cast<int>(i), psi[i]);
    }
  }
}

}  // namespace

double fa_loading_df(int d, int k) {
  return static_cast<double>(d) * k - 0.5 * k * (k - 1);
}

double fa_loglik(const Eigen::MatrixXd& data, const FAModel& model) {
  if (data.cols() != model.dim()) {
    throw std::invalid_argument("fa_loglik: dimension mismatch");
  }
  return gaussian_loglik_spd(sample_second_moment(data), data.rows(),
                             model_llt(model));
}

FAFit fa_em_fit(const Eigen::MatrixXd& data, int k, const FAFitOptions& opts) {
  check_fa_inputs(data, k);
  const Eigen::MatrixXd s = sample_second_moment(data);
  const Eigen::Index n = data.rows();

  FAFit fit;
  fit.model = init_model(s, k, opts.seed);
  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const EStepMoments e = fa_e_step(s, n, fit.model);
    fit.trace.push_back(e.loglik);
    if (iter > 0 && std::abs(e.loglik - prev) < opts.tol * (1.0 + std::abs(prev))) {
      fit.converged = true;
      break;
    }
    prev = e.loglik;

    const Eigen::LDLT<Eigen::MatrixXd> m2_ldlt(e.m2);
    fit.model.loading = m2_ldlt.solve(e.m1.transpose()).transpose();
    fit.model.noise_vars =
        (s - fit.model.loading * (e.beta * s)).diagonal();
    check_heywood(fit.model.noise_vars, opts.psi_floor);
  }
  fit.loglik = fit.trace.back();
  return fit;
}

double fa_npl(const Eigen::MatrixXd& data, const FAModel& model,
              const FAPenaltyState& penalty, double lambda_bic) {
  double penalty_sum = 0.0;
  for (int j = 0; j < model.factors(); ++j) {
    penalty_sum += model.loading.col(j).norm() / penalty.init_column_norms[j];
  }
  return -fa_loglik(data, model) +
         2.0 * penalty.d_free * lambda_bic * penalty_sum;
}

FANplGradient fa_npl_gradient(const Eigen::MatrixXd& data,
                              const FAModel& model,
                              const FAPenaltyState& penalty,
                              double lambda_bic) {
  const Eigen::MatrixXd s = sample_second_moment(data);
  const double n = static_cast<double>(data.rows());
  const auto llt = model_llt(model);
  const Eigen::Index d = model.dim();

  // d(-l)/dC = n/2 (C^-1 - C^-1 S C^-1)
  const Eigen::MatrixXd cinv =
      llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd dneg_dc = 0.5 * n * (cinv - cinv * s * cinv);

  FANplGradient grad;
  grad.loading = 2.0 * dneg_dc * model.loading;
  grad.noise_vars = dneg_dc.diagonal();
  for (int j = 0; j < model.factors(); ++j) {
    const double norm = model.loading.col(j).norm();
    if (norm <= 0.0) {
      throw std::invalid_argument("fa_npl_gradient: zero column norm (kink)");
    }
    grad.loading.col(j) += 2.0 * penalty.d_free * lambda_bic /
                           penalty.init_column_norms[j] *
                           model.loading.col(j) / norm;
  }
  return grad;
}

QuickBICFAResult quick_bic_fa(const Eigen::MatrixXd& data, int k_init,
                              const QuickBICFAOptions& opts) {
  check_fa_inputs(data, k_init);
  const Eigen::Index d = data.cols();
  const Eigen::Index n = data.rows();
  const Eigen::MatrixXd s = sample_second_moment(data);
  const double lambda_bic = lambda_ic(ICSpec::bic(), static_cast<std::size_t>(n));

  const FAFit ml = fa_em_fit(data, k_init, opts.em);

  QuickBICFAResult result;
  result.model = ml.model;
  result.penalty.init_column_norms.resize(k_init);
  for (int j = 0; j < k_init; ++j) {
    const double norm = ml.model.loading.col(j).norm();
    if (norm < kWeightFloor) {
      throw std::invalid_argument(
          "quick_bic_fa: ML loading column norm below weight floor");
    }
    result.penalty.init_column_norms[j] = norm;
  }
  result.penalty.d_free = static_cast<int>(d) - k_init + 1;

  // Retained initial column index per current column.
  std::vector<int> column_ids(k_init);
  std::iota(column_ids.begin(), column_ids.end(), 0);

  FAModel& model = result.model;
  Eigen::VectorXd anchors = result.penalty.init_column_norms;

  const auto current_npl = [&] {
    FAPenaltyState st{anchors, result.penalty.d_free};
    return fa_npl(data, model, st, lambda_bic);
  };

  double prev = current_npl();
  result.npl_trace.push_back(prev);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iter && model.factors() > 0; ++iter) {
    const int k = model.factors();
    const EStepMoments e = fa_e_step(s, n, model);

    // LQA quadratic coefficients per column group.
    Eigen::VectorXd q(k);
    for (int j = 0; j < k; ++j) {
      const double wj = 1.0 / anchors[j];
      q[j] = result.penalty.d_free * lambda_bic * wj /
             (model.loading.col(j).norm() + opts.lqa_ridge);
    }

    // Row-wise closed form: a_r = m1_r (M2 + (2 psi_r / n) Q)^-1.
    Eigen::MatrixXd new_loading(d, k);
    for (Eigen::Index r = 0; r < d; ++r) {
      Eigen::MatrixXd lhs = e.m2;
      lhs.diagonal() += (2.0 * model.noise_vars[r] / static_cast<double>(n)) * q;
      new_loading.row(r) = lhs.ldlt().solve(e.m1.row(r).transpose()).transpose();
    }

    // Full quadratic form for Psi (the penalized loading is not the
    // unpenalized stationary point, so the usual shortcut is not exact).
    const Eigen::MatrixXd beta_s = e.beta * s;
    Eigen::VectorXd new_psi(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      new_psi[r] = s(r, r) - 2.0 * new_loading.row(r).dot(beta_s.col(r)) +
                   new_loading.row(r) * e.m2 * new_loading.row(r).transpose();
    }
    check_heywood(new_psi, opts.em.psi_floor);

    model.loading = new_loading;
    model.noise_vars = new_psi;

    // Column drops, by relative norm against the anchor.
    std::vector<int> keep;
    for (int j = 0; j < k; ++j) {
      if (model.loading.col(j).norm() >= opts.column_drop_rel * anchors[j]) {
        keep.push_back(j);
      }
    }
    bool structural = static_cast<int>(keep.size()) < k;
    if (structural) {
      Eigen::MatrixXd pruned(d, static_cast<Eigen::Index>(keep.size()));
      Eigen::VectorXd pruned_anchors(static_cast<Eigen::Index>(keep.size()));
      std::vector<int> pruned_ids;
      for (std::size_t a = 0; a < keep.size(); ++a) {
        pruned.col(static_cast<Eigen::Index>(a)) = model.loading.col(keep[a]);
        pruned_anchors[static_cast<Eigen::Index>(a)] = anchors[keep[a]];
        pruned_ids.push_back(column_ids[keep[a]]);
      }
      model.loading = pruned;
      anchors = pruned_anchors;
      column_ids = pruned_ids;
      result.penalty.d_free = static_cast<int>(d) - model.factors() + 1;
      result.structural_events.push_back(iter);

      if (opts.reweight_on_drop && model.factors() > 0) {
        // Refresh anchors from an ML refit at the reduced k; the shrunken
        // iterate keeps optimizing from where it stands.
        FAFitOptions refit = opts.em;
        refit.seed = opts.em.seed + 1 + result.structural_events.size();
        const FAFit refreshed = fa_em_fit(data, model.factors(), refit);
        for (int j = 0; j < model.factors(); ++j) {
          anchors[j] = std::max(refreshed.model.loading.col(j).norm(),
                                kWeightFloor);
        }
      }
    }

    if (model.factors() == 0) {
      result.selection.degenerate = true;
      break;
    }

    const double npl = current_npl();
    result.npl_trace.push_back(npl);
    if (!structural &&
        std::abs(npl - prev) < opts.tol * (1.0 + std::abs(prev))) {
      converged = true;
      break;
    }
    prev = npl;
  }

  result.selection.converged = converged || result.selection.degenerate;
  result.selection.support = column_ids;
  result.selection.estimate = Eigen::VectorXd::Zero(k_init);
  for (std::size_t a = 0; a < column_ids.size(); ++a) {
    result.selection.estimate[column_ids[a]] =
        model.loading.col(static_cast<Eigen::Index>(a)).norm();
  }
  result.selection.objective = result.npl_trace.back();
  for (std::size_t i = 0; i < result.npl_trace.size(); ++i) {
    result.selection.trace.emplace_back(static_cast<int>(i),
                                        result.npl_trace[i]);
  }
  result.penalty.init_column_norms = anchors;
  return result;
}

FAICSelection fa_ic_select(const Eigen::MatrixXd& data, int k_min, int k_max,
                           const ICSpec& spec, const FAFitOptions& opts) {
  if (k_min > k_max) {
    throw std::invalid_argument("fa_ic_select: empty k range");
  }
  const Eigen::Index d = data.cols();
  const double lambda =
      lambda_ic(spec, static_cast<std::size_t>(data.rows()));

  FAICSelection sel;
  double best = std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    FAFitOptions per_k = opts;
    per_k.seed = opts.seed * 1000003ULL + static_cast<std::uint64_t>(k);
    const FAFit fit = fa_em_fit(data, k, per_k);
    const double d_free = fa_loading_df(static_cast<int>(d), k) +
                          static_cast<double>(d);
    const double score = -fit.loglik + lambda * d_free;
    sel.scores.push_back(score);
    if (score < best) {  // strict: ties keep the smaller k seen first
      best = score;
      sel.k = k;
      sel.model = fit.model;
    }
  }
  return sel;
}

FACVSelection fa_cv_select(const Eigen::MatrixXd& data, int k_min, int k_max,
                           int folds, std::uint64_t seed,
                           const FAFitOptions& opts) {
  if (folds < 2) {
    throw std::invalid_argument("fa_cv_select: folds must be >= 2");
  }
  if (k_min > k_max) {
    throw std::invalid_argument("fa_cv_select: empty k range");
  }
  const Eigen::Index n = data.rows();
  if (folds > n) {
    throw std::invalid_argument("fa_cv_select: more folds than observations");
  }

  // Deterministic fold assignment: seeded permutation dealt round-robin.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        static_cast<int>(i) % folds;
  }

  FACVSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    double heldout = 0.0;
    for (int f = 0; f < folds; ++f) {
      Eigen::Index n_test = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (fold_of[static_cast<std::size_t>(i)] == f) ++n_test;
      }
      Eigen::MatrixXd train(n - n_test, data.cols());
      Eigen::MatrixXd test(n_test, data.cols());
      Eigen::Index ti = 0, vi = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (fold_of[static_cast<std::size_t>(i)] == f) {
          test.row(vi++) = data.row(i);
        } else {
          train.row(ti++) = data.row(i);
        }
      }
      FAFitOptions per_fit = opts;
      per_fit.seed = seed * 1000003ULL +
                     static_cast<std::uint64_t>(k) * 101ULL +
                     static_cast<std::uint64_t>(f);
      const FAFit fit = fa_em_fit(train, k, per_fit);
      heldout += fa_loglik(test, fit.model);
    }
    const double mean = heldout / static_cast<double>(n);
    sel.mean_heldout_loglik.push_back(mean);
    if (mean > best) {
      best = mean;
      sel.k = k;
    }
  }
  return sel;
}

}  // namespace quickic
