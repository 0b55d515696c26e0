#include "quickic/mfa.hpp"

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

struct ComponentFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;  // of A A^T + diag(Psi)
  double log_norm = 0.0;
};

ComponentFactor factor_analyzer(const MFAModel& model, int i) {
  ComponentFactor cf;
  cf.llt.compute(model.component_covariance(i));
  if (cf.llt.info() != Eigen::Success) {
    throw numeric_error("analyzer covariance not positive definite");
  }
  const double log_det =
      2.0 * cf.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  cf.log_norm = -0.5 * (static_cast<double>(model.dim()) *
                            std::log(2.0 * std::numbers::pi) +
                        log_det);
  return cf;
}

Eigen::VectorXd analyzer_log_density(const Eigen::MatrixXd& data,
                                     const Eigen::VectorXd& mean,
                                     const ComponentFactor& cf) {
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd solved = cf.llt.solve(centered.transpose());
  const Eigen::VectorXd quad =
      (centered.array() * solved.transpose().array()).rowwise().sum();
  return (-0.5 * quad).array() + cf.log_norm;
}

struct MFAEStep {
  Eigen::MatrixXd resp;
  Eigen::VectorXd resp_sums;
  double loglik = 0.0;
  std::vector<ComponentFactor> factors;
};

MFAEStep mfa_e_step(const Eigen::MatrixXd& data, const MFAModel& model) {
  const Eigen::Index n = data.rows();
  const int m = model.count();
  Eigen::MatrixXd log_joint(n, m);
  MFAEStep e;
  for (int i = 0; i < m; ++i) {
    e.factors.push_back(factor_analyzer(model, i));
    log_joint.col(i) =
        analyzer_log_density(data,
                             model.components[static_cast<std::size_t>(i)].mean,
                             e.factors.back())
            .array() +
        std::log(model.weights[i]);
  }
  e.resp.resize(n, m);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double mx = log_joint.row(t).maxCoeff();
    const Eigen::ArrayXd shifted = (log_joint.row(t).array() - mx).exp();
    const double sum = shifted.sum();
    e.resp.row(t) = (shifted / sum).matrix();
    e.loglik += mx + std::log(sum);
  }
  e.resp_sums = e.resp.colwise().sum();
  return e;
}

// Sufficient statistics for the augmented regression of x on [y; 1] within
// one analyzer.
struct AugmentedMoments {
  Eigen::MatrixXd sxz;  // d x (k+1)
  Eigen::MatrixXd szz;  // (k+1) x (k+1)
  Eigen::VectorXd sxx_diag;
};

AugmentedMoments analyzer_moments(const Eigen::MatrixXd& data,
                                  const MFAModel& model, int i,
                                  const ComponentFactor& cf,
                                  const Eigen::VectorXd& h) {
  const auto& comp = model.components[static_cast<std::size_t>(i)];
  const int k = comp.factors();
  const Eigen::Index d = data.cols();
  const double wsum = h.sum();

  const Eigen::MatrixXd beta = cf.llt.solve(comp.loading).transpose();  // k x d
  const Eigen::MatrixXd centered = data.rowwise() - comp.mean.transpose();
  const Eigen::MatrixXd ey = centered * beta.transpose();  // n x k

  AugmentedMoments am;
  am.sxz.resize(d, k + 1);
  am.szz.resize(k + 1, k + 1);
  const Eigen::VectorXd hx = h;
  am.sxz.leftCols(k) = data.transpose() * (ey.array().colwise() * hx.array()).matrix();
  am.sxz.col(k) = data.transpose() * hx;

  const Eigen::MatrixXd eyyt_core =
      Eigen::MatrixXd::Identity(k, k) - beta * comp.loading;
  am.szz.topLeftCorner(k, k) =
      wsum * eyyt_core +
      ey.transpose() * (ey.array().colwise() * hx.array()).matrix();
  am.szz.block(0, k, k, 1) = ey.transpose() * hx;
  am.szz.block(k, 0, 1, k) = am.szz.block(0, k, k, 1).transpose();
  am.szz(k, k) = wsum;

  am.sxx_diag = (data.array().square().colwise() * hx.array())
                    .colwise()
                    .sum()
                    .transpose();
  return am;
}

void check_psi(const Eigen::VectorXd& psi, double floor) {
  for (Eigen::Index r = 0; r < psi.size(); ++r) {
    if (psi[r] < floor) throw heywood_error(static_cast<int>(r), psi[r]);
  }
}

MFAModel init_mfa(const Eigen::MatrixXd& data, int m,
                  const std::vector<int>& k, std::mt19937_64& rng) {
  const Eigen::Index d = data.cols();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::VectorXd var =
      centered.array().square().colwise().mean().transpose();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);

  const double shrink =
      std::pow(static_cast<double>(m), 2.0 / static_cast<double>(d));
  std::uniform_real_distribution<double> unif(-0.5, 0.5);

  MFAModel model;
  model.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  model.noise_vars = (var / shrink).cwiseMax(1e-8) * 0.5;
  for (int i = 0; i < m; ++i) {
    MFAComponent comp;
    comp.mean = data.row(idx[static_cast<std::size_t>(i)]).transpose();
    comp.loading.resize(d, k[static_cast<std::size_t>(i)]);
    const double col_scale =
        k[static_cast<std::size_t>(i)] > 0
            ? std::sqrt(6.0 / k[static_cast<std::size_t>(i)])
            : 0.0;
    for (Eigen::Index r = 0; r < d; ++r) {
      const double sd = std::sqrt(std::max(var[r], 1e-12) / shrink * 0.5);
      for (int j = 0; j < k[static_cast<std::size_t>(i)]; ++j) {
        comp.loading(r, j) = unif(rng) * col_scale * sd;
      }
    }
    model.components.push_back(std::move(comp));
  }
  return model;
}

}  // namespace

double mfa_component_df(int d, int k) {
  return static_cast<double>(d) + static_cast<double>(d) * k -
         0.5 * k * (k - 1);
}

double mfa_loglik(const Eigen::MatrixXd& data, const MFAModel& model) {
  if (model.count() < 1) {
    throw std::invalid_argument("mfa_loglik: empty model");
  }
  if (data.cols() != model.dim()) {
    throw std::invalid_argument("mfa_loglik: dimension mismatch");
  }
  Eigen::MatrixXd log_joint(data.rows(), model.count());
  for (int i = 0; i < model.count(); ++i) {
    if (model.weights[i] <= 0.0) {
      log_joint.col(i).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    const ComponentFactor cf = factor_analyzer(model, i);
    log_joint.col(i) =
        analyzer_log_density(data,
                             model.components[static_cast<std::size_t>(i)].mean,
                             cf)
            .array() +
        std::log(model.weights[i]);
  }
  double loglik = 0.0;
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    const double mx = log_joint.row(t).maxCoeff();
    loglik += mx + std::log((log_joint.row(t).array() - mx).exp().sum());
  }
  return loglik;
}

MFAFit mfa_em_fit(const Eigen::MatrixXd& data, int m,
                  const std::vector<int>& k, const MFAFitOptions& opts) {
  if (m < 1 || static_cast<int>(k.size()) != m) {
    throw std::invalid_argument("mfa_em_fit: k must list one count per analyzer");
  }
  const Eigen::Index d = data.cols();
  for (int ki : k) {
    if (ki < 0 || ki >= d) {
      throw std::invalid_argument("mfa_em_fit: requires 0 <= k_i < d");
    }
  }
  std::mt19937_64 rng(opts.seed);
  MFAFit fit;
  fit.model = init_mfa(data, m, k, rng);
  const Eigen::Index n = data.rows();

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const MFAEStep e = mfa_e_step(data, fit.model);
    fit.trace.push_back(e.loglik);
    if (iter > 0 &&
        std::abs(e.loglik - prev) < opts.tol * (1.0 + std::abs(prev))) {
      fit.converged = true;
      break;
    }
    prev = e.loglik;

    Eigen::VectorXd psi_acc = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < m; ++i) {
      const AugmentedMoments am = analyzer_moments(
          data, fit.model, i, e.factors[static_cast<std::size_t>(i)],
          e.resp.col(i));
      const int ki = fit.model.components[static_cast<std::size_t>(i)].factors();
      const Eigen::MatrixXd aug =
          am.szz.ldlt().solve(am.sxz.transpose()).transpose();
      auto& comp = fit.model.components[static_cast<std::size_t>(i)];
      comp.loading = aug.leftCols(ki);
      comp.mean = aug.col(ki);
      psi_acc += am.sxx_diag - 2.0 * (aug * am.sxz.transpose()).diagonal() +
                 (aug * am.szz * aug.transpose()).diagonal();
      fit.model.weights[i] = e.resp_sums[i] / static_cast<double>(n);
    }
    fit.model.noise_vars = psi_acc / static_cast<double>(n);
    check_psi(fit.model.noise_vars, opts.psi_floor);
  }
  fit.loglik = fit.trace.back();
  return fit;
}

double mfa_mml_length(const MFAModel& model, std::size_t n, double loglik) {
  const int d = static_cast<int>(model.dim());
  const double nd = static_cast<double>(n);
  double first = 0.0;
  double df_sum = 0.0;
  int m_nz = 0;
  for (int i = 0; i < model.count(); ++i) {
    if (model.weights[i] > 0.0) {
      const double df = mfa_component_df(
          d, model.components[static_cast<std::size_t>(i)].factors());
      first += df * std::log(nd * model.weights[i] / 12.0);
      df_sum += df;
      ++m_nz;
    }
  }
  if (m_nz < 1) {
    throw std::invalid_argument("mfa_mml_length: no nonzero components");
  }
  return 0.5 * first + 0.5 * df_sum +
         0.5 * m_nz * (std::log(nd / 12.0) + 1.0) - loglik;
}

double nf_hat(const Eigen::MatrixXd& loading, const Eigen::VectorXd& anchors,
              int d, int k) {
  if (loading.rows() != d || loading.cols() != k || anchors.size() != k) {
    throw std::invalid_argument("nf_hat: dimension mismatch");
  }
  double penalty_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    if (anchors[j] <= 0.0) {
      throw std::invalid_argument("nf_hat: anchors must be positive");
    }
    penalty_sum += loading.col(j).norm() / anchors[j];
  }
  return 0.5 * k * (k - 1) + (d - k + 1.0) * penalty_sum;
}

namespace {

double analyzer_df_hat(const MFAModel& model, const MFAPenaltyState& penalty,
                       int i) {
  const int d = static_cast<int>(model.dim());
  const auto& comp = model.components[static_cast<std::size_t>(i)];
  return nf_hat(comp.loading,
                penalty.column_norm_anchors[static_cast<std::size_t>(i)], d,
                comp.factors()) +
         static_cast<double>(d);
}

}  // namespace

double mfa_npl(const Eigen::MatrixXd& data, const MFAModel& model,
               const MFAPenaltyState& penalty, std::size_t n) {
  if (penalty.pi_weights.w.size() != model.weights.size() ||
      static_cast<int>(penalty.column_norm_anchors.size()) != model.count()) {
    throw std::invalid_argument("mfa_npl: penalty state mismatch");
  }
  const double nd = static_cast<double>(n);
  const double eps = penalty.pi_weights.epsilon;
  double value = -mfa_loglik(data, model);
  for (int i = 0; i < model.count(); ++i) {
    const double pi = model.weights[i];
    const double df_hat = analyzer_df_hat(model, penalty, i);
    if (pi > 0.0) {
      value += 0.5 * df_hat * std::log(nd * pi / 12.0);
    }
    value += penalty.pi_weights.w[i] * std::log((pi + eps) / eps) *
             (df_hat + std::log(nd / 12.0) + 1.0);
  }
  return value;
}

MFANplGradient mfa_npl_gradient(const Eigen::MatrixXd& data,
                                const MFAModel& model,
                                const MFAPenaltyState& penalty,
                                std::size_t n) {
  const int m = model.count();
  const int d = static_cast<int>(model.dim());
  const double nd = static_cast<double>(n);
  const double eps = penalty.pi_weights.epsilon;

  Eigen::MatrixXd log_joint(data.rows(), m);
  std::vector<ComponentFactor> cfs;
  for (int i = 0; i < m; ++i) {
    if (model.weights[i] <= 0.0) {
      throw std::invalid_argument("mfa_npl_gradient: weights must be positive");
    }
    cfs.push_back(factor_analyzer(model, i));
    log_joint.col(i) =
        analyzer_log_density(data,
                             model.components[static_cast<std::size_t>(i)].mean,
                             cfs.back())
            .array() +
        std::log(model.weights[i]);
  }
  Eigen::MatrixXd resp(data.rows(), m);
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    const double mx = log_joint.row(t).maxCoeff();
    const Eigen::ArrayXd shifted = (log_joint.row(t).array() - mx).exp();
    resp.row(t) = (shifted / shifted.sum()).matrix();
  }

  MFANplGradient grad;
  grad.weights.resize(m);
  grad.noise_vars = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < m; ++i) {
    const auto& comp = model.components[static_cast<std::size_t>(i)];
    const double pi = model.weights[i];
    const double df_hat = analyzer_df_hat(model, penalty, i);
    const double beta_i = df_hat + std::log(nd / 12.0) + 1.0;
    grad.weights[i] = 0.5 * df_hat / pi +
                      penalty.pi_weights.w[i] / (pi + eps) * beta_i -
                      resp.col(i).sum() / pi;

    const Eigen::MatrixXd centered = data.rowwise() - comp.mean.transpose();
    const Eigen::MatrixXd solved =
        cfs[static_cast<std::size_t>(i)].llt.solve(centered.transpose());
    grad.means.push_back(-(solved * resp.col(i)));

    const Eigen::MatrixXd cinv = cfs[static_cast<std::size_t>(i)].llt.solve(
        Eigen::MatrixXd::Identity(d, d));
    const Eigen::MatrixXd weighted = solved * resp.col(i).asDiagonal();
    const Eigen::MatrixXd dneg_dc =
        0.5 * (resp.col(i).sum() * cinv - weighted * solved.transpose());
    Eigen::MatrixXd dl = 2.0 * dneg_dc * comp.loading;

    // Penalty part: the column-norm terms enter through df_hat with the
    // pi-dependent multiplier.
    const double multiplier =
        0.5 * std::log(nd * pi / 12.0) +
        penalty.pi_weights.w[i] * std::log((pi + eps) / eps);
    const auto& anchors =
        penalty.column_norm_anchors[static_cast<std::size_t>(i)];
    for (int j = 0; j < comp.factors(); ++j) {
      const double norm = comp.loading.col(j).norm();
      if (norm <= 0.0) {
        throw std::invalid_argument("mfa_npl_gradient: zero column norm");
      }
      dl.col(j) += multiplier * (d - comp.factors() + 1.0) / anchors[j] *
                   comp.loading.col(j) / norm;
    }
    grad.loadings.push_back(dl);
    grad.noise_vars += dneg_dc.diagonal();
  }
  return grad;
}

QuickMMLMFAResult quick_mml_mfa(const Eigen::MatrixXd& data, int m_init,
                                int k_init, std::uint64_t seed,
                                const QuickMMLMFAOptions& opts) {
  if (m_init < 1) {
    throw std::invalid_argument("quick_mml_mfa: m_init must be >= 1");
  }
  if (k_init < 0 || k_init >= data.cols()) {
    throw std::invalid_argument("quick_mml_mfa: requires 0 <= k_init < d");
  }
  const Eigen::Index n = data.rows();
  const int d = static_cast<int>(data.cols());
  const double nd = static_cast<double>(n);

  // Anchor at a capped unpenalized fit, mirroring the ML anchoring of the
  // single-analyzer column-shrinkage solver.
  MFAFitOptions burn;
  burn.seed = seed;
  burn.max_iter = opts.burn_in;
  burn.tol = 1e-9;
  const MFAFit burned =
      mfa_em_fit(data, m_init, std::vector<int>(m_init, k_init), burn);

  QuickMMLMFAResult result;
  MFAModel& model = result.model;
  model = burned.model;

  const auto refresh_anchors = [&] {
    result.penalty.pi_weights =
        LogPenaltyWeights::from_mixing(model.weights, opts.epsilon);
    result.penalty.column_norm_anchors.clear();
    for (int i = 0; i < model.count(); ++i) {
      const auto& comp = model.components[static_cast<std::size_t>(i)];
      Eigen::VectorXd a(comp.factors());
      for (int j = 0; j < comp.factors(); ++j) {
        a[j] = std::max(comp.loading.col(j).norm(), kWeightFloor);
      }
      result.penalty.column_norm_anchors.push_back(std::move(a));
    }
  };
  refresh_anchors();

  std::vector<int> component_ids(static_cast<std::size_t>(m_init));
  std::iota(component_ids.begin(), component_ids.end(), 0);

  double prev = mfa_npl(data, model, result.penalty,
                        static_cast<std::size_t>(n));
  result.npl_trace.push_back(prev);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const MFAEStep e = mfa_e_step(data, model);
    const int m = model.count();

    // Generalized mixing update: each analyzer carries its own df_hat in the
    // clamped stationarity condition.
    Eigen::VectorXd df_hat(m), beta(m);
    for (int i = 0; i < m; ++i) {
      df_hat[i] = analyzer_df_hat(model, result.penalty, i);
      beta[i] = std::log(nd / 12.0) + df_hat[i] + 1.0;
    }
    const Eigen::VectorXd& w = result.penalty.pi_weights.w;
    const double denom =
        nd - 0.5 * df_hat.sum() - 0.5 * w.dot(beta);
    if (denom <= 0.0) {
      throw step_degenerate("quick_mml_mfa: non-positive pi denominator");
    }
    Eigen::VectorXd pi_new(m);
    for (int i = 0; i < m; ++i) {
      pi_new[i] = std::max(
          0.0, (e.resp_sums[i] - 0.5 * df_hat[i] - 0.5 * w[i] * beta[i]) /
                   denom);
    }
    const double pi_total = pi_new.sum();
    if (pi_total > 0.0) {
      for (int i = 0; i < m; ++i) {
        if (pi_new[i] > 0.0) pi_new[i] /= pi_total;
      }
    }

    // Loading / mean update with LQA on the group terms, then pooled Psi.
    Eigen::VectorXd psi_acc = Eigen::VectorXd::Zero(d);
    std::vector<Eigen::MatrixXd> augs;
    for (int i = 0; i < m; ++i) {
      const auto& anchors =
          result.penalty.column_norm_anchors[static_cast<std::size_t>(i)];
      auto& comp = model.components[static_cast<std::size_t>(i)];
      const int ki = comp.factors();
      const AugmentedMoments am = analyzer_moments(
          data, model, i, e.factors[static_cast<std::size_t>(i)],
          e.resp.col(i));

      const double pi_for_pen = std::max(pi_new[i], 1.0 / nd);
      const double multiplier = std::max(
          0.0, 0.5 * std::log(nd * pi_for_pen / 12.0) +
                   w[i] * std::log((pi_for_pen + opts.epsilon) / opts.epsilon));
      Eigen::VectorXd q(ki + 1);
      for (int j = 0; j < ki; ++j) {
        const double c =
            multiplier * (d - ki + 1.0) / anchors[j];
        q[j] = c / (2.0 * (comp.loading.col(j).norm() + opts.lqa_ridge));
      }
      q[ki] = 0.0;  // mean column is unpenalized

      Eigen::MatrixXd aug(d, ki + 1);
      for (Eigen::Index r = 0; r < d; ++r) {
        Eigen::MatrixXd lhs = am.szz;
        lhs.diagonal() += 2.0 * model.noise_vars[r] * q;
        aug.row(r) = lhs.ldlt().solve(am.sxz.row(r).transpose()).transpose();
      }
      psi_acc += am.sxx_diag - 2.0 * (aug * am.sxz.transpose()).diagonal() +
                 (aug * am.szz * aug.transpose()).diagonal();
      augs.push_back(std::move(aug));
    }
    for (int i = 0; i < m; ++i) {
      auto& comp = model.components[static_cast<std::size_t>(i)];
      const int ki = comp.factors();
      comp.loading = augs[static_cast<std::size_t>(i)].leftCols(ki);
      comp.mean = augs[static_cast<std::size_t>(i)].col(ki);
    }
    model.noise_vars = psi_acc / nd;
    check_psi(model.noise_vars, 1e-8);
    model.weights = pi_new;

    // Column drops.
    bool structural = false;
    for (int i = 0; i < m; ++i) {
      auto& comp = model.components[static_cast<std::size_t>(i)];
      auto& anchors =
          result.penalty.column_norm_anchors[static_cast<std::size_t>(i)];
      std::vector<int> keep;
      for (int j = 0; j < comp.factors(); ++j) {
        if (comp.loading.col(j).norm() >=
            opts.column_drop_rel * anchors[j]) {
          keep.push_back(j);
        }
      }
      if (static_cast<int>(keep.size()) < comp.factors()) {
        structural = true;
        Eigen::MatrixXd pruned(d, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t a = 0; a < keep.size(); ++a) {
          pruned.col(static_cast<Eigen::Index>(a)) =
              comp.loading.col(keep[a]);
        }
        comp.loading = pruned;
        result.events.push_back({iter, StructuralEventKind::ColumnDrop,
                                 component_ids[static_cast<std::size_t>(i)]});
      }
    }

    // Component drops.
    std::vector<int> keep_components;
    for (int i = 0; i < m; ++i) {
      if (model.weights[i] >= 1.0 / nd) {
        keep_components.push_back(i);
      } else {
        structural = true;
        result.events.push_back({iter, StructuralEventKind::ComponentDrop,
                                 component_ids[static_cast<std::size_t>(i)]});
      }
    }
    if (keep_components.empty()) {
      result.selection.degenerate = true;
      break;
    }
    if (static_cast<int>(keep_components.size()) < m) {
      MFAModel pruned;
      pruned.noise_vars = model.noise_vars;
      std::vector<int> ids;
      Eigen::VectorXd wts(static_cast<Eigen::Index>(keep_components.size()));
      for (std::size_t a = 0; a < keep_components.size(); ++a) {
        wts[static_cast<Eigen::Index>(a)] = model.weights[keep_components[a]];
        pruned.components.push_back(
            model.components[static_cast<std::size_t>(keep_components[a])]);
        ids.push_back(component_ids[static_cast<std::size_t>(keep_components[a])]);
      }
      pruned.weights = wts / wts.sum();
      model = std::move(pruned);
      component_ids = std::move(ids);
    }

    if (structural) {
      refresh_anchors();
    } else if (opts.weight_refresh_interval > 0 &&
               (iter + 1) % opts.weight_refresh_interval == 0) {
      refresh_anchors();
      result.events.push_back({iter, StructuralEventKind::WeightRefresh, -1});
      structural = true;
    }

    const double npl =
        mfa_npl(data, model, result.penalty, static_cast<std::size_t>(n));
    result.npl_trace.push_back(npl);
    if (!structural &&
        std::abs(npl - prev) < opts.tol * (1.0 + std::abs(prev))) {
      converged = true;
      break;
    }
    prev = npl;
  }

  result.selection.converged = converged || result.selection.degenerate;
  result.selection.support = component_ids;
  if (result.selection.degenerate) result.selection.support.clear();
  result.selection.estimate = Eigen::VectorXd::Zero(m_init);
  if (!result.selection.degenerate) {
    for (std::size_t i = 0; i < component_ids.size(); ++i) {
      result.selection.estimate[component_ids[i]] =
          model.weights[static_cast<Eigen::Index>(i)];
    }
  }
  result.selection.objective = result.npl_trace.back();
  for (std::size_t i = 0; i < result.npl_trace.size(); ++i) {
    result.selection.trace.emplace_back(static_cast<int>(i),
                                        result.npl_trace[i]);
  }
  return result;
}

}  // namespace quickic
