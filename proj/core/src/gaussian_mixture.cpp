#include "quickic/gaussian_mixture.hpp"

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

struct ComponentDensity {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_norm = 0.0;  // -0.5 (d log 2pi + log|Sigma|)
};

ComponentDensity factor_component(const Eigen::MatrixXd& cov) {
  ComponentDensity cd;
  cd.llt.compute(cov);
  if (cd.llt.info() != Eigen::Success) {
    throw numeric_error("mixture covariance not positive definite");
  }
  const double log_det =
      2.0 * cd.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  cd.log_norm = -0.5 * (static_cast<double>(cov.rows()) *
                            std::log(2.0 * std::numbers::pi) +
                        log_det);
  return cd;
}

// Log-density of every data row under one component.
Eigen::VectorXd component_log_density(const Eigen::MatrixXd& data,
                                      const Eigen::VectorXd& mean,
                                      const ComponentDensity& cd) {
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd solved = cd.llt.solve(centered.transpose());
  const Eigen::VectorXd quad =
      (centered.array() * solved.transpose().array()).rowwise().sum();
  return (-0.5 * quad).array() + cd.log_norm;
}

struct EStep {
  Eigen::MatrixXd resp;       // n x m, rows sum to one
  Eigen::VectorXd resp_sums;  // m
  double loglik = 0.0;
};

EStep gmm_e_step(const Eigen::MatrixXd& data, const GMMModel& model) {
  const Eigen::Index n = data.rows();
  const int m = model.components();
  Eigen::MatrixXd log_joint(n, m);
  for (int i = 0; i < m; ++i) {
    const ComponentDensity cd = factor_component(model.covariances[i]);
    log_joint.col(i) =
        component_log_density(data, model.means[i], cd).array() +
        std::log(model.weights[i]);
  }
  EStep e;
  e.resp.resize(n, m);
  e.loglik = 0.0;
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

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows());
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, int m,
                                                     std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(m));
  return idx;
}

GMMModel init_gmm(const Eigen::MatrixXd& data, int m, std::mt19937_64& rng) {
  GMMModel model;
  model.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  const Eigen::MatrixXd s = sample_covariance(data);
  const double d = static_cast<double>(data.cols());
  const Eigen::MatrixXd cov0 =
      s / std::pow(static_cast<double>(m), 2.0 / d) +
      (1e-10 * s.trace() / d) * Eigen::MatrixXd::Identity(data.cols(),
                                                          data.cols());
  for (Eigen::Index i : sample_without_replacement(data.rows(), m, rng)) {
    model.means.push_back(data.row(i).transpose());
    model.covariances.push_back(cov0);
  }
  return model;
}

}  // namespace

double gmm_component_df(int d) {
  return static_cast<double>(d) + 0.5 * d * (d + 1);
}

LogPenaltyWeights LogPenaltyWeights::from_mixing(const Eigen::VectorXd& pi_hat,
                                                 double epsilon) {
  if (epsilon <= 0.0) {
    throw std::invalid_argument("LogPenaltyWeights: epsilon must be positive");
  }
  LogPenaltyWeights lw;
  lw.epsilon = epsilon;
  lw.w.resize(pi_hat.size());
  for (Eigen::Index i = 0; i < pi_hat.size(); ++i) {
    if (pi_hat[i] <= 0.0) {
      throw std::invalid_argument(
          "LogPenaltyWeights: anchor mixing weights must be positive");
    }
    lw.w[i] = 1.0 / std::log((epsilon + pi_hat[i]) / epsilon);
  }
  return lw;
}

double gmm_loglik(const Eigen::MatrixXd& data, const GMMModel& model) {
  if (model.components() < 1) {
    throw std::invalid_argument("gmm_loglik: empty model");
  }
  if (data.cols() != model.dim()) {
    throw std::invalid_argument("gmm_loglik: dimension mismatch");
  }
  const int m = model.components();
  Eigen::MatrixXd log_joint(data.rows(), m);
  for (int i = 0; i < m; ++i) {
    if (model.weights[i] <= 0.0) {
      log_joint.col(i).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    const ComponentDensity cd = factor_component(model.covariances[i]);
    log_joint.col(i) =
        component_log_density(data, model.means[i], cd).array() +
        std::log(model.weights[i]);
  }
  double loglik = 0.0;
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    const double mx = log_joint.row(t).maxCoeff();
    loglik += mx + std::log((log_joint.row(t).array() - mx).exp().sum());
  }
  return loglik;
}

double gmm_mml_length(const GMMModel& model, std::size_t n, double loglik) {
  const double df = gmm_component_df(static_cast<int>(model.dim()));
  const double nd = static_cast<double>(n);
  double log_pi_sum = 0.0;
  int m_nz = 0;
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] > 0.0) {
      log_pi_sum += std::log(nd * model.weights[i] / 12.0);
      ++m_nz;
    }
  }
  if (m_nz < 1) {
    throw std::invalid_argument("gmm_mml_length: no nonzero components");
  }
  return 0.5 * df * log_pi_sum + 0.5 * m_nz * std::log(nd / 12.0) +
         0.5 * m_nz * (df + 1.0) - loglik;
}

namespace {

double penalty_terms(const Eigen::VectorXd& pi, const LogPenaltyWeights& lw,
                     std::size_t n, double df) {
  const double nd = static_cast<double>(n);
  double log_pi_sum = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi[i] > 0.0) log_pi_sum += std::log(nd * pi[i] / 12.0);
  }
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    weighted += lw.w[i] * std::log((pi[i] + lw.epsilon) / lw.epsilon);
  }
  return 0.5 * df * log_pi_sum +
         (std::log(nd / 12.0) + df + 1.0) * weighted;
}

}  // namespace

double gmm_npl(const Eigen::MatrixXd& data, const GMMModel& model,
               const LogPenaltyWeights& weights, std::size_t n) {
  if (weights.w.size() != model.weights.size()) {
    throw std::invalid_argument("gmm_npl: weight length mismatch");
  }
  const double df = gmm_component_df(static_cast<int>(model.dim()));
  return penalty_terms(model.weights, weights, n, df) -
         gmm_loglik(data, model);
}

GMMNplGradient gmm_npl_gradient(const Eigen::MatrixXd& data,
                                const GMMModel& model,
                                const LogPenaltyWeights& weights,
                                std::size_t n) {
  const int m = model.components();
  const double df = gmm_component_df(static_cast<int>(model.dim()));
  const double beta = std::log(static_cast<double>(n) / 12.0) + df + 1.0;

  // Responsibilities under the (possibly non-normalized) weights as given.
  Eigen::MatrixXd log_joint(data.rows(), m);
  std::vector<ComponentDensity> cds;
  cds.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    if (model.weights[i] <= 0.0) {
      throw std::invalid_argument(
          "gmm_npl_gradient: weights must be positive (away from the kink)");
    }
    cds.push_back(factor_component(model.covariances[i]));
    log_joint.col(i) =
        component_log_density(data, model.means[i], cds.back()).array() +
        std::log(model.weights[i]);
  }
  Eigen::MatrixXd resp(data.rows(), m);
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    const double mx = log_joint.row(t).maxCoeff();
    const Eigen::ArrayXd shifted = (log_joint.row(t).array() - mx).exp();
    resp.row(t) = (shifted / shifted.sum()).matrix();
  }

  GMMNplGradient grad;
  grad.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double pi = model.weights[i];
    grad.weights[i] = 0.5 * df / pi +
                      beta * weights.w[i] / (pi + weights.epsilon) -
                      resp.col(i).sum() / pi;

    const Eigen::MatrixXd centered =
        data.rowwise() - model.means[i].transpose();
    const Eigen::MatrixXd solved = cds[static_cast<std::size_t>(i)]
                                       .llt.solve(centered.transpose());

    grad.means.push_back(-(solved * resp.col(i)));

    // d(-l)/dC = 0.5 sum_t r_t (C^-1 - C^-1 u u^T C^-1)
    const Eigen::Index d = model.dim();
    const Eigen::MatrixXd cinv =
        cds[static_cast<std::size_t>(i)].llt.solve(
            Eigen::MatrixXd::Identity(d, d));
    const Eigen::MatrixXd weighted = solved * resp.col(i).asDiagonal();
    Eigen::MatrixXd dc =
        0.5 * (resp.col(i).sum() * cinv - weighted * solved.transpose());
    // Symmetric-pair convention: off-diagonal entries carry both (a,b) and
    // (b,a) contributions.
    Eigen::MatrixXd pair = 2.0 * dc;
    pair.diagonal() = dc.diagonal();
    grad.covariances.push_back(pair);
  }
  return grad;
}

Eigen::VectorXd pi_update(const Eigen::VectorXd& resp_sums,
                          const LogPenaltyWeights& weights, std::size_t n,
                          int m, int d) {
  if (resp_sums.size() != m || weights.w.size() != m) {
    throw std::invalid_argument("pi_update: length mismatch");
  }
  const double nd = static_cast<double>(n);
  if (std::abs(resp_sums.sum() - nd) > 1e-6 * nd) {
    throw std::invalid_argument("pi_update: responsibilities do not sum to n");
  }
  const double df = gmm_component_df(d);
  const double beta = std::log(nd / 12.0) + df + 1.0;
  const double denom = nd - 0.5 * m * df - 0.5 * beta * weights.w.sum();
  if (denom <= 0.0) {
    throw step_degenerate("pi_update: non-positive denominator");
  }
  Eigen::VectorXd pi(m);
  for (int i = 0; i < m; ++i) {
    pi[i] = std::max(
        0.0, (resp_sums[i] - 0.5 * df - 0.5 * weights.w[i] * beta) / denom);
  }
  const double total = pi.sum();
  if (total > 0.0) {
    for (int i = 0; i < m; ++i) {
      if (pi[i] > 0.0) pi[i] /= total;  // zeros stay exact
    }
  }
  return pi;
}

GMMFit gmm_em_fit(const Eigen::MatrixXd& data, int m,
                  const GMMFitOptions& opts) {
  if (m < 1 || m > data.rows()) {
    throw std::invalid_argument("gmm_em_fit: requires 1 <= m <= n");
  }
  std::mt19937_64 rng(opts.seed);
  GMMFit fit;
  fit.model = init_gmm(data, m, rng);
  const Eigen::Index n = data.rows();
  const double cov_floor =
      1e-8 * sample_covariance(data).trace() / static_cast<double>(data.cols());

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const EStep e = gmm_e_step(data, fit.model);
    fit.trace.push_back(e.loglik);
    if (iter > 0 &&
        std::abs(e.loglik - prev) < opts.tol * (1.0 + std::abs(prev))) {
      fit.converged = true;
      break;
    }
    prev = e.loglik;

    for (int i = 0; i < m; ++i) {
      const double wsum = e.resp_sums[i];
      fit.model.weights[i] = wsum / static_cast<double>(n);
      if (wsum <= 0.0) continue;
      const Eigen::VectorXd mu =
          data.transpose() * e.resp.col(i) / wsum;
      const Eigen::MatrixXd centered = data.rowwise() - mu.transpose();
      Eigen::MatrixXd cov = centered.transpose() *
                            e.resp.col(i).asDiagonal() * centered / wsum;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
      if (es.eigenvalues().minCoeff() < cov_floor) {
        cov = es.eigenvectors() *
              es.eigenvalues().cwiseMax(cov_floor).asDiagonal() *
              es.eigenvectors().transpose();
      }
      fit.model.means[i] = mu;
      fit.model.covariances[i] = cov;
    }
  }
  fit.loglik = fit.trace.back();
  return fit;
}

QuickMMLGMMResult quick_mml_gmm(const Eigen::MatrixXd& data, int m_max,
                                std::uint64_t seed,
                                const QuickMMLOptions& opts) {
  if (m_max < 1) {
    throw std::invalid_argument("quick_mml_gmm: m_max must be >= 1");
  }
  const Eigen::Index n = data.rows();
  const int d = static_cast<int>(data.cols());
  const double nd = static_cast<double>(n);
  const double cov_floor =
      1e-8 * sample_covariance(data).trace() / static_cast<double>(d);

  std::mt19937_64 rng(seed);
  QuickMMLGMMResult result;
  GMMModel& model = result.model;
  model = init_gmm(data, m_max, rng);
  result.weights = LogPenaltyWeights::from_mixing(model.weights, opts.epsilon);

  std::vector<int> component_ids(static_cast<std::size_t>(m_max));
  std::iota(component_ids.begin(), component_ids.end(), 0);
  std::vector<int> breach(static_cast<std::size_t>(m_max), 0);

  double prev = gmm_npl(data, model, result.weights, static_cast<std::size_t>(n));
  result.npl_trace.push_back(prev);
  bool converged = false;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const EStep e = gmm_e_step(data, model);
    const int m = model.components();
    const Eigen::VectorXd pi_new = pi_update(
        e.resp_sums, result.weights, static_cast<std::size_t>(n), m, d);

    std::vector<char> drop(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
      if (pi_new[i] < 1.0 / nd) {
        drop[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      const double wsum = e.resp_sums[i];
      const Eigen::VectorXd mu = data.transpose() * e.resp.col(i) / wsum;
      const Eigen::MatrixXd centered = data.rowwise() - mu.transpose();
      Eigen::MatrixXd cov = centered.transpose() *
                            e.resp.col(i).asDiagonal() * centered / wsum;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
      if (es.eigenvalues().minCoeff() < cov_floor) {
        cov = es.eigenvectors() *
              es.eigenvalues().cwiseMax(cov_floor).asDiagonal() *
              es.eigenvectors().transpose();
        if (++breach[static_cast<std::size_t>(i)] >= 2) {
          drop[static_cast<std::size_t>(i)] = 1;
          result.events.push_back({iter,
                                   StructuralEventKind::CovarianceCollapse,
                                   component_ids[static_cast<std::size_t>(i)]});
          continue;
        }
      } else {
        breach[static_cast<std::size_t>(i)] = 0;
      }
      model.means[static_cast<std::size_t>(i)] = mu;
      model.covariances[static_cast<std::size_t>(i)] = cov;
    }
    model.weights = pi_new;

    bool structural = false;
    if (std::any_of(drop.begin(), drop.end(), [](char c) { return c != 0; })) {
      structural = true;
      GMMModel pruned;
      std::vector<int> keep_ids;
      std::vector<int> keep_breach;
      std::vector<double> keep_pi;
      for (int i = 0; i < m; ++i) {
        if (drop[static_cast<std::size_t>(i)]) {
          if (pi_new[i] < 1.0 / nd) {
            result.events.push_back(
                {iter, StructuralEventKind::ComponentDrop,
                 component_ids[static_cast<std::size_t>(i)]});
          }
          continue;
        }
        keep_pi.push_back(pi_new[i]);
        pruned.means.push_back(model.means[static_cast<std::size_t>(i)]);
        pruned.covariances.push_back(
            model.covariances[static_cast<std::size_t>(i)]);
        keep_ids.push_back(component_ids[static_cast<std::size_t>(i)]);
        keep_breach.push_back(breach[static_cast<std::size_t>(i)]);
      }
      if (keep_pi.empty()) {
        result.selection.degenerate = true;
        break;
      }
      pruned.weights =
          Eigen::Map<Eigen::VectorXd>(keep_pi.data(),
                                      static_cast<Eigen::Index>(keep_pi.size()));
      pruned.weights /= pruned.weights.sum();
      model = std::move(pruned);
      component_ids = std::move(keep_ids);
      breach.assign(keep_breach.begin(), keep_breach.end());
      if (opts.refresh_on_drop) {
        result.weights =
            LogPenaltyWeights::from_mixing(model.weights, opts.epsilon);
      }
    }

    if (opts.weight_refresh_interval > 0 &&
        (iter + 1) % opts.weight_refresh_interval == 0) {
      result.weights =
          LogPenaltyWeights::from_mixing(model.weights, opts.epsilon);
      result.events.push_back({iter, StructuralEventKind::WeightRefresh, -1});
      structural = true;
    }

    const double npl =
        gmm_npl(data, model, result.weights, static_cast<std::size_t>(n));
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
  result.selection.estimate = Eigen::VectorXd::Zero(m_max);
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
