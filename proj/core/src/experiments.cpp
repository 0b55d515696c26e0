#include "quickic/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "quickic/factor_analysis.hpp"
#include "quickic/gaussian_mixture.hpp"
#include "quickic/linreg.hpp"
#include "quickic/mfa.hpp"
#include "quickic/rng.hpp"

namespace quickic {

namespace {

using nlohmann::json;

std::string case_name(DesignCase c) {
  switch (c) {
    case DesignCase::I: return "I";
    case DesignCase::II: return "II";
    case DesignCase::III: return "III";
  }
  return "?";
}

DesignCase case_from_name(const std::string& s) {
  if (s == "I") return DesignCase::I;
  if (s == "II") return DesignCase::II;
  if (s == "III") return DesignCase::III;
  throw std::invalid_argument("unknown design case: " + s);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

/// Runs fn(trial) for every trial on a small worker pool; results must be
/// written into trial-indexed slots so collection order is deterministic.
void parallel_trials(int trials, int threads,
                     const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
        fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

bool method_enabled(const ExperimentConfig& config, const std::string& name) {
  if (config.methods.empty()) return true;
  return std::find(config.methods.begin(), config.methods.end(), name) !=
         config.methods.end();
}

void write_trial_csv(const std::filesystem::path& path,
                     const std::vector<TrialReport>& reports) {
  std::ofstream out(path);
  out << "dataset,trial,seed,method,structure,selected_size,objective,"
         "duration_ms,converged,failed,error\n";
  for (const TrialReport& r : reports) {
    out << r.dataset << ',' << r.trial << ',' << r.seed << ',' << r.method
        << ',' << '"' << r.structure << '"' << ',' << r.selected_size << ','
        << r.objective << ',' << r.duration_ms << ',' << (r.converged ? 1 : 0)
        << ',' << (r.failed ? 1 : 0) << ',' << '"' << r.error << '"' << '\n';
  }
}

void write_frequency_csv(const std::filesystem::path& path,
                         const std::vector<FrequencyTable>& tables) {
  std::ofstream out(path);
  out << "table,bucket,count,successful_trials\n";
  for (const FrequencyTable& t : tables) {
    for (const auto& [bucket, count] : t.buckets) {
      out << t.name << ',' << bucket << ',' << count << ','
          << t.successful_trials << '\n';
    }
  }
}

const char* kDiffBucketsCapped[] = {"-2", "-1", "0", "1", "2"};
const char* kDiffBucketsOpen[] = {"<-1", "-1", "0", "1", ">1"};

FrequencyTable tabulate_diffs(const std::string& name,
                              const std::vector<int>& diffs, bool capped) {
  FrequencyTable table;
  table.name = name;
  table.successful_trials = static_cast<int>(diffs.size());
  int counts[5] = {0, 0, 0, 0, 0};
  for (int d : diffs) {
    const int idx = std::clamp(d, -2, 2) + 2;
    counts[idx] += 1;
  }
  for (int i = 0; i < 5; ++i) {
    table.buckets.emplace_back(
        capped ? kDiffBucketsCapped[i] : kDiffBucketsOpen[i], counts[i]);
  }
  return table;
}

struct MethodTiming {
  std::vector<double> durations_ms;
};

json timing_summary(const std::vector<TrialReport>& reports) {
  std::map<std::string, MethodTiming> timings;
  for (const TrialReport& r : reports) {
    if (!r.failed) timings[r.method].durations_ms.push_back(r.duration_ms);
  }
  json out = json::object();
  for (auto& [method, t] : timings) {
    std::sort(t.durations_ms.begin(), t.durations_ms.end());
    const std::size_t n = t.durations_ms.size();
    double mean = 0.0;
    for (double v : t.durations_ms) mean += v;
    if (n > 0) mean /= static_cast<double>(n);
    out[method] = {
        {"count", n},
        {"median_ms", n > 0 ? t.durations_ms[n / 2] : 0.0},
        {"mean_ms", mean},
    };
  }
  return out;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Table1: return "table1";
    case ExperimentKind::FAHistogram: return "fa_histogram";
    case ExperimentKind::GMM: return "gmm";
    case ExperimentKind::MFA: return "mfa";
  }
  return "?";
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "table1") return ExperimentKind::Table1;
  if (name == "fa_histogram") return ExperimentKind::FAHistogram;
  if (name == "gmm") return ExperimentKind::GMM;
  if (name == "mfa") return ExperimentKind::MFA;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& experiment,
                         int trial) {
  return mix_seed(mix_seed(base_seed, experiment),
                  static_cast<std::uint64_t>(trial));
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig config;

  static const std::vector<std::string> known = {
      "experiment", "trials", "base_seed", "methods",
      "output_dir", "threads", "table1",    "fa_histogram",
      "gmm",        "mfa"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  config.experiment = experiment_from_name(j.at("experiment").get<std::string>());
  if (j.contains("trials")) config.trials = j.at("trials").get<int>();
  if (config.trials < 1) {
    throw std::invalid_argument("config: trials must be >= 1");
  }
  if (j.contains("base_seed")) {
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
  }
  if (j.contains("methods")) {
    config.methods = j.at("methods").get<std::vector<std::string>>();
  }
  if (j.contains("output_dir")) {
    config.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("threads")) config.threads = j.at("threads").get<int>();

  if (j.contains("table1")) {
    const json& t = j.at("table1");
    config.table1.cases.clear();
    for (const auto& c : t.at("cases")) {
      config.table1.cases.push_back(case_from_name(c.get<std::string>()));
    }
    config.table1.sample_sizes = t.at("sample_sizes").get<std::vector<int>>();
    config.table1.size_min = t.at("size_min").get<int>();
    config.table1.size_max = t.at("size_max").get<int>();
  }
  if (j.contains("fa_histogram")) {
    const json& t = j.at("fa_histogram");
    config.fa.sample_sizes = t.at("sample_sizes").get<std::vector<int>>();
    config.fa.k_min = t.at("k_min").get<int>();
    config.fa.k_max = t.at("k_max").get<int>();
    config.fa.k_init = t.at("k_init").get<int>();
    config.fa.folds = t.at("folds").get<int>();
  }
  if (j.contains("gmm")) {
    const json& t = j.at("gmm");
    config.gmm.run_spiral = t.at("run_spiral").get<bool>();
    config.gmm.run_triangle = t.at("run_triangle").get<bool>();
    config.gmm.spiral_n = t.at("spiral_n").get<int>();
    config.gmm.spiral_m_max = t.at("spiral_m_max").get<int>();
    config.gmm.spiral_noise_sd = t.at("spiral_noise_sd").get<double>();
    config.gmm.triangle_n = t.at("triangle_n").get<int>();
    config.gmm.triangle_m_max = t.at("triangle_m_max").get<int>();
    config.gmm.epsilon = t.at("epsilon").get<double>();
  }
  if (j.contains("mfa")) {
    const json& t = j.at("mfa");
    config.mfa.run_spiral = t.at("run_spiral").get<bool>();
    config.mfa.run_synthetic = t.at("run_synthetic").get<bool>();
    config.mfa.spiral_n = t.at("spiral_n").get<int>();
    config.mfa.spiral_noise_sd = t.at("spiral_noise_sd").get<double>();
    config.mfa.spiral_m_init = t.at("spiral_m_init").get<int>();
    config.mfa.spiral_k_init = t.at("spiral_k_init").get<int>();
    config.mfa.synthetic_n = t.at("synthetic_n").get<int>();
    config.mfa.synthetic_d = t.at("synthetic_d").get<int>();
    config.mfa.synthetic_m = t.at("synthetic_m").get<int>();
    config.mfa.synthetic_k = t.at("synthetic_k").get<std::vector<int>>();
    config.mfa.synthetic_separation =
        t.at("synthetic_separation").get<double>();
    config.mfa.synthetic_m_init = t.at("synthetic_m_init").get<int>();
    config.mfa.synthetic_k_init = t.at("synthetic_k_init").get<int>();
    config.mfa.epsilon = t.at("epsilon").get<double>();
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["experiment"] = experiment_name(config.experiment);
  j["trials"] = config.trials;
  j["base_seed"] = config.base_seed;
  j["methods"] = config.methods;
  j["output_dir"] = config.output_dir;
  j["threads"] = config.threads;

  json t1;
  t1["cases"] = json::array();
  for (DesignCase c : config.table1.cases) t1["cases"].push_back(case_name(c));
  t1["sample_sizes"] = config.table1.sample_sizes;
  t1["size_min"] = config.table1.size_min;
  t1["size_max"] = config.table1.size_max;
  j["table1"] = t1;

  json fa;
  fa["sample_sizes"] = config.fa.sample_sizes;
  fa["k_min"] = config.fa.k_min;
  fa["k_max"] = config.fa.k_max;
  fa["k_init"] = config.fa.k_init;
  fa["folds"] = config.fa.folds;
  j["fa_histogram"] = fa;

  json gm;
  gm["run_spiral"] = config.gmm.run_spiral;
  gm["run_triangle"] = config.gmm.run_triangle;
  gm["spiral_n"] = config.gmm.spiral_n;
  gm["spiral_m_max"] = config.gmm.spiral_m_max;
  gm["spiral_noise_sd"] = config.gmm.spiral_noise_sd;
  gm["triangle_n"] = config.gmm.triangle_n;
  gm["triangle_m_max"] = config.gmm.triangle_m_max;
  gm["epsilon"] = config.gmm.epsilon;
  j["gmm"] = gm;

  json mf;
  mf["run_spiral"] = config.mfa.run_spiral;
  mf["run_synthetic"] = config.mfa.run_synthetic;
  mf["spiral_n"] = config.mfa.spiral_n;
  mf["spiral_noise_sd"] = config.mfa.spiral_noise_sd;
  mf["spiral_m_init"] = config.mfa.spiral_m_init;
  mf["spiral_k_init"] = config.mfa.spiral_k_init;
  mf["synthetic_n"] = config.mfa.synthetic_n;
  mf["synthetic_d"] = config.mfa.synthetic_d;
  mf["synthetic_m"] = config.mfa.synthetic_m;
  mf["synthetic_k"] = config.mfa.synthetic_k;
  mf["synthetic_separation"] = config.mfa.synthetic_separation;
  mf["synthetic_m_init"] = config.mfa.synthetic_m_init;
  mf["synthetic_k_init"] = config.mfa.synthetic_k_init;
  mf["epsilon"] = config.mfa.epsilon;
  j["mfa"] = mf;
  return j.dump(2);
}

ExperimentOutput run_table1(const ExperimentConfig& config) {
  ExperimentOutput output;
  const std::string exp = experiment_name(ExperimentKind::Table1);
  const bool quick_on = method_enabled(config, "quick_bic");
  const bool exh_on = method_enabled(config, "bic_exhaustive");
  const bool al_on = method_enabled(config, "alasso_bic");

  for (DesignCase dc : config.table1.cases) {
    for (int n : config.table1.sample_sizes) {
      struct Cell {
        int quick = -1, exh = -1, al = -1;
        bool failed = false;
        std::vector<TrialReport> reports;
      };
      std::vector<Cell> cells(static_cast<std::size_t>(config.trials));

      parallel_trials(config.trials, config.threads, [&](int trial) {
        Cell& cell = cells[static_cast<std::size_t>(trial)];
        const std::uint64_t seed = trial_seed(config.base_seed, exp, trial);
        RegressionSample sample;
        try {
          sample = gen_regression(dc, n, seed);
        } catch (const std::exception& e) {
          cell.failed = true;
          TrialReport r;
          r.trial = trial;
          r.seed = seed;
          r.dataset = case_name(dc) + "_n" + std::to_string(n);
          r.method = "datagen";
          r.failed = true;
          r.error = e.what();
          cell.reports.push_back(r);
          return;
        }
        const auto run_method = [&](const std::string& method,
                                    const std::function<SelectionResult()>& fn,
                                    int& size_out) {
          TrialReport r;
          r.trial = trial;
          r.seed = seed;
          r.dataset = case_name(dc) + "_n" + std::to_string(n);
          r.method = method;
          const auto start = std::chrono::steady_clock::now();
          try {
            const SelectionResult res = fn();
            r.duration_ms = elapsed_ms(start);
            r.selected_size = res.selected_size();
            r.structure = std::to_string(res.selected_size());
            r.objective = res.objective;
            r.converged = res.converged;
            size_out = res.selected_size();
          } catch (const std::exception& e) {
            r.duration_ms = elapsed_ms(start);
            r.failed = true;
            r.error = e.what();
            cell.failed = true;
          }
          cell.reports.push_back(r);
        };

        if (quick_on) {
          run_method("quick_bic",
                     [&] {
                       return quick_ic_regression(sample.data, ICSpec::bic());
                     },
                     cell.quick);
        }
        if (exh_on) {
          run_method("bic_exhaustive",
                     [&] {
                       return exhaustive_ic_regression(
                           sample.data, ICSpec::bic(), config.table1.size_min,
                           config.table1.size_max);
                     },
                     cell.exh);
        }
        if (al_on) {
          run_method("alasso_bic",
                     [&] {
                       const ALassoPath path = alasso_path(sample.data);
                       return alasso_plus_ic(path, sample.data, ICSpec::bic());
                     },
                     cell.al);
        }
      });

      std::vector<int> d_exh_quick, d_exh_al, d_quick_al;
      for (const Cell& cell : cells) {
        for (const TrialReport& r : cell.reports) output.reports.push_back(r);
        if (cell.failed) continue;
        if (exh_on && quick_on) d_exh_quick.push_back(cell.exh - cell.quick);
        if (exh_on && al_on) d_exh_al.push_back(cell.exh - cell.al);
        if (quick_on && al_on) d_quick_al.push_back(cell.quick - cell.al);
      }
      const std::string prefix = case_name(dc) + "_n" + std::to_string(n);
      if (exh_on && quick_on) {
        output.tables.push_back(
            tabulate_diffs(prefix + "_bic_minus_quick", d_exh_quick, true));
      }
      if (exh_on && al_on) {
        output.tables.push_back(
            tabulate_diffs(prefix + "_bic_minus_alasso", d_exh_al, false));
      }
      if (quick_on && al_on) {
        output.tables.push_back(
            tabulate_diffs(prefix + "_quick_minus_alasso", d_quick_al, false));
      }
    }
  }
  return output;
}

ExperimentOutput run_fa_histogram(const ExperimentConfig& config) {
  ExperimentOutput output;
  const std::string exp = experiment_name(ExperimentKind::FAHistogram);
  const FAHistogramParams& params = config.fa;

  struct MethodSpec {
    std::string name;
    std::function<int(const Eigen::MatrixXd&, std::uint64_t)> select_k;
  };
  std::vector<MethodSpec> methods;
  if (method_enabled(config, "quick_bic")) {
    methods.push_back({"quick_bic", [&](const Eigen::MatrixXd& data,
                                        std::uint64_t seed) {
                         QuickBICFAOptions opts;
                         opts.em.seed = mix_seed(seed, "quick_bic");
                         const auto res = quick_bic_fa(data, params.k_init, opts);
                         return res.model.factors();
                       }});
  }
  if (method_enabled(config, "bic")) {
    methods.push_back({"bic", [&](const Eigen::MatrixXd& data,
                                  std::uint64_t seed) {
                         FAFitOptions opts;
                         opts.seed = mix_seed(seed, "bic");
                         return fa_ic_select(data, params.k_min, params.k_max,
                                             ICSpec::bic(), opts)
                             .k;
                       }});
  }
  if (method_enabled(config, "aic")) {
    methods.push_back({"aic", [&](const Eigen::MatrixXd& data,
                                  std::uint64_t seed) {
                         FAFitOptions opts;
                         opts.seed = mix_seed(seed, "aic");
                         return fa_ic_select(data, params.k_min, params.k_max,
                                             ICSpec::aic(), opts)
                             .k;
                       }});
  }
  if (method_enabled(config, "cv")) {
    methods.push_back({"cv", [&](const Eigen::MatrixXd& data,
                                 std::uint64_t seed) {
                         return fa_cv_select(data, params.k_min, params.k_max,
                                             params.folds,
                                             mix_seed(seed, "cv"))
                             .k;
                       }});
  }

  for (int n : params.sample_sizes) {
    std::vector<std::vector<TrialReport>> per_trial(
        static_cast<std::size_t>(config.trials));
    parallel_trials(config.trials, config.threads, [&](int trial) {
      const std::uint64_t seed = trial_seed(config.base_seed, exp, trial);
      const Eigen::MatrixXd data = gen_fa(n, seed).data;
      for (const MethodSpec& m : methods) {
        TrialReport r;
        r.trial = trial;
        r.seed = seed;
        r.dataset = "n" + std::to_string(n);
        r.method = m.name;
        const auto start = std::chrono::steady_clock::now();
        try {
          const int k = m.select_k(data, seed);
          r.duration_ms = elapsed_ms(start);
          r.selected_size = k;
          r.structure = "k=" + std::to_string(k);
        } catch (const std::exception& e) {
          r.duration_ms = elapsed_ms(start);
          r.failed = true;
          r.error = e.what();
        }
        per_trial[static_cast<std::size_t>(trial)].push_back(r);
      }
    });

    std::vector<TrialReport> flat;
    for (const auto& rs : per_trial) {
      for (const TrialReport& r : rs) flat.push_back(r);
    }
    output.reports.insert(output.reports.end(), flat.begin(), flat.end());

    for (const MethodSpec& m : methods) {
      std::map<int, int> hist;
      int ok = 0;
      for (const TrialReport& r : flat) {
        if (r.method == m.name && !r.failed) {
          hist[r.selected_size] += 1;
          ++ok;
        }
      }
      FrequencyTable table;
      table.name = "n" + std::to_string(n) + "_" + m.name;
      table.successful_trials = ok;
      for (const auto& [k, count] : hist) {
        table.buckets.emplace_back(std::to_string(k), count);
      }
      output.tables.push_back(table);
    }
  }
  return output;
}

ExperimentOutput run_gmm_experiment(const ExperimentConfig& config) {
  ExperimentOutput output;
  const std::string exp = experiment_name(ExperimentKind::GMM);
  const GMMParams& params = config.gmm;

  struct DatasetSpec {
    std::string name;
    int m_max;
    std::function<Eigen::MatrixXd(std::uint64_t)> make;
  };
  std::vector<DatasetSpec> datasets;
  if (params.run_spiral) {
    datasets.push_back({"spiral", params.spiral_m_max, [&](std::uint64_t s) {
                          return gen_spiral(params.spiral_n,
                                            params.spiral_noise_sd, s);
                        }});
  }
  if (params.run_triangle) {
    datasets.push_back({"triangle", params.triangle_m_max,
                        [&](std::uint64_t s) {
                          return gen_triangle(params.triangle_n, s).data;
                        }});
  }

  std::vector<std::string> trace_lines;
  std::mutex trace_mutex;

  for (const DatasetSpec& ds : datasets) {
    std::vector<TrialReport> reports(static_cast<std::size_t>(config.trials));
    std::map<int, int> hist;
    parallel_trials(config.trials, config.threads, [&](int trial) {
      const std::uint64_t seed = trial_seed(config.base_seed, exp, trial);
      TrialReport r;
      r.trial = trial;
      r.seed = seed;
      r.dataset = ds.name;
      r.method = "quick_mml";
      const auto start = std::chrono::steady_clock::now();
      try {
        const Eigen::MatrixXd data = ds.make(seed);
        QuickMMLOptions opts;
        opts.epsilon = params.epsilon;
        const QuickMMLGMMResult res =
            quick_mml_gmm(data, ds.m_max, mix_seed(seed, "gmm_fit"), opts);
        r.duration_ms = elapsed_ms(start);
        r.selected_size = res.model.components();
        r.structure = "m=" + std::to_string(res.model.components());
        r.objective = res.selection.objective;
        r.converged = res.selection.converged;

        const double loglik = gmm_loglik(data, res.model);
        const double mml = gmm_mml_length(
            res.model, static_cast<std::size_t>(data.rows()), loglik);
        r.structure += ";mml=" + std::to_string(mml);
        std::ostringstream lines;
        for (std::size_t i = 0; i < res.npl_trace.size(); ++i) {
          lines << ds.name << ',' << trial << ',' << i << ','
                << res.npl_trace[i] << '\n';
        }
        {
          std::lock_guard<std::mutex> lock(trace_mutex);
          trace_lines.push_back(lines.str());
        }
      } catch (const std::exception& e) {
        r.duration_ms = elapsed_ms(start);
        r.failed = true;
        r.error = e.what();
      }
      reports[static_cast<std::size_t>(trial)] = r;
    });

    int ok = 0;
    for (const TrialReport& r : reports) {
      output.reports.push_back(r);
      if (!r.failed) {
        hist[r.selected_size] += 1;
        ++ok;
      }
    }
    FrequencyTable table;
    table.name = ds.name + "_m";
    table.successful_trials = ok;
    for (const auto& [m, count] : hist) {
      table.buckets.emplace_back(std::to_string(m), count);
    }
    output.tables.push_back(table);
  }

  if (!trace_lines.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const auto path = std::filesystem::path(config.output_dir) /
                      "gmm_traces.csv";
    std::ofstream out(path);
    out << "dataset,trial,iteration,npl\n";
    for (const std::string& block : trace_lines) out << block;
    output.files.push_back("gmm_traces.csv");
  }
  return output;
}

ExperimentOutput run_mfa_experiment(const ExperimentConfig& config) {
  ExperimentOutput output;
  const std::string exp = experiment_name(ExperimentKind::MFA);
  const MFAParams& params = config.mfa;

  struct DatasetSpec {
    std::string name;
    int m_init;
    int k_init;
    std::function<Eigen::MatrixXd(std::uint64_t)> make;
  };
  std::vector<DatasetSpec> datasets;
  if (params.run_spiral) {
    datasets.push_back({"spiral", params.spiral_m_init, params.spiral_k_init,
                        [&](std::uint64_t s) {
                          return gen_spiral(params.spiral_n,
                                            params.spiral_noise_sd, s);
                        }});
  }
  if (params.run_synthetic) {
    datasets.push_back(
        {"synthetic", params.synthetic_m_init, params.synthetic_k_init,
         [&](std::uint64_t s) {
           return gen_mfa(params.synthetic_n, params.synthetic_d,
                          params.synthetic_m, params.synthetic_k,
                          params.synthetic_separation, s)
               .data;
         }});
  }

  for (const DatasetSpec& ds : datasets) {
    std::vector<TrialReport> reports(static_cast<std::size_t>(config.trials));
    std::atomic<int> analyzers_total{0};
    std::atomic<int> analyzers_k1{0};
    parallel_trials(config.trials, config.threads, [&](int trial) {
      const std::uint64_t seed = trial_seed(config.base_seed, exp, trial);
      TrialReport r;
      r.trial = trial;
      r.seed = seed;
      r.dataset = ds.name;
      r.method = "quick_mml";
      const auto start = std::chrono::steady_clock::now();
      try {
        const Eigen::MatrixXd data = ds.make(seed);
        QuickMMLMFAOptions opts;
        opts.epsilon = params.epsilon;
        const QuickMMLMFAResult res = quick_mml_mfa(
            data, ds.m_init, ds.k_init, mix_seed(seed, "mfa_fit"), opts);
        r.duration_ms = elapsed_ms(start);
        r.selected_size = res.model.count();
        std::ostringstream ks;
        ks << "m=" << res.model.count() << ";k={";
        std::vector<int> kvec = res.model.factor_counts();
        std::sort(kvec.begin(), kvec.end());
        for (std::size_t i = 0; i < kvec.size(); ++i) {
          if (i > 0) ks << '|';
          ks << kvec[static_cast<std::size_t>(i)];
          analyzers_total.fetch_add(1);
          if (kvec[static_cast<std::size_t>(i)] == 1) analyzers_k1.fetch_add(1);
        }
        ks << '}';
        r.structure = ks.str();
        r.objective = res.selection.objective;
        r.converged = res.selection.converged;
      } catch (const std::exception& e) {
        r.duration_ms = elapsed_ms(start);
        r.failed = true;
        r.error = e.what();
      }
      reports[static_cast<std::size_t>(trial)] = r;
    });

    std::map<int, int> hist;
    int ok = 0;
    for (const TrialReport& r : reports) {
      output.reports.push_back(r);
      if (!r.failed) {
        hist[r.selected_size] += 1;
        ++ok;
      }
    }
    FrequencyTable table;
    table.name = ds.name + "_m";
    table.successful_trials = ok;
    for (const auto& [m, count] : hist) {
      table.buckets.emplace_back(std::to_string(m), count);
    }
    output.tables.push_back(table);
    if (analyzers_total.load() > 0) {
      output.metrics.emplace_back(
          ds.name + "_k1_fraction",
          static_cast<double>(analyzers_k1.load()) /
              static_cast<double>(analyzers_total.load()));
    }
  }
  return output;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  ExperimentOutput output;
  switch (config.experiment) {
    case ExperimentKind::Table1:
      output = run_table1(config);
      break;
    case ExperimentKind::FAHistogram:
      output = run_fa_histogram(config);
      break;
    case ExperimentKind::GMM:
      output = run_gmm_experiment(config);
      break;
    case ExperimentKind::MFA:
      output = run_mfa_experiment(config);
      break;
  }

  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  const std::string exp = experiment_name(config.experiment);

  write_trial_csv(dir / (exp + "_trials.csv"), output.reports);
  output.files.push_back(exp + "_trials.csv");
  write_frequency_csv(dir / (exp + "_frequencies.csv"), output.tables);
  output.files.push_back(exp + "_frequencies.csv");

  json manifest;
  manifest["config"] = json::parse(config_to_json(config));
  manifest["library_version"] = "0.1.0";
  manifest["experiment"] = exp;
  manifest["timings"] = timing_summary(output.reports);
  int failed = 0;
  for (const TrialReport& r : output.reports) {
    if (r.failed) ++failed;
  }
  manifest["failed_method_runs"] = failed;
  manifest["files"] = output.files;
  json metrics = json::object();
  for (const auto& [k, v] : output.metrics) metrics[k] = v;
  manifest["metrics"] = metrics;
  std::ofstream mout(dir / "manifest.json");
  mout << manifest.dump(2) << '\n';
  output.files.push_back("manifest.json");
  return output;
}

}  // namespace quickic
