#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quickic/datagen.hpp"

namespace quickic {

enum class ExperimentKind { Table1, FAHistogram, GMM, MFA };

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct Table1Params {
  std::vector<DesignCase> cases = {DesignCase::I, DesignCase::II,
                                   DesignCase::III};
  std::vector<int> sample_sizes = {100, 300};
  int size_min = 4;
  int size_max = 8;
};

struct FAHistogramParams {
  std::vector<int> sample_sizes = {40, 100};
  int k_min = 3;
  int k_max = 7;
  int k_init = 8;
  int folds = 5;
};

struct GMMParams {
  bool run_spiral = true;
  bool run_triangle = true;
  int spiral_n = 900;
  int spiral_m_max = 30;
  double spiral_noise_sd = 1.0;
  int triangle_n = 600;
  int triangle_m_max = 20;
  double epsilon = 1e-3;
};

struct MFAParams {
  bool run_spiral = true;
  bool run_synthetic = true;
  int spiral_n = 900;
  double spiral_noise_sd = 1.0;
  int spiral_m_init = 30;
  int spiral_k_init = 3;
  int synthetic_n = 3000;
  int synthetic_d = 6;
  int synthetic_m = 2;
  std::vector<int> synthetic_k = {2, 1};
  double synthetic_separation = 10.0;
  int synthetic_m_init = 6;
  int synthetic_k_init = 3;
  double epsilon = 1e-3;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Table1;
  int trials = 100;
  std::uint64_t base_seed = 20260801;
  std::vector<std::string> methods;  // empty = experiment defaults
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
  Table1Params table1;
  FAHistogramParams fa;
  GMMParams gmm;
  MFAParams mfa;
};

/// Parses a JSON config; unknown keys are rejected so that configs
/// round-trip losslessly.
ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// One record per (trial, method).
struct TrialReport {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string dataset;
  std::string method;
  std::string structure;  // selected support size / k / m / k-multiset
  int selected_size = 0;
  double objective = 0.0;
  double duration_ms = 0.0;
  bool converged = true;
  bool failed = false;
  std::string error;
};

struct FrequencyTable {
  std::string name;
  std::vector<std::pair<std::string, int>> buckets;
  int successful_trials = 0;
};

struct ExperimentOutput {
  std::vector<TrialReport> reports;
  std::vector<FrequencyTable> tables;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> files;  // emitted, relative to output_dir
};

/// Deterministic per-trial seed derived from the base seed and experiment.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& experiment,
                         int trial);

ExperimentOutput run_table1(const ExperimentConfig& config);
ExperimentOutput run_fa_histogram(const ExperimentConfig& config);
ExperimentOutput run_gmm_experiment(const ExperimentConfig& config);
ExperimentOutput run_mfa_experiment(const ExperimentConfig& config);

/// Dispatches on config.experiment, writes all CSV outputs plus the JSON run
/// manifest under config.output_dir, and returns the in-memory results.
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace quickic
