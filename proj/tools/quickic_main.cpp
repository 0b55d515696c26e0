// quickic: run the simulation studies, generate datasets, and summarize
// result directories.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quickic/datagen.hpp"
#include "quickic/experiments.hpp"

namespace {

using quickic::ExperimentConfig;
using quickic::ExperimentOutput;

int cmd_run(const std::string& config_path, int trials_override,
            std::int64_t seed_override, int threads_override,
            const std::string& out_override) {
  ExperimentConfig config = quickic::load_config_file(config_path);
  if (trials_override > 0) config.trials = trials_override;
  if (seed_override >= 0) {
    config.base_seed = static_cast<std::uint64_t>(seed_override);
  }
  if (threads_override > 0) config.threads = threads_override;
  if (!out_override.empty()) config.output_dir = out_override;

  const ExperimentOutput output = quickic::run_experiment(config);
  int failed = 0;
  for (const auto& r : output.reports) {
    if (r.failed) ++failed;
  }
  std::cout << "experiment: " << quickic::experiment_name(config.experiment)
            << "\ntrials: " << config.trials
            << "\nmethod runs: " << output.reports.size()
            << " (failed: " << failed << ")\noutput: " << config.output_dir
            << '\n';
  for (const auto& table : output.tables) {
    std::cout << "  " << table.name << ":";
    for (const auto& [bucket, count] : table.buckets) {
      std::cout << ' ' << bucket << '=' << count;
    }
    std::cout << '\n';
  }
  for (const auto& [name, value] : output.metrics) {
    std::cout << "  " << name << " = " << value << '\n';
  }
  return 0;
}

int cmd_gen(const std::string& dataset, int n, std::uint64_t seed,
            const std::string& out) {
  Eigen::MatrixXd data;
  if (dataset == "regression-i" || dataset == "regression-ii" ||
      dataset == "regression-iii") {
    const auto design = dataset == "regression-i"
                            ? quickic::DesignCase::I
                            : (dataset == "regression-ii"
                                   ? quickic::DesignCase::II
                                   : quickic::DesignCase::III);
    const auto sample = quickic::gen_regression(design, n, seed);
    data.resize(sample.data.X.rows(), sample.data.X.cols() + 1);
    data.leftCols(sample.data.X.cols()) = sample.data.X;
    data.rightCols(1) = sample.data.y;
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < sample.data.X.cols(); ++j) {
      header.push_back("x" + std::to_string(j + 1));
    }
    header.push_back("y");
    quickic::write_csv(out, data, header);
    return 0;
  }
  if (dataset == "fa") {
    data = quickic::gen_fa(n, seed).data;
  } else if (dataset == "spiral") {
    data = quickic::gen_spiral(n, 1.0, seed);
  } else if (dataset == "triangle") {
    data = quickic::gen_triangle(n, seed).data;
  } else if (dataset == "mfa") {
    data = quickic::gen_mfa(n, 6, 2, {2, 1}, 10.0, seed).data;
  } else {
    throw std::invalid_argument("unknown dataset: " + dataset);
  }
  quickic::write_csv(out, data);
  return 0;
}

int cmd_report(const std::string& results_dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(results_dir) / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error("no manifest.json in " + results_dir);
  }
  std::ifstream in(manifest_path);
  nlohmann::json manifest;
  in >> manifest;

  std::cout << "experiment: " << manifest.value("experiment", std::string("?"))
            << "\nlibrary:    "
            << manifest.value("library_version", std::string("?"))
            << "\nfailed method runs: "
            << manifest.value("failed_method_runs", 0) << "\n\ntimings:\n";
  for (const auto& [method, t] : manifest["timings"].items()) {
    std::cout << "  " << method << ": median "
              << t.value("median_ms", 0.0) << " ms over "
              << t.value("count", 0) << " runs\n";
  }

  const std::string exp = manifest.value("experiment", std::string());
  const fs::path freq_path =
      fs::path(results_dir) / (exp + "_frequencies.csv");
  if (fs::exists(freq_path)) {
    std::ifstream fin(freq_path);
    std::string line;
    std::getline(fin, line);  // header
    std::map<std::string, std::vector<std::string>> rows;
    while (std::getline(fin, line)) {
      const auto first = line.find(',');
      if (first == std::string::npos) continue;
      rows[line.substr(0, first)].push_back(line.substr(first + 1));
    }
    std::cout << "\nfrequency tables:\n";
    for (const auto& [table, entries] : rows) {
      std::cout << "  " << table << ":";
      for (const auto& e : entries) {
        const auto second = e.find(',');
        const auto third = e.find(',', second + 1);
        std::cout << ' ' << e.substr(0, second) << '='
                  << e.substr(second + 1, third - second - 1);
      }
      std::cout << '\n';
    }
  }
  if (manifest.contains("metrics")) {
    for (const auto& [k, v] : manifest["metrics"].items()) {
      std::cout << "  " << k << " = " << v << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quick-IC model selection experiments"};
  app.require_subcommand(1);

  std::string config_path;
  int trials_override = 0;
  std::int64_t seed_override = -1;
  int threads_override = 0;
  std::string out_override;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("config", config_path, "Path to the config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--trials", trials_override, "Override the trial count");
  run->add_option("--seed", seed_override, "Override the base seed");
  run->add_option("--threads", threads_override, "Override the worker count");
  run->add_option("--out", out_override, "Override the output directory");

  std::string dataset;
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "dataset.csv";
  auto* gen = app.add_subcommand("gen", "Generate a dataset as CSV");
  gen->add_option("dataset", dataset,
                  "regression-i|regression-ii|regression-iii|fa|spiral|"
                  "triangle|mfa")
      ->required();
  gen->add_option("--n", gen_n, "Number of observations")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV path");

  std::string results_dir;
  auto* report = app.add_subcommand("report", "Summarize a results directory");
  report->add_option("results", results_dir, "Results directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, trials_override, seed_override,
                     threads_override, out_override);
    }
    if (gen->parsed()) {
      return cmd_gen(dataset, gen_n, gen_seed, gen_out);
    }
    if (report->parsed()) {
      return cmd_report(results_dir);
    }
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
