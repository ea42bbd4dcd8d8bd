#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/estimators.hpp"
#include "core/table.hpp"
#include "core/topology.hpp"
#include "json.hpp"

namespace nfloc {

struct SweepSettings {
  std::vector<double> side_lengths{4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<std::size_t> anchor_counts{5, 8, 12, 20, 40};
};

struct PowerCurveSettings {
  double min_distance = 0.3;  // m
  double max_distance = 30.0;
  int points = 100;  // log-spaced
  double alignment_quantile = 0.1;
  std::uint64_t alignment_samples = 1'000'000;
};

// Defaults describe the reference operating point: 12 anchors in a
// 10 m x 10 m x 3 m room with the tabulated received/noise powers.
struct ExperimentConfig {
  Room room;
  std::size_t anchor_count = 12;
  std::optional<std::vector<Anchor>> anchors;  // overrides the generator
  PhysicalParams params = PhysicalParams::reference();
  std::size_t trials = 1000;
  std::size_t noise_realizations = 1000;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::ML5D, Algorithm::ML3D, Algorithm::WLS,
                                    Algorithm::Cascade, Algorithm::Baseline};
  std::vector<Algorithm> multi_start_algorithms{Algorithm::WLS, Algorithm::Cascade};
  int init_count = 3;
  unsigned threads = 0;  // 0: hardware concurrency
  SolverOptions solver;
  double success_threshold = 0.1;  // m
  double condition_cap = 1e12;
  SweepSettings sweep;
  PowerCurveSettings power;

  AnchorTopology topology() const;
};

// Unknown keys and invalid values raise ErrorCode::Config.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct ExperimentResult {
  std::string kind;
  std::vector<std::pair<std::string, Table>> tables;  // file stem, records
  nlohmann::ordered_json summary;

  const Table& table(const std::string& stem) const;
};

// Runs fn(i) for i in [0, n) on `threads` workers (0: hardware concurrency).
// fn must only write to slot i of any shared output.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

double median(std::vector<double> values);

ExperimentResult run_topology(const ExperimentConfig& config);
ExperimentResult run_power_curve(const ExperimentConfig& config);
ExperimentResult run_peb_sweep(const ExperimentConfig& config);
ExperimentResult run_crlb_cdf(const ExperimentConfig& config);
ExperimentResult run_algo_compare(const ExperimentConfig& config);

// kind: topology | power-curve | peb-sweep | crlb-cdf | algo-compare
ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& config);

// Writes every table as <stem>.<csv|json>, plus summary.json and
// metadata.json (config echo, RNG algorithm). Output is byte-identical for
// identical config and seed.
std::vector<std::filesystem::path> write_result(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir,
                                                OutputFormat format);

}  // namespace nfloc
