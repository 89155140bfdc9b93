#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erl/config.hpp"
#include "erl/erl.hpp"
#include "erl/neural.hpp"

namespace erl {

inline constexpr std::string_view kVersion = "1.0.0";

// JSON config. An empty document yields the defaults; unknown keys are
// rejected with a ConfigError naming them.
ErlConfig load_config(const std::filesystem::path& path);
ErlConfig config_from_json(std::string_view text);
std::string config_to_json(const ErlConfig& cfg);
void save_config(const ErlConfig& cfg, const std::filesystem::path& path);

// Snapshot of named networks; values round-trip bit-exactly.
std::string snapshot_to_json(const std::vector<std::pair<std::string, const Parameters*>>& nets);
std::vector<std::pair<std::string, Parameters>> snapshot_from_json(std::string_view text);

struct RunManifest {
  ErlConfig config;  // before arm specialization
  Algorithm algorithm = Algorithm::erl;
  std::uint64_t seed = 0;
  std::string version{kVersion};
  std::string started_at;
  std::string finished_at;
  std::string status = "pending";
  std::string error;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(std::string_view text);

struct CurvePoint {
  std::size_t generation = 0;
  std::uint64_t cumulative_steps = 0;
  double champion_score = 0.0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

inline constexpr std::string_view kCurveHeader =
    "generation,cumulative_steps,champion_score,best_fitness,mean_fitness";

std::string format_curve_row(const CurvePoint& p);
std::vector<CurvePoint> read_curve(const std::filesystem::path& path);

// First cumulative step count at which the champion score reaches the
// threshold, or nullopt.
std::optional<std::uint64_t> steps_to_threshold(const std::vector<CurvePoint>& curve, double threshold);

struct RunResult {
  std::filesystem::path dir;
  RunManifest manifest;
  std::vector<CurvePoint> curve;
  SyncCounts sync;
};

using ProgressFn = std::function<void(const GenerationReport&)>;

// Runs one arm until config.step_budget cumulative steps (or until solved
// when stop_on_solve). Writes manifest.json, curve.csv, final_params.json
// and, for the erl and erl-ns arms, selection_rates.txt into `out_dir`.
// On failure the manifest records the error, partial outputs stay on disk,
// and the error is rethrown.
RunResult run_experiment(const RunManifest& manifest, const std::filesystem::path& out_dir,
                         const ProgressFn& progress = {});

RunResult load_run(const std::filesystem::path& dir);

struct ArmSummary {
  std::string arm;
  std::size_t seeds = 0;
  std::vector<std::optional<std::uint64_t>> steps_to_threshold;  // per seed
  std::optional<double> median_steps;                            // nullopt = unreached
  double final_mean = 0.0;
  double final_stddev = 0.0;
  double final_median = 0.0;
};

struct CheckpointStat {
  std::uint64_t steps = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t runs = 0;
};

struct Comparison {
  std::string env;
  double threshold = 0.0;
  std::vector<ArmSummary> arms;  // in first-seen order
};

// Groups runs by arm; throws InputError when runs disagree on the env.
Comparison compare_runs(const std::vector<std::filesystem::path>& dirs);
std::string format_comparison(const Comparison& c);

// Per-checkpoint mean and sample standard deviation of the champion score,
// taking each run's latest point at or before the checkpoint.
std::vector<CheckpointStat> aggregate_curves(const std::vector<std::vector<CurvePoint>>& curves,
                                             std::uint64_t interval);

double median(std::vector<double> values);

}  // namespace erl
