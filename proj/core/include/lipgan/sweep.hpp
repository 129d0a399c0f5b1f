#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipgan/train.hpp"

namespace lipgan {

enum class SweepAxis { NTrain, GenWidth, GenDepth, DiscWidth, DiscDepth };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view s);

/// One capacity or sample-size sweep: the base config with one axis varied,
/// `repeats` seeds per axis value (base.seed .. base.seed + repeats - 1).
struct SweepSpec {
  TrainConfig base;
  SweepAxis axis = SweepAxis::NTrain;
  std::vector<double> values;  // strictly increasing
  int repeats = 6;
  std::filesystem::path output_dir;
  std::string label;           // legend entry in plots; defaults to base.experiment_id

  void validate() const;
  /// The base config with the axis set to `value` and the given seed.
  TrainConfig cell_config(double value, std::uint64_t seed) const;
};

struct SweepRun {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  double final_w1 = 0.0;
  double initial_w1 = 0.0;
  std::string error;
};

struct SweepPoint {
  double axis_value = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(count); 0 for a single run
  double initial_mean = 0.0;
  std::size_t count = 0;
  std::size_t failed = 0;
  bool degraded = false;  // at least half of the cell's runs failed
};

struct SweepResult {
  std::string label;
  SweepAxis axis = SweepAxis::NTrain;
  std::vector<SweepRun> runs;      // |values| x repeats, ordered by value then seed
  std::vector<SweepPoint> points;  // one per axis value
  bool degraded = false;
  std::size_t trained = 0;         // runs actually executed (skipped cells excluded)
};

struct SweepOptions {
  /// Worker threads; 0 = hardware_concurrency - 1 (at least 1).
  unsigned threads = 0;
  std::function<void(const SweepRun&)> on_run;
};

/// Trains every (axis value, seed) cell not already completed in
/// output_dir, writes per-cell files (config.json, log.csv, w1.csv,
/// result.json) under output_dir/cells/, then writes aggregate.csv and
/// runs.csv. A failed run is recorded with status "failed"; the sweep continues.
/// `data_for` supplies the real data for a cell config (defaults to the swiss roll).
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options = {},
                      std::function<RealData(const TrainConfig&)> data_for = {});

/// Aggregates per-seed runs into per-value points.
std::vector<SweepPoint> aggregate_runs(const std::vector<SweepRun>& runs);

/// Reads runs.csv / sweep.json from a completed sweep directory.
SweepResult load_sweep_result(const std::filesystem::path& dir);

}  // namespace lipgan
