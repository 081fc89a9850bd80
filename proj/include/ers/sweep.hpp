#pragma once

#include "ers/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ers {

struct SweepSpec {
  std::string param_path;     // dotted key into the scenario document
  std::vector<double> values; // explicit list or expanded start:stop:step
  int replicates = 1;
  std::uint64_t seed_base = 42;
};

/// "20:70:5" (inclusive endpoints) or "20,25,30". Throws INVALID_VALUE.
std::vector<double> parse_sweep_values(const std::string& text);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::int64_t vehicles = 0;
  double kwh_received = 0.0;
  double e_per_2km_kwh = 0.0; // 0 when the scenario is not instrumented
  double solar_share = 0.0;
  double v2g_share = 0.0;
  double max_abs_freq_dev_pct = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string combined_csv_path;
};

/// Runs the sweep: one isolated subdirectory per (value, replicate), combined
/// into sweep.csv afterwards. Points run concurrently (capped by the
/// ERS_SIM_THREADS environment variable); runs share nothing mutable.
/// When the swept parameter is traffic.speed_kmh, efficiency_curve.csv with
/// the closed-form transfer model is emitted alongside.
SweepResult run_sweep(const nlohmann::json& base_doc, const SweepSpec& spec,
                      const std::string& out_dir,
                      ExecMode kernel_mode = ExecMode::OpenMP);

} // namespace ers
