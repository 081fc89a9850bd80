#pragma once

#include "ers/engine.hpp"

#include <json.hpp>

#include <string>

namespace ers {

/// summary.json content, nested by module.
nlohmann::ordered_json build_summary(const Scenario& sc,
                                     const SimulationResult& r);

/// Writes the full result file set into out_dir (created if needed):
/// summary.json, timeseries.csv, vehicles.csv, segments.csv, ledger.jsonl,
/// alerts.csv. Battery-profile runs write summary.json only.
void write_outputs(const Scenario& sc, const SimulationResult& r,
                   const std::string& out_dir);

/// Human-readable text summary rendered from a results directory. Read-only.
std::string render_report(const std::string& results_dir);

/// Fixed-format CSV cell helpers (stable across platforms for equal bits).
std::string fmt_fixed(double v, int decimals);

} // namespace ers
