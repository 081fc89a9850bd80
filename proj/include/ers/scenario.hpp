#pragma once

#include "ers/corridor.hpp"
#include "ers/econ.hpp"
#include "ers/ems.hpp"
#include "ers/traffic.hpp"
#include "ers/transfer.hpp"
#include "ers/v2i.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ers {

struct RoadConditionCfg {
  double ambient_mean_c = 25.0;
  double ambient_amplitude_c = 6.0;
  double ambient_peak_hour = 15.0;
  double friction = 0.8; // dry reference; (0, 1.2]
  bool precipitation = false;

  double ambient_c(double tod_s) const;
  /// Low friction caps achievable speed below the driver's target;
  /// precipitation caps the effective friction at a wet-road 0.6.
  double speed_factor() const;
};

struct CorridorCfg {
  double length_m = 0.0;
  CorridorParams params;
  RoadConditionCfg road;
};

struct TrafficCfg {
  std::string mode = "poisson"; // poisson | scripted
  ArrivalParams arrivals;
  MotionParams motion;
  double min_spawn_gap_m = 8.0;
  // scripted mode: a fixed platoon with identical draws
  std::string scripted_class = "taxi";
  double speed_kmh = 50.0;
  double scripted_offset_m = 0.0;
  double scripted_entry_soc = 0.50;
  double scripted_entry_time_s = 0.0;
  int scripted_count = 1;
  double scripted_spacing_s = 60.0;
};

struct V2GWindow {
  double start_h = 0.0;
  double end_h = 0.0;
};

struct EnergyCfg {
  double pv_area_m2 = 0.0;
  double pv_efficiency = 0.20;
  SolarParams solar;
  double grid_capacity_kw = 5000.0;
  double offpeak_start_h = 22.0;
  double offpeak_end_h = 6.0;
  int v2g_bus_count = 0;
  double v2g_per_bus_kw = 50.0;
  std::vector<V2GWindow> v2g_windows;
  BufferState buffer;
  bool shedding_enabled = true;
  GridParams grid;
};

struct V2ICfg {
  double latency_ms = 20.0;
  double zone_m = 500.0;
  double window_s = 60.0;
  AnomalyParams anomaly;
  std::string tariff_id = "std";
};

struct SimCfg {
  double duration_s = 0.0;
  int control_dt_ms = 100;
  std::uint64_t seed = 42;
  double start_hour = 0.0;
  int day_of_year = 80;
  std::string mode = "corridor"; // corridor | battery_profile
};

struct FaultSpec {
  std::string type; // fault | reset | efficiency | theft
  int segment = 0;
  double t_s = 0.0;
  double duration_s = 0.0;
  double factor = 1.0; // efficiency multiplier
  double kwh = 0.0;    // theft magnitude
};

struct InstrumentCfg {
  bool enabled = false;
  double start_m = 0.0;
  double end_m = 0.0;
};

struct BatteryProfileCfg {
  std::string profile = "static-fast-charge"; // or ers-dynamic
  DutyProfileParams params;
};

struct Scenario {
  CorridorCfg corridor;
  TrafficCfg traffic;
  TransferParams transfer;
  EnergyCfg energy;
  FinancialConfig econ;
  V2ICfg v2i;
  SimCfg sim;
  WearParams wear;
  BatteryProfileCfg battery;
  std::vector<FaultSpec> faults;
  InstrumentCfg instrument;

  std::vector<std::string> warnings;
  std::string digest; // sha256 of the parsed document, canonical form

  VehicleClassId scripted_class_id() const;
};

/// Parses and validates a scenario document (JSON). Unknown keys are errors;
/// physical impossibilities are errors; values outside the studied ranges
/// produce warnings. Throws SimError (PARSE_ERROR / MISSING_FIELD /
/// INVALID_VALUE).
Scenario load_scenario(const std::string& config_text);
Scenario scenario_from_json(const nlohmann::json& doc);

/// Names of shipped presets, and their scenario documents.
std::vector<std::string> preset_names();
std::string preset_document(const std::string& name); // throws INVALID_VALUE

} // namespace ers
