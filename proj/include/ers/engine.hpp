#pragma once

#include "ers/kernels.hpp"
#include "ers/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ers {

/// One control interval of the run timeseries. Power figures are interval
/// averages; t_s is the interval start.
struct TimePoint {
  double t_s = 0.0;
  double demand_kw = 0.0;
  double solar_kw = 0.0;
  double buffer_kw = 0.0;
  double grid_offpeak_kw = 0.0;
  double grid_peak_kw = 0.0;
  double v2g_kw = 0.0;
  double deficit_kw = 0.0;
  double freq_dev_pct = 0.0;
  double volt_dev_pct = 0.0;
  double shed_kw = 0.0;
  double curtailed_kw = 0.0;
  // Not serialized; kept for the conservation identity.
  double solar_to_buffer_kw = 0.0;
  double standby_kw = 0.0;
};

struct VehicleRecord {
  int id = 0;
  VehicleClassId cls = VehicleClassId::Taxi;
  double entry_s = 0.0;
  double exit_s = -1.0; // -1: still on the road at end of run
  double mean_speed_kmh = 0.0;
  double tic_s = 0.0;
  double kwh_received = 0.0;
  double soc_in = 0.0;
  double soc_out = 0.0;
  std::int64_t deep_discharges = 0;
};

struct SegmentRecord {
  int index = 0;
  double position_m = 0.0;
  std::int64_t activations = 0;
  double kwh_tx = 0.0;
  double kwh_delivered = 0.0;
  double peak_temp_c = 0.0;
  std::int64_t fault_count = 0;
  double standby_kwh = 0.0;
};

struct RunAggregates {
  // engine
  std::int64_t steps = 0;
  std::int64_t events = 0;
  double max_balance_rel_err = 0.0;
  // corridor
  int segment_count = 0;
  std::int64_t activations = 0;
  double worst_activation_latency_ms = 0.0;
  double kwh_tx = 0.0;
  double kwh_delivered = 0.0;
  double standby_kwh = 0.0;
  double peak_temp_c = 0.0;
  std::int64_t fault_count = 0;
  // traffic
  std::int64_t vehicles_entered = 0;
  std::int64_t vehicles_completed = 0;
  double vehicle_km = 0.0;
  double kwh_received = 0.0;
  double battery_overflow_kwh = 0.0;
  std::int64_t deep_discharges = 0;
  double mean_speed_kmh = 0.0;
  std::int64_t sessions_denied = 0;
  double fleet_consumption_kwh_km = 0.0; // vehicle-km weighted
  // instrumented window
  bool instrumented = false;
  double instr_window_m = 0.0;
  std::int64_t instr_vehicles = 0;
  double instr_kwh_mean = 0.0;
  double instr_e_per_2km_kwh = 0.0;
  // v2i
  std::int64_t sessions_opened = 0;
  std::int64_t sessions_closed = 0;
  std::int64_t ledger_entries = 0;
  double billed_kwh = 0.0;
  std::int64_t alerts_unauthorized = 0;
  std::int64_t alerts_mismatch = 0;
  std::int64_t alerts_maintenance = 0;
  // ems (energies over the run, kWh)
  double demand_kwh = 0.0;
  double solar_used_kwh = 0.0; // serving demand
  double solar_to_buffer_kwh = 0.0;
  double buffer_out_kwh = 0.0;
  double grid_offpeak_kwh = 0.0;
  double grid_peak_kwh = 0.0;
  double v2g_kwh = 0.0;
  double deficit_kwh = 0.0;
  double curtailed_kwh = 0.0;
  double shed_kwh = 0.0;
  std::int64_t shed_events = 0;
  std::int64_t shed_alarms = 0;
  double max_abs_freq_dev_pct = 0.0;
  double max_abs_volt_dev_pct = 0.0;
  double solar_share = 0.0; // (solar + buffer) / served
  double v2g_share = 0.0;
  double forecast_accuracy_pct = -1.0; // <0: undefined (run shorter than 48 h)
  // battery-profile mode
  bool battery_mode = false;
  LifeEstimate life;
  // econ
  FinancialReport fin;
};

struct RunOptions {
  ExecMode kernel_mode = ExecMode::OpenMP;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::vector<TimePoint> timeseries;
  std::vector<VehicleRecord> vehicles;
  std::vector<SegmentRecord> segments;
  Ledger ledger;
  std::vector<Alert> alerts;
  RunAggregates agg;
  std::vector<std::string> warnings;
  std::string scenario_digest;
};

/// Runs one scenario to completion. Deterministic: identical (scenario, seed)
/// pairs produce bit-identical results regardless of kernel mode.
SimulationResult run(const Scenario& scenario, std::uint64_t seed,
                     const RunOptions& opts = {});

/// Convenience: seed taken from the scenario.
inline SimulationResult run(const Scenario& scenario, const RunOptions& opts = {}) {
  return run(scenario, scenario.sim.seed, opts);
}

} // namespace ers
