#pragma once

#include "ers/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ers {

/// The four vehicle classes the corridor serves.
enum class VehicleClassId : int { Bus = 0, Taxi = 1, DeliveryVan = 2, PrivateCar = 3 };
constexpr int kVehicleClassCount = 4;

inline const char* vehicle_class_name(VehicleClassId c) {
  switch (c) {
    case VehicleClassId::Bus: return "bus";
    case VehicleClassId::Taxi: return "taxi";
    case VehicleClassId::DeliveryVan: return "delivery_van";
    case VehicleClassId::PrivateCar: return "private_car";
  }
  return "?";
}

struct VehicleClassParams {
  double capacity_kwh = 50.0;
  double receiver_kw = 100.0;
  double consumption_kwh_km = 0.15;
  double speed_mean_kmh = 48.0;
  double speed_spread_kmh = 6.0;
  double pack_temp_c = 32.0;
};

/// Load-shedding priority: private cars are dropped first, buses last.
inline int shed_priority(VehicleClassId c) {
  switch (c) {
    case VehicleClassId::PrivateCar: return 0;
    case VehicleClassId::DeliveryVan: return 1;
    case VehicleClassId::Taxi: return 2;
    case VehicleClassId::Bus: return 3;
  }
  return 0;
}

struct ArrivalSpec {
  double t_s = 0.0;
  VehicleClassId cls = VehicleClassId::Taxi;
  double target_kmh = 50.0;
  double offset_m = 0.0;
  double entry_soc = 0.5;
};

struct ArrivalParams {
  double rate_veh_h = 600.0;
  std::array<double, kVehicleClassCount> mix = {0.05, 0.40, 0.20, 0.35};
  /// Optional 24 hourly multipliers (mean need not be 1; they scale rate_veh_h).
  std::vector<double> hourly_shape;
  double start_hour = 0.0;
  double speed_min_kmh = 20.0;
  double speed_max_kmh = 70.0;
  double offset_sigma_m = 0.08;
  double offset_trunc_m = 0.3;
  double entry_soc_min = 0.30;
  double entry_soc_max = 0.90;
  std::array<VehicleClassParams, kVehicleClassCount> classes{};
};

/// Poisson arrivals via unit-rate marks inverted through the cumulative rate
/// function, so a rate change rescales arrival times without reshuffling
/// per-vehicle draws (common-random-numbers discipline).
/// Throws INVALID_MIX when the class mix does not sum to 1 (1e-9 tolerance).
std::vector<ArrivalSpec> generate_arrivals(const ArrivalParams& p,
                                           double duration_s,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Battery model

struct WearParams {
  /// Stress per half-cycle: f0 * depth^alpha * 2^((T-25)/10).
  /// f0 is calibrated so the two reference duty profiles land on the target
  /// service lives (see docs/battery_calibration.md), then frozen here.
  double f0 = 3.3466e-5;
  double alpha = 1.1;
  double deep_discharge_soc = 0.30;
  double taper_start_soc = 0.85;
  double ceiling_soc = 0.90;
};

struct BatteryState {
  double soc = 0.5;
  double temp_c = 25.0;
  double health = 1.0;
  double efc = 0.0;
  std::int64_t deep_discharges = 0;
  double throughput_kwh = 0.0;
  double stress = 0.0;

  // Streaming excursion tracker (rainflow-lite): open discharge excursions
  // close at the first upward reversal.
  double prev_soc = 0.5;
  double excursion_peak_soc = 0.5;
  int direction = 0; // -1 discharging, +1 charging, 0 fresh
};

inline void battery_init(BatteryState& b, double soc) {
  b.soc = soc;
  b.prev_soc = soc;
  b.excursion_peak_soc = soc;
  b.direction = 0;
}

/// Instantaneous charge-acceptance factor: 1 below the taper knee, linear to
/// zero at the SoC ceiling.
double charge_acceptance(double soc, const WearParams& w);

/// Adds energy to the pack respecting the taper (exact exponential integral
/// through the taper band) and the hard ceiling. Returns accepted kWh; the
/// rest is overflow. Throws NEGATIVE_ENERGY.
double apply_charge(BatteryState& b, double capacity_kwh, double energy_kwh,
                    double charge_power_kw, const WearParams& w);

/// Feeds one SoC observation to the streaming wear tracker: counts deep
/// discharges, accumulates EFC/throughput on downward movement, and closes a
/// stress half-cycle on upward reversal. temp_c weights the stress term.
void wear_observe(BatteryState& b, double new_soc, double capacity_kwh,
                  double temp_c, const WearParams& w);

/// Closes any open discharge excursion (end of trace / end of service day).
void wear_flush(BatteryState& b, double temp_c, const WearParams& w);

/// Batch wear update over a time-ordered SoC trace at a mean temperature, per
/// the rainflow-lite rule: each contiguous discharge excursion is one
/// half-cycle of its depth. Open excursions at trace end are counted.
void update_battery_wear(BatteryState& b, std::span<const double> soc_trace,
                         double capacity_kwh, double mean_temp_c,
                         const WearParams& w);

// ---------------------------------------------------------------------------
// Reference duty profiles and life estimation

struct DutyProfileParams {
  double capacity_kwh = 50.0;
  double consumption_kwh_km = 0.15;
  double daily_km = 198.2;
  double pack_temp_c = 47.5;
  // static-fast-charge: drive until the trigger, then fast-charge to the top.
  double charge_trigger_soc = 0.20;
  double charge_to_soc = 0.90;
  // ers-dynamic: in-motion charging holds SoC in [band_low, band_high] except
  // for scheduled off-corridor trips that dip to deep_floor_soc.
  double band_low_soc = 0.45;
  double band_high_soc = 0.75;
  double deep_floor_soc = 0.25;
  double deep_trips_per_year = 125.0;
  double end_of_life_health = 0.80;
  double calendar_cap_years = 15.0;
};

struct LifeEstimate {
  double years = 0.0;
  double deep_discharges_per_year = 0.0;
  double efc_per_year = 0.0;
  double final_health = 1.0;
  bool calendar_capped = false;
};

/// Reference profile defaults matching the shipped presets.
DutyProfileParams static_fast_charge_profile();
DutyProfileParams ers_dynamic_profile();

/// Simulates daily operation until health reaches end-of-life (or the
/// calendar cap). profile_id: "static-fast-charge" | "ers-dynamic".
/// Throws UNKNOWN_PROFILE.
LifeEstimate estimate_battery_life(const std::string& profile_id,
                                   const WearParams& w);
LifeEstimate estimate_battery_life(const DutyProfileParams& p, bool ers_style,
                                   const WearParams& w);

/// Life estimate from an externally simulated one-day SoC trace repeated
/// until end of life.
LifeEstimate estimate_battery_life_from_daily_trace(
    std::span<const double> day_trace, double capacity_kwh, double temp_c,
    const WearParams& w);

// ---------------------------------------------------------------------------
// Longitudinal motion

struct MotionParams {
  double headway_s = 1.5;
  double accel_ms2 = 2.0;
  double speed_factor = 1.0; // road-condition scaling of target speed
};

struct VehicleMotion {
  double pos_m = 0.0;
  double speed_kmh = 0.0;
  double target_kmh = 50.0;
};

/// Speed moves toward min(target, gap/headway); deceleration to the headway
/// limit is immediate, acceleration is rate-limited. Position integrates the
/// new speed over dt.
void advance_vehicle(VehicleMotion& v, double dt_s, double gap_m,
                     double leader_speed_kmh, const MotionParams& p);

} // namespace ers
