#pragma once

#include <utility>
#include <vector>

namespace ers {

/// Power-transfer model parameters. Peak power is the combined figure for all
/// coil rows at one position; coverage is the fraction of corridor length over
/// which a receiver is coupled to an energized span.
struct TransferParams {
  double peak_power_kw = 100.0;
  double coverage = 0.72;
  /// Piecewise-linear end-to-end transfer effectiveness vs speed, clamped to
  /// the endpoint values outside the node range.
  std::vector<std::pair<double, double>> eta_nodes = {
      {20.0, 0.625}, {45.0, 0.90}, {60.0, 0.90}, {70.0, 0.875}};
  /// Below this speed the coil duty-cycles transmission to bound thermal load.
  double duty_ref_kmh = 50.0;
  double misalign_cutoff_m = 0.3;
  double derate_start_c = 80.0;
  double derate_full_c = 100.0;
};

/// End-to-end transfer effectiveness at a given speed.
double coupling_efficiency(const TransferParams& p, double speed_kmh);

/// Thermal duty limiter: min(1, v / duty_ref); zero for a stopped vehicle.
double duty_factor(const TransferParams& p, double speed_kmh);

/// Quadratic falloff with lateral offset, zero at the cutoff.
double misalignment_factor(const TransferParams& p, double offset_m);

/// 1 below derate_start, linear to 0 at derate_full.
double thermal_derate(const TransferParams& p, double temp_c);

/// Instantaneous power actually transmitted by the coil toward one receiver.
double transmit_power_kw(const TransferParams& p, double speed_kmh,
                         double offset_m, double temp_c,
                         double receiver_limit_kw);

/// Instantaneous power arriving at the receiver (transmit x efficiency).
double delivered_power_kw(const TransferParams& p, double speed_kmh,
                          double offset_m, double temp_c,
                          double receiver_limit_kw);

/// Closed-form energy received over a steady, unobstructed traversal:
/// E = P_peak * coverage * eta(v) * duty(v) * (distance / v).
/// The calibration oracle for the full simulator. Throws ZERO_SPEED at v = 0.
double energy_per_distance_kwh(const TransferParams& p, double speed_kmh,
                               double distance_km);

} // namespace ers
