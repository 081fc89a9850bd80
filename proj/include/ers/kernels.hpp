#pragma once

#include "ers/corridor.hpp"
#include "ers/traffic.hpp"

#include <span>
#include <vector>

namespace ers {

/// Kernel execution mode. Both paths run the identical per-entity step
/// functions below and write only entity-local state, so results are
/// bit-identical regardless of mode or thread count; the serial path is the
/// reference the OpenMP path is tested against.
enum class ExecMode { Serial, OpenMP };

namespace kernels {

/// One vehicle's motion inputs for a control step.
struct MotionSlot {
  double speed_kmh = 0.0;
  double target_kmh = 0.0;
  double gap_m = 0.0; // to the leader at step start; <0 means free road
};

/// Per-entity step: the headway/acceleration rule. Returns the new speed.
inline double motion_step(const MotionSlot& s, double dt_s,
                          const MotionParams& p) {
  VehicleMotion m{0.0, s.speed_kmh, s.target_kmh};
  double gap = s.gap_m < 0.0 ? 1e9 : s.gap_m;
  advance_vehicle(m, dt_s, gap, 0.0, p);
  return m.speed_kmh;
}

/// Per-entity step: exact first-order thermal response plus latches. decay is
/// exp(-dt/tau), hoisted by the caller. Idle segments settled at ambient are
/// snapped there (within 5 mK) so the relaxation tail does not burn cycles.
inline void thermal_step(CoilSegment& seg, double diss_kw, double ambient_c,
                         double decay, const CorridorParams& p) {
  if (diss_kw == 0.0 && !seg.power_cutoff &&
      seg.state != SegmentState::Derated &&
      std::abs(seg.temp_c - ambient_c) <= 5e-3) {
    seg.temp_c = ambient_c;
    return;
  }
  update_thermal_decayed(seg, diss_kw, ambient_c, decay, p);
}

struct BatterySlot {
  BatteryState* batt = nullptr;
  double new_soc = 0.0;
  double temp_c = 25.0;
  double capacity_kwh = 1.0;
};

inline void battery_step(const BatterySlot& s, const WearParams& w) {
  wear_observe(*s.batt, s.new_soc, s.capacity_kwh, s.temp_c, w);
}

// Serial reference drivers.
void motion_sweep_serial(std::span<const MotionSlot> in, std::span<double> out,
                         double dt_s, const MotionParams& p);
void thermal_sweep_serial(std::span<CoilSegment> segments,
                          std::span<const double> diss_kw, double ambient_c,
                          double decay, const CorridorParams& p);
void battery_sweep_serial(std::span<const BatterySlot> slots,
                          const WearParams& w);

// OpenMP drivers (fall back to serial when built without OpenMP).
void motion_sweep_omp(std::span<const MotionSlot> in, std::span<double> out,
                      double dt_s, const MotionParams& p);
void thermal_sweep_omp(std::span<CoilSegment> segments,
                       std::span<const double> diss_kw, double ambient_c,
                       double decay, const CorridorParams& p);
void battery_sweep_omp(std::span<const BatterySlot> slots, const WearParams& w);

// Mode dispatch.
void motion_sweep(ExecMode mode, std::span<const MotionSlot> in,
                  std::span<double> out, double dt_s, const MotionParams& p);
void thermal_sweep(ExecMode mode, std::span<CoilSegment> segments,
                   std::span<const double> diss_kw, double ambient_c,
                   double decay, const CorridorParams& p);
void battery_sweep(ExecMode mode, std::span<const BatterySlot> slots,
                   const WearParams& w);

bool openmp_available();

} // namespace kernels
} // namespace ers
