#include "ers/kernels.hpp"

namespace ers::kernels {

void motion_sweep_serial(std::span<const MotionSlot> in, std::span<double> out,
                         double dt_s, const MotionParams& p) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = motion_step(in[i], dt_s, p);
  }
}

void thermal_sweep_serial(std::span<CoilSegment> segments,
                          std::span<const double> diss_kw, double ambient_c,
                          double decay, const CorridorParams& p) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    thermal_step(segments[i], diss_kw[i], ambient_c, decay, p);
  }
}

void battery_sweep_serial(std::span<const BatterySlot> slots,
                          const WearParams& w) {
  for (const auto& s : slots) battery_step(s, w);
}

void motion_sweep(ExecMode mode, std::span<const MotionSlot> in,
                  std::span<double> out, double dt_s, const MotionParams& p) {
  if (mode == ExecMode::OpenMP) {
    motion_sweep_omp(in, out, dt_s, p);
  } else {
    motion_sweep_serial(in, out, dt_s, p);
  }
}

void thermal_sweep(ExecMode mode, std::span<CoilSegment> segments,
                   std::span<const double> diss_kw, double ambient_c,
                   double decay, const CorridorParams& p) {
  if (mode == ExecMode::OpenMP) {
    thermal_sweep_omp(segments, diss_kw, ambient_c, decay, p);
  } else {
    thermal_sweep_serial(segments, diss_kw, ambient_c, decay, p);
  }
}

void battery_sweep(ExecMode mode, std::span<const BatterySlot> slots,
                   const WearParams& w) {
  if (mode == ExecMode::OpenMP) {
    battery_sweep_omp(slots, w);
  } else {
    battery_sweep_serial(slots, w);
  }
}

} // namespace ers::kernels
