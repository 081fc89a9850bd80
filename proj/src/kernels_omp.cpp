#include "ers/kernels.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ers::kernels {

bool openmp_available() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

// Each iteration writes only its own slot, so scheduling and thread count
// cannot change the result.

void motion_sweep_omp(std::span<const MotionSlot> in, std::span<double> out,
                      double dt_s, const MotionParams& p) {
#if defined(_OPENMP)
  const std::int64_t n = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        motion_step(in[static_cast<std::size_t>(i)], dt_s, p);
  }
#else
  motion_sweep_serial(in, out, dt_s, p);
#endif
}

void thermal_sweep_omp(std::span<CoilSegment> segments,
                       std::span<const double> diss_kw, double ambient_c,
                       double decay, const CorridorParams& p) {
#if defined(_OPENMP)
  const std::int64_t n = static_cast<std::int64_t>(segments.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    thermal_step(segments[static_cast<std::size_t>(i)],
                 diss_kw[static_cast<std::size_t>(i)], ambient_c, decay, p);
  }
#else
  thermal_sweep_serial(segments, diss_kw, ambient_c, decay, p);
#endif
}

void battery_sweep_omp(std::span<const BatterySlot> slots, const WearParams& w) {
#if defined(_OPENMP)
  const std::int64_t n = static_cast<std::int64_t>(slots.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    battery_step(slots[static_cast<std::size_t>(i)], w);
  }
#else
  battery_sweep_serial(slots, w);
#endif
}

} // namespace ers::kernels
