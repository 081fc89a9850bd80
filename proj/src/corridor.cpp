#include "ers/corridor.hpp"

#include "ers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ers {

std::vector<CoilSegment> build_corridor(double length_m, const CorridorParams& p,
                                        double effective_coverage,
                                        double initial_temp_c) {
  if (length_m < 0.0 || p.pitch_m <= 0.0 || p.coil_len_m < 0.0) {
    throw SimError(ErrorCode::InvalidGeometry, "negative or zero geometry");
  }
  if (p.coil_len_m > p.pitch_m) {
    throw SimError(ErrorCode::InvalidGeometry, "coil length exceeds pitch");
  }
  if (p.rows != 1 && p.rows != 2) {
    throw SimError(ErrorCode::InvalidGeometry, "row count must be 1 or 2");
  }
  if (effective_coverage < 0.0 || effective_coverage > 1.0) {
    throw SimError(ErrorCode::InvalidGeometry, "coverage outside (0, 1]");
  }

  double geo = std::min(1.0, p.rows * p.coil_len_m / p.pitch_m);
  double cov = effective_coverage > 0.0 ? effective_coverage : geo;
  int count = static_cast<int>(std::floor(length_m / p.pitch_m));

  std::vector<CoilSegment> segments;
  segments.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    CoilSegment s;
    s.index = k;
    s.start_m = k * p.pitch_m;
    s.span_m = cov * p.pitch_m;
    s.rows = p.rows;
    s.geometric_coverage = geo;
    s.temp_c = initial_temp_c;
    s.peak_temp_c = initial_temp_c;
    segments.push_back(s);
  }
  return segments;
}

bool segment_apply(CoilSegment& seg, SegmentInput input, double now_s,
                   const CorridorParams& p) {
  SegmentState before = seg.state;
  switch (seg.state) {
    case SegmentState::Idle:
      if (input == SegmentInput::Detection) {
        seg.state = SegmentState::Armed;
        seg.ramp_elapsed_ms = 0.0;
        seg.armed_at_s = now_s;
      } else if (input == SegmentInput::FaultInjected) {
        seg.state = SegmentState::Fault;
        seg.fault_count += 1;
      }
      break;
    case SegmentState::Armed:
      if (input == SegmentInput::Shed) {
        // Activation gating while the shed controller is over budget.
        seg.state = SegmentState::Idle;
        seg.armed_at_s = -1.0;
      } else if (input == SegmentInput::RampElapsed) {
        seg.state = SegmentState::Active;
        seg.activations += 1;
        seg.hold_remaining_ms = p.hold_ms;
        if (seg.armed_at_s >= 0.0) {
          double latency_ms = (now_s - seg.armed_at_s) * 1000.0;
          seg.worst_activation_latency_ms =
              std::max(seg.worst_activation_latency_ms, latency_ms);
        }
      } else if (input == SegmentInput::FaultInjected) {
        seg.state = SegmentState::Fault;
        seg.fault_count += 1;
      }
      break;
    case SegmentState::Active:
      if (input == SegmentInput::HoldElapsed || input == SegmentInput::Shed) {
        seg.state = SegmentState::Idle;
        seg.armed_at_s = -1.0;
      } else if (input == SegmentInput::TempHigh) {
        seg.state = SegmentState::Derated;
      } else if (input == SegmentInput::FaultInjected) {
        seg.state = SegmentState::Fault;
        seg.fault_count += 1;
      }
      break;
    case SegmentState::Derated:
      if (input == SegmentInput::HoldElapsed || input == SegmentInput::Shed) {
        seg.state = SegmentState::Idle;
        seg.armed_at_s = -1.0;
      } else if (input == SegmentInput::TempRecovered) {
        seg.state = SegmentState::Active;
      } else if (input == SegmentInput::FaultInjected) {
        seg.state = SegmentState::Fault;
        seg.fault_count += 1;
      }
      break;
    case SegmentState::Fault:
      if (input == SegmentInput::MaintenanceReset) {
        seg.state = SegmentState::Idle;
        seg.armed_at_s = -1.0;
        seg.power_cutoff = false;
      }
      break;
  }
  return seg.state != before;
}

void step_segment(CoilSegment& seg, bool detection, double dt_ms, double now_s,
                  const CorridorParams& p) {
  seg.occupied = detection;
  if (seg.state == SegmentState::Idle) {
    if (detection) {
      segment_apply(seg, SegmentInput::Detection, now_s, p);
      // fall through so the ramp timer starts accruing this step
    } else {
      seg.standby_kwh += p.standby_w / 1000.0 * (dt_ms / 3600.0e3);
      return;
    }
  }
  if (seg.state == SegmentState::Armed) {
    seg.ramp_elapsed_ms += dt_ms;
    if (seg.ramp_elapsed_ms >= p.ramp_ms) {
      double fired_at = now_s + dt_ms / 1000.0 -
                        (seg.ramp_elapsed_ms - p.ramp_ms) / 1000.0;
      segment_apply(seg, SegmentInput::RampElapsed, fired_at, p);
    }
    return;
  }
  if (seg.state == SegmentState::Active || seg.state == SegmentState::Derated) {
    if (detection) {
      seg.hold_remaining_ms = p.hold_ms;
    } else {
      seg.hold_remaining_ms -= dt_ms;
      if (seg.hold_remaining_ms <= 0.0) {
        double fired_at =
            now_s + dt_ms / 1000.0 + seg.hold_remaining_ms / 1000.0;
        segment_apply(seg, SegmentInput::HoldElapsed, fired_at, p);
      }
    }
  }
}

double update_thermal(CoilSegment& seg, double p_dissipated_kw, double ambient_c,
                      double dt_s, const CorridorParams& p) {
  return update_thermal_decayed(seg, p_dissipated_kw, ambient_c,
                                std::exp(-dt_s / p.tau_s), p);
}

double update_thermal_decayed(CoilSegment& seg, double p_dissipated_kw,
                              double ambient_c, double decay,
                              const CorridorParams& p) {
  double target = ambient_c + p_dissipated_kw * p.r_th_c_per_kw;
  seg.temp_c = target + (seg.temp_c - target) * decay;
  seg.peak_temp_c = std::max(seg.peak_temp_c, seg.temp_c);

  if (seg.temp_c >= p.cutoff_c) {
    seg.power_cutoff = true;
  } else if (seg.power_cutoff && seg.temp_c < p.cutoff_clear_c) {
    seg.power_cutoff = false;
  }
  if (seg.state == SegmentState::Active && seg.temp_c > p.derate_on_c) {
    segment_apply(seg, SegmentInput::TempHigh, 0.0, p);
  } else if (seg.state == SegmentState::Derated &&
             seg.temp_c < p.derate_clear_c) {
    segment_apply(seg, SegmentInput::TempRecovered, 0.0, p);
  }
  return seg.temp_c;
}

} // namespace ers
