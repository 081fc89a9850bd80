#pragma once

#include <cstdint>
#include <vector>

namespace ers {

enum class SegmentState { Idle, Armed, Active, Derated, Fault };

inline const char* segment_state_name(SegmentState s) {
  switch (s) {
    case SegmentState::Idle: return "Idle";
    case SegmentState::Armed: return "Armed";
    case SegmentState::Active: return "Active";
    case SegmentState::Derated: return "Derated";
    case SegmentState::Fault: return "Fault";
  }
  return "?";
}

/// Inputs the segment state machine reacts to. Detection and occupancy come
/// from the upstream sensor; the rest are timer/thermal/control edges.
enum class SegmentInput {
  Detection,
  RampElapsed,
  HoldElapsed,
  TempHigh,
  TempRecovered,
  FaultInjected,
  MaintenanceReset,
  Shed,
};

struct CorridorParams {
  double pitch_m = 10.0;
  double coil_len_m = 5.0;
  int rows = 2;
  double p_tx_kw_per_row = 50.0;
  double ramp_ms = 200.0;
  double hold_ms = 50.0;
  double standby_w = 50.0;
  double detection_lead_m = 5.0;
  // First-order thermal model.
  double r_th_c_per_kw = 2.0;
  double tau_s = 120.0;
  double derate_on_c = 80.0;
  double derate_clear_c = 75.0;
  double cutoff_c = 100.0;
  double cutoff_clear_c = 70.0;
};

/// One independently switchable energized road section.
struct CoilSegment {
  int index = 0;
  double start_m = 0.0;
  double span_m = 0.0; // energized span actually coupled to receivers
  int rows = 1;
  double geometric_coverage = 0.0; // min(1, rows * coil_len / pitch)
  double baseline_efficiency = 0.90;

  SegmentState state = SegmentState::Idle;
  double temp_c = 25.0;
  bool power_cutoff = false; // latched at cutoff_c, cleared below cutoff_clear_c

  // Timers (ms), advanced while the relevant state holds.
  double ramp_elapsed_ms = 0.0;
  double hold_remaining_ms = 0.0;
  bool occupied = false;

  // Meters; non-decreasing.
  double kwh_tx = 0.0;
  double kwh_delivered = 0.0;
  double standby_kwh = 0.0;
  std::int64_t activations = 0;
  std::int64_t fault_count = 0;
  std::int64_t unknown_detections = 0;
  double peak_temp_c = 25.0;

  // Latency bookkeeping: time of the detection that started the current
  // arming cycle, and the worst detection-to-Active gap seen.
  double armed_at_s = -1.0;
  double worst_activation_latency_ms = 0.0;
};

/// Lays out floor(length/pitch) segments at positions k*pitch.
/// effective_coverage overrides the geometric span fraction when > 0 (the
/// staggered-row overlap factor); pass 0 to use the geometric value.
/// Throws INVALID_GEOMETRY.
std::vector<CoilSegment> build_corridor(double length_m, const CorridorParams& p,
                                        double effective_coverage,
                                        double initial_temp_c);

/// Applies one FSM edge at simulation time now_s. Returns true if the state
/// changed. Activation latency is recorded on Armed -> Active.
bool segment_apply(CoilSegment& seg, SegmentInput input, double now_s,
                   const CorridorParams& p);

/// Advances a segment's timers by dt_ms with a level detection/occupancy
/// signal, firing ramp and hold edges as they elapse. The engine uses the
/// event-queue path with exact edge times; this wrapper serves direct,
/// fixed-step stepping of a single segment.
void step_segment(CoilSegment& seg, bool detection, double dt_ms, double now_s,
                  const CorridorParams& p);

/// Exact first-order response toward ambient + p_dissipated * R_th, plus the
/// derate/cutoff latches. Returns the new temperature.
double update_thermal(CoilSegment& seg, double p_dissipated_kw, double ambient_c,
                      double dt_s, const CorridorParams& p);

/// Same update with the decay factor exp(-dt/tau) precomputed (the control
/// step is fixed, so the engine hoists it out of the per-segment loop).
double update_thermal_decayed(CoilSegment& seg, double p_dissipated_kw,
                              double ambient_c, double decay,
                              const CorridorParams& p);

/// True when the segment can transmit at all (Active or Derated, no cutoff).
inline bool segment_energized(const CoilSegment& seg) {
  return (seg.state == SegmentState::Active ||
          seg.state == SegmentState::Derated) &&
         !seg.power_cutoff;
}

} // namespace ers
