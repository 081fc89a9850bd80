#include "ers/engine.hpp"

#include "ers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

namespace ers {

namespace {

// Agenda event kinds; the enum value is the tie-break priority at equal time.
enum EvKind : int {
  kRampDone = 0,
  kHoldExpire = 1,
  kFaultOn = 2,
  kFaultOff = 3,
  kSpawn = 4,
  kSpanExit = 5,
  kZoneCross = 6,
  kDetect = 7,
  kSpanEnter = 8,
  kExitCross = 9,
  kRequestArrive = 10,
  kGrantArrive = 11,
  kTelemetryArrive = 12,
  kSessionEndArrive = 13,
};

struct Ev {
  double t = 0.0;
  int kind = 0;
  int a = 0;       // vehicle / segment / fault index
  long long b = 0; // generation, segment id, or packed payload
  double d = 0.0;  // exact kWh payload for telemetry
  std::uint64_t seq = 0;
};

struct EvAfter {
  bool operator()(const Ev& x, const Ev& y) const {
    if (x.t != y.t) return x.t > y.t;
    if (x.kind != y.kind) return x.kind > y.kind;
    if (x.a != y.a) return x.a > y.a;
    if (x.b != y.b) return x.b > y.b;
    return x.seq > y.seq;
  }
};

struct EngineVehicle {
  int id = 0;
  VehicleClassId cls = VehicleClassId::Taxi;
  double target_kmh = 50.0;
  double offset_m = 0.0;
  double entry_soc = 0.5;
  double entry_s = -1.0;
  double exit_s = -1.0;
  BatteryState batt;
  // Motion is linear within a control step.
  double anchor_t = 0.0;
  double anchor_pos = 0.0;
  double speed_kmh = 0.0;
  double integ_from = 0.0;
  int coupled = -1;
  double tic_s = 0.0;
  double kwh_received = 0.0;
  double instr_kwh = 0.0;
  double session_delivered = 0.0;
  double reported_exact = 0.0; // exact kWh covered by telemetry sent so far
  long long billed_milli = 0;
  int session = 0; // 0 pending, 1 open, 2 denied, 3 done
  std::string session_id;
  bool done = false;
};

class Engine {
public:
  Engine(const Scenario& sc, std::uint64_t seed, const RunOptions& opts)
      : sc_(sc), seed_(seed), opts_(opts) {}

  SimulationResult run();

private:
  // --- setup ---
  void build();
  void schedule_arrivals();

  // --- stepping ---
  void step(std::int64_t istep);
  void plan_motion(double t0, double dt_s);
  void shed_control(double t0);
  void enumerate_crossings(EngineVehicle& v, double from_pos, double to_pos);
  void process_agenda(double t1);
  void commit_step(double t0, double t1);
  void dispatch_step(double t0, double t1);
  void process_windows(double t1);
  void finalize(SimulationResult& out);

  // --- event handlers ---
  void handle(const Ev& ev);
  void on_spawn(int vid, double t);
  void on_detect(int vid, int seg, double t);
  void on_span_enter(int vid, int seg, double t);
  void on_span_exit(int vid, int seg, double t);
  void on_zone_cross(int vid, long long boundary, double t);
  void on_exit(int vid, double t);
  void on_ramp_done(int seg, long long gen, double t);
  void on_hold_expire(int seg, long long gen, double t);
  void on_fault(int fidx, bool on, double t);
  void flush_telemetry(EngineVehicle& v, int seg, double t);

  // --- helpers ---
  double pos_at(const EngineVehicle& v, double t) const {
    return v.anchor_pos + v.speed_kmh / 3.6 * (t - v.anchor_t);
  }
  double time_to_pos(const EngineVehicle& v, double x) const {
    return v.anchor_t + (x - v.anchor_pos) * 3.6 / v.speed_kmh;
  }
  void push(double t, int kind, int a, long long b = 0, double d = 0.0) {
    heap_.push(Ev{t, kind, a, b, d, seq_++});
  }
  void transition(int seg, SegmentInput input, double t);
  void standby_mark(double t);
  void integrate_vehicle(EngineVehicle& v, double to_t);
  double coupling_potential_kw(const EngineVehicle& v, int seg) const;
  int zone_of_segment(int seg) const {
    return static_cast<int>(segments_[static_cast<std::size_t>(seg)].start_m /
                            zone_m_);
  }
  double tod_s(double t) const {
    return std::fmod(sc_.sim.start_hour * 3600.0 + t, 86400.0);
  }
  bool in_offpeak(double t) const {
    double h = tod_s(t) / 3600.0;
    double s = sc_.energy.offpeak_start_h;
    double e = sc_.energy.offpeak_end_h;
    return s <= e ? (h >= s && h < e) : (h >= s || h < e);
  }
  double v2g_available_kw(double t) const {
    double h = tod_s(t) / 3600.0;
    for (const auto& w : sc_.energy.v2g_windows) {
      bool inside = w.start_h <= w.end_h ? (h >= w.start_h && h < w.end_h)
                                         : (h >= w.start_h || h < w.end_h);
      if (inside) return sc_.energy.v2g_bus_count * sc_.energy.v2g_per_bus_kw;
    }
    return 0.0;
  }
  const VehicleClassParams& cls_params(VehicleClassId c) const {
    return sc_.traffic.arrivals.classes[static_cast<std::size_t>(c)];
  }

  // --- configuration shortcuts ---
  const Scenario& sc_;
  std::uint64_t seed_;
  RunOptions opts_;
  double length_m_ = 0.0;
  double pitch_ = 10.0;
  double lead_ = 5.0;
  double span_ = 7.2;
  double zone_m_ = 500.0;
  int nseg_ = 0;
  int nzones_ = 0;
  double dt_s_ = 0.1;
  double thermal_decay_ = 1.0;
  double standby_kw_ = 0.05;
  MotionParams motion_;

  // --- state ---
  std::vector<CoilSegment> segments_;
  std::vector<double> eta_factor_;
  std::vector<double> diss_step_kwh_;
  std::vector<double> diss_kw_scratch_;
  std::vector<double> win_tx_;
  std::vector<double> win_delivered_;
  std::vector<char> win_has_session_;
  std::vector<std::vector<int>> occupants_;
  std::vector<int> zone_occ_;
  std::vector<long long> hold_gen_;
  std::vector<long long> armed_gen_;
  std::vector<double> idle_since_;
  std::vector<double> zwin_metered_;
  std::vector<double> zwin_telemetry_;

  std::vector<ArrivalSpec> arrivals_;
  std::vector<EngineVehicle> fleet_;
  std::deque<int> on_road_;
  std::priority_queue<Ev, std::vector<Ev>, EvAfter> heap_;
  std::uint64_t seq_ = 0;

  SessionBook book_{"std", 0.90};
  Ledger ledger_;
  std::vector<Alert> alerts_;
  MaintenanceWatch maint_{AnomalyParams{}};
  BufferState buffer_;
  GridParams grid_;

  int idle_count_ = 0;
  double standby_mark_t_ = 0.0;
  double standby_step_kwh_ = 0.0;
  double tx_step_kwh_ = 0.0;
  double shed_step_kw_ = 0.0;
  bool shed_engaged_ = false;
  double activation_budget_kw_ = std::numeric_limits<double>::infinity();
  double next_window_end_ = 0.0;
  double cur_t1_ = 0.0;
  double last_event_t_ = 0.0;
  double consumption_weighted_km_ = 0.0;

  // kernel scratch
  std::vector<kernels::MotionSlot> motion_slots_;
  std::vector<double> motion_out_;
  std::vector<kernels::BatterySlot> batt_slots_;

  std::vector<double> hourly_demand_kwh_;
  std::vector<TimePoint> timeseries_;
  RunAggregates agg_;
};

// ---------------------------------------------------------------------------

void Engine::build() {
  length_m_ = sc_.corridor.length_m;
  pitch_ = sc_.corridor.params.pitch_m;
  lead_ = sc_.corridor.params.detection_lead_m;
  zone_m_ = sc_.v2i.zone_m;
  dt_s_ = sc_.sim.control_dt_ms / 1000.0;
  thermal_decay_ = std::exp(-dt_s_ / sc_.corridor.params.tau_s);
  standby_kw_ = sc_.corridor.params.standby_w / 1000.0;
  motion_ = sc_.traffic.motion;
  motion_.speed_factor = sc_.corridor.road.speed_factor();

  double init_temp = sc_.corridor.road.ambient_c(tod_s(0.0));
  segments_ = build_corridor(length_m_, sc_.corridor.params,
                             sc_.transfer.coverage, init_temp);
  nseg_ = static_cast<int>(segments_.size());
  span_ = nseg_ > 0 ? segments_[0].span_m : sc_.transfer.coverage * pitch_;
  nzones_ = static_cast<int>(std::ceil(length_m_ / zone_m_));
  if (nzones_ < 1) nzones_ = 1;

  auto n = static_cast<std::size_t>(nseg_);
  eta_factor_.assign(n, 1.0);
  diss_step_kwh_.assign(n, 0.0);
  diss_kw_scratch_.assign(n, 0.0);
  win_tx_.assign(n, 0.0);
  win_delivered_.assign(n, 0.0);
  win_has_session_.assign(n, 0);
  occupants_.assign(n, {});
  zone_occ_.assign(n, 0);
  hold_gen_.assign(n, 0);
  armed_gen_.assign(n, 0);
  idle_since_.assign(n, 0.0);
  zwin_metered_.assign(static_cast<std::size_t>(nzones_), 0.0);
  zwin_telemetry_.assign(static_cast<std::size_t>(nzones_), 0.0);
  idle_count_ = nseg_;

  book_ = SessionBook(sc_.v2i.tariff_id, sc_.wear.ceiling_soc);
  maint_ = MaintenanceWatch(sc_.v2i.anomaly);
  buffer_ = sc_.energy.buffer;
  grid_ = sc_.energy.grid;
  next_window_end_ = sc_.v2i.window_s;

  std::int64_t steps = static_cast<std::int64_t>(
      std::llround(sc_.sim.duration_s * 1000.0 / sc_.sim.control_dt_ms));
  timeseries_.reserve(static_cast<std::size_t>(steps));
  hourly_demand_kwh_.assign(
      static_cast<std::size_t>(std::floor(sc_.sim.duration_s / 3600.0)) + 1, 0.0);
}

void Engine::schedule_arrivals() {
  if (sc_.traffic.mode == "scripted") {
    VehicleClassId cls = sc_.scripted_class_id();
    for (int i = 0; i < sc_.traffic.scripted_count; ++i) {
      ArrivalSpec a;
      a.t_s = sc_.traffic.scripted_entry_time_s + i * sc_.traffic.scripted_spacing_s;
      a.cls = cls;
      a.target_kmh = sc_.traffic.speed_kmh;
      a.offset_m = sc_.traffic.scripted_offset_m;
      a.entry_soc = sc_.traffic.scripted_entry_soc;
      if (a.t_s < sc_.sim.duration_s) arrivals_.push_back(a);
    }
  } else {
    arrivals_ = generate_arrivals(sc_.traffic.arrivals, sc_.sim.duration_s, seed_);
  }
  fleet_.reserve(arrivals_.size());
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    const auto& a = arrivals_[i];
    EngineVehicle v;
    v.id = static_cast<int>(i);
    v.cls = a.cls;
    v.target_kmh = a.target_kmh;
    v.offset_m = a.offset_m;
    v.entry_soc = a.entry_soc;
    battery_init(v.batt, a.entry_soc);
    v.batt.temp_c = cls_params(a.cls).pack_temp_c;
    fleet_.push_back(std::move(v));
    push(a.t_s, kSpawn, static_cast<int>(i));
  }
  agg_.vehicles_entered = 0; // counted at spawn
  // scenario fault schedule
  for (std::size_t i = 0; i < sc_.faults.size(); ++i) {
    const auto& f = sc_.faults[i];
    if (f.segment >= nseg_) continue;
    push(f.t_s, kFaultOn, static_cast<int>(i));
    if (f.type == "efficiency" && f.duration_s > 0.0) {
      push(f.t_s + f.duration_s, kFaultOff, static_cast<int>(i));
    }
  }
}

// ---------------------------------------------------------------------------

void Engine::standby_mark(double t) {
  if (t > standby_mark_t_) {
    standby_step_kwh_ += idle_count_ * standby_kw_ * (t - standby_mark_t_) / 3600.0;
    standby_mark_t_ = t;
  }
}

void Engine::transition(int seg, SegmentInput input, double t) {
  auto& s = segments_[static_cast<std::size_t>(seg)];
  bool was_idle = s.state == SegmentState::Idle;
  standby_mark(t);
  SegmentState before = s.state;
  segment_apply(s, input, t, sc_.corridor.params);
  if (s.state == before) return;
  if (was_idle) {
    s.standby_kwh +=
        standby_kw_ * (t - idle_since_[static_cast<std::size_t>(seg)]) / 3600.0;
    idle_count_ -= 1;
  }
  if (s.state == SegmentState::Idle) {
    idle_since_[static_cast<std::size_t>(seg)] = t;
    idle_count_ += 1;
  }
  if (before == SegmentState::Idle && s.state == SegmentState::Armed) {
    armed_gen_[static_cast<std::size_t>(seg)] += 1;
    push(t + sc_.corridor.params.ramp_ms / 1000.0, kRampDone, seg,
         armed_gen_[static_cast<std::size_t>(seg)]);
  }
}

void Engine::integrate_vehicle(EngineVehicle& v, double to_t) {
  if (to_t <= v.integ_from) return;
  double dt = to_t - v.integ_from;
  if (v.coupled >= 0 && !v.done) {
    auto& s = segments_[static_cast<std::size_t>(v.coupled)];
    if (segment_energized(s)) {
      v.tic_s += dt;
      if (v.session == 1 && charge_acceptance(v.batt.soc, sc_.wear) > 0.0) {
        const auto& cp = cls_params(v.cls);
        double p_tx = transmit_power_kw(sc_.transfer, v.speed_kmh, v.offset_m,
                                        s.temp_c, cp.receiver_kw);
        if (p_tx > 0.0) {
          double dt_h = dt / 3600.0;
          double tx_kwh = p_tx * dt_h;
          double eta = coupling_efficiency(sc_.transfer, v.speed_kmh) *
                       eta_factor_[static_cast<std::size_t>(v.coupled)];
          double offered = tx_kwh * eta;
          double accepted =
              apply_charge(v.batt, cp.capacity_kwh, offered, p_tx * eta, sc_.wear);
          s.kwh_tx += tx_kwh;
          s.kwh_delivered += offered;
          win_tx_[static_cast<std::size_t>(v.coupled)] += tx_kwh;
          win_delivered_[static_cast<std::size_t>(v.coupled)] += offered;
          win_has_session_[static_cast<std::size_t>(v.coupled)] = 1;
          diss_step_kwh_[static_cast<std::size_t>(v.coupled)] += tx_kwh - offered;
          tx_step_kwh_ += tx_kwh;
          v.kwh_received += accepted;
          v.session_delivered += accepted;
          agg_.battery_overflow_kwh += offered - accepted;
          if (sc_.instrument.enabled) {
            double mid = 0.5 * (pos_at(v, v.integ_from) + pos_at(v, to_t));
            if (mid >= sc_.instrument.start_m && mid < sc_.instrument.end_m) {
              v.instr_kwh += accepted;
            }
          }
        }
      }
    }
  }
  v.integ_from = to_t;
}

double Engine::coupling_potential_kw(const EngineVehicle& v, int seg) const {
  if (v.session == 2 || v.done) return 0.0;
  if (charge_acceptance(v.batt.soc, sc_.wear) <= 0.0) return 0.0;
  const auto& s = segments_[static_cast<std::size_t>(seg)];
  if (s.power_cutoff || s.state == SegmentState::Idle ||
      s.state == SegmentState::Fault) {
    return 0.0;
  }
  return transmit_power_kw(sc_.transfer, v.speed_kmh, v.offset_m, s.temp_c,
                           cls_params(v.cls).receiver_kw);
}

// ---------------------------------------------------------------------------
// Event handlers

void Engine::handle(const Ev& ev) {
  agg_.events += 1;
  switch (ev.kind) {
    case kSpawn: on_spawn(ev.a, ev.t); break;
    case kDetect: on_detect(ev.a, static_cast<int>(ev.b), ev.t); break;
    case kSpanEnter: on_span_enter(ev.a, static_cast<int>(ev.b), ev.t); break;
    case kSpanExit: on_span_exit(ev.a, static_cast<int>(ev.b), ev.t); break;
    case kZoneCross: on_zone_cross(ev.a, ev.b, ev.t); break;
    case kExitCross: on_exit(ev.a, ev.t); break;
    case kRampDone: on_ramp_done(ev.a, ev.b, ev.t); break;
    case kHoldExpire: on_hold_expire(ev.a, ev.b, ev.t); break;
    case kFaultOn: on_fault(ev.a, true, ev.t); break;
    case kFaultOff: on_fault(ev.a, false, ev.t); break;
    case kRequestArrive: {
      auto& v = fleet_[static_cast<std::size_t>(ev.a)];
      if (v.done) break;
      SessionRequest req;
      req.vehicle_id = v.id;
      req.soc = v.entry_soc;
      req.requested_kwh =
          std::max(0.0, (sc_.wear.ceiling_soc - v.entry_soc)) *
          cls_params(v.cls).capacity_kwh;
      req.auth_token = "tok-" + std::to_string(v.id);
      auto res = book_.open_session(req, ev.t);
      if (std::holds_alternative<SessionGrant>(res)) {
        const auto& g = std::get<SessionGrant>(res);
        agg_.sessions_opened += 1;
        push(ev.t + sc_.v2i.latency_ms / 1000.0, kGrantArrive, ev.a, 1);
        fleet_[static_cast<std::size_t>(ev.a)].session_id = g.session_id;
      } else {
        agg_.sessions_denied += 1;
        push(ev.t + sc_.v2i.latency_ms / 1000.0, kGrantArrive, ev.a, 0);
      }
      break;
    }
    case kGrantArrive: {
      auto& v = fleet_[static_cast<std::size_t>(ev.a)];
      integrate_vehicle(v, ev.t);
      if (v.done) {
        // exited before the grant made it back; close the dangling session
        if (ev.b == 1) {
          book_.close_session(v.session_id, ev.t);
          agg_.sessions_closed += 1;
        }
        break;
      }
      if (v.session == 0) v.session = ev.b == 1 ? 1 : 2;
      break;
    }
    case kTelemetryArrive: {
      auto& v = fleet_[static_cast<std::size_t>(ev.a)];
      int seg = static_cast<int>(ev.b / 1000000);
      long long milli = ev.b % 1000000;
      ledger_.append(static_cast<std::int64_t>(std::llround(ev.t * 1000.0)),
                     v.session_id, seg, milli, sc_.v2i.tariff_id);
      book_.add_telemetry(v.session_id, milli);
      int z = zone_of_segment(seg);
      zwin_telemetry_[static_cast<std::size_t>(z)] += milli / 1000.0;
      zwin_metered_[static_cast<std::size_t>(z)] += ev.d;
      agg_.billed_kwh += milli / 1000.0;
      break;
    }
    case kSessionEndArrive: {
      auto& v = fleet_[static_cast<std::size_t>(ev.a)];
      book_.close_session(v.session_id, ev.t);
      agg_.sessions_closed += 1;
      break;
    }
    default: break;
  }
}

void Engine::on_spawn(int vid, double t) {
  auto& v = fleet_[static_cast<std::size_t>(vid)];
  // Entry gate: hold the vehicle until the road head is clear.
  if (!on_road_.empty()) {
    const auto& back = fleet_[static_cast<std::size_t>(on_road_.back())];
    if (pos_at(back, t) < sc_.traffic.min_spawn_gap_m) {
      push(cur_t1_, kSpawn, vid); // retry next control step
      return;
    }
  }
  v.entry_s = t;
  v.anchor_t = t;
  v.anchor_pos = 0.0;
  v.integ_from = t;
  double gap = std::numeric_limits<double>::infinity();
  if (!on_road_.empty()) {
    gap = pos_at(fleet_[static_cast<std::size_t>(on_road_.back())], t);
  }
  double limit =
      std::min(v.target_kmh * motion_.speed_factor,
               std::max(0.0, gap / motion_.headway_s) * 3.6);
  v.speed_kmh = std::max(0.0, limit);
  on_road_.push_back(vid);
  agg_.vehicles_entered += 1;

  push(t + sc_.v2i.latency_ms / 1000.0, kRequestArrive, vid);

  // Boundaries at or behind the entry point fire immediately.
  for (int k = 0; k < nseg_ && k * pitch_ - lead_ <= 0.0; ++k) {
    on_detect(vid, k, t);
  }
  if (nseg_ > 0 && span_ > 0.0) on_span_enter(vid, 0, t);
  enumerate_crossings(v, 0.0, pos_at(v, cur_t1_));
}

void Engine::on_detect(int vid, int seg, double t) {
  (void)vid;
  if (seg >= nseg_) return;
  zone_occ_[static_cast<std::size_t>(seg)] += 1;
  hold_gen_[static_cast<std::size_t>(seg)] += 1; // cancel pending hold expiry
  transition(seg, SegmentInput::Detection, t);
}

void Engine::on_span_enter(int vid, int seg, double t) {
  auto& v = fleet_[static_cast<std::size_t>(vid)];
  integrate_vehicle(v, t);
  if (seg < 0 || seg >= nseg_) return; // pure integration split marker
  v.coupled = seg;
  occupants_[static_cast<std::size_t>(seg)].push_back(vid);
}

void Engine::on_span_exit(int vid, int seg, double t) {
  if (seg >= nseg_) return;
  auto& v = fleet_[static_cast<std::size_t>(vid)];
  integrate_vehicle(v, t);
  if (v.coupled == seg) v.coupled = -1;
  auto& occ = occupants_[static_cast<std::size_t>(seg)];
  occ.erase(std::remove(occ.begin(), occ.end(), vid), occ.end());
  zone_occ_[static_cast<std::size_t>(seg)] -= 1;
  auto& s = segments_[static_cast<std::size_t>(seg)];
  if (zone_occ_[static_cast<std::size_t>(seg)] == 0 &&
      (s.state == SegmentState::Active || s.state == SegmentState::Derated)) {
    push(t + sc_.corridor.params.hold_ms / 1000.0, kHoldExpire, seg,
         hold_gen_[static_cast<std::size_t>(seg)]);
  }
}

void Engine::flush_telemetry(EngineVehicle& v, int seg, double t) {
  if (v.session != 1) return;
  // Billed energy is quantized to 1 Wh; deltas of the quantized cumulative
  // meter telescope, so per-session billing sums match the meter exactly.
  long long total_milli = std::llround(v.session_delivered * 1000.0);
  long long delta = total_milli - v.billed_milli;
  if (delta <= 0) return;
  double exact_delta = v.session_delivered - v.reported_exact;
  v.billed_milli = total_milli;
  v.reported_exact = v.session_delivered;
  long long packed = static_cast<long long>(seg) * 1000000 + delta;
  push(t + sc_.v2i.latency_ms / 1000.0, kTelemetryArrive, v.id, packed,
       exact_delta);
}

void Engine::on_zone_cross(int vid, long long boundary, double t) {
  auto& v = fleet_[static_cast<std::size_t>(vid)];
  integrate_vehicle(v, t);
  if (nseg_ == 0) return;
  double x = static_cast<double>(boundary) * zone_m_;
  int seg = std::clamp(static_cast<int>(x / pitch_) - 1, 0, nseg_ - 1);
  flush_telemetry(v, seg, t);
}

void Engine::on_exit(int vid, double t) {
  auto& v = fleet_[static_cast<std::size_t>(vid)];
  if (v.done) return;
  integrate_vehicle(v, t);
  if (v.coupled >= 0) on_span_exit(vid, v.coupled, t);
  // Drain for the partial step, then close out wear bookkeeping.
  double dist_km = (length_m_ - v.anchor_pos) / 1000.0;
  if (dist_km > 0.0) {
    const auto& cp = cls_params(v.cls);
    double soc = std::max(
        0.0, v.batt.soc - cp.consumption_kwh_km * dist_km / cp.capacity_kwh);
    wear_observe(v.batt, soc, cp.capacity_kwh, cp.pack_temp_c, sc_.wear);
    agg_.vehicle_km += dist_km;
    consumption_weighted_km_ += dist_km * cp.consumption_kwh_km;
  }
  wear_flush(v.batt, cls_params(v.cls).pack_temp_c, sc_.wear);
  if (v.session == 1) {
    flush_telemetry(v, nseg_ > 0 ? nseg_ - 1 : 0, t);
    push(t + sc_.v2i.latency_ms / 1000.0, kSessionEndArrive, vid);
    v.session = 3;
  }
  v.exit_s = t;
  v.done = true;
}

void Engine::on_ramp_done(int seg, long long gen, double t) {
  auto& s = segments_[static_cast<std::size_t>(seg)];
  if (s.state != SegmentState::Armed ||
      gen != armed_gen_[static_cast<std::size_t>(seg)]) {
    return;
  }
  if (shed_engaged_) {
    double pot = 0.0;
    for (int vid : occupants_[static_cast<std::size_t>(seg)]) {
      pot += coupling_potential_kw(fleet_[static_cast<std::size_t>(vid)], seg);
    }
    if (pot > activation_budget_kw_ + 1e-9) {
      transition(seg, SegmentInput::Shed, t);
      shed_step_kw_ += pot;
      agg_.shed_events += 1;
      return;
    }
    activation_budget_kw_ -= pot;
  }
  for (int vid : occupants_[static_cast<std::size_t>(seg)]) {
    integrate_vehicle(fleet_[static_cast<std::size_t>(vid)], t);
  }
  transition(seg, SegmentInput::RampElapsed, t);
  agg_.activations += 1;
  if (zone_occ_[static_cast<std::size_t>(seg)] == 0) {
    push(t + sc_.corridor.params.hold_ms / 1000.0, kHoldExpire, seg,
         hold_gen_[static_cast<std::size_t>(seg)]);
  }
}

void Engine::on_hold_expire(int seg, long long gen, double t) {
  auto& s = segments_[static_cast<std::size_t>(seg)];
  if (gen != hold_gen_[static_cast<std::size_t>(seg)]) return;
  if (zone_occ_[static_cast<std::size_t>(seg)] != 0) return;
  if (s.state != SegmentState::Active && s.state != SegmentState::Derated) return;
  transition(seg, SegmentInput::HoldElapsed, t);
}

void Engine::on_fault(int fidx, bool on, double t) {
  const auto& f = sc_.faults[static_cast<std::size_t>(fidx)];
  if (f.segment >= nseg_) return;
  auto sidx = static_cast<std::size_t>(f.segment);
  if (f.type == "efficiency") {
    eta_factor_[sidx] = on ? f.factor : 1.0;
    return;
  }
  if (!on) return;
  if (f.type == "fault") {
    for (int vid : occupants_[sidx]) {
      integrate_vehicle(fleet_[static_cast<std::size_t>(vid)], t);
    }
    transition(f.segment, SegmentInput::FaultInjected, t);
  } else if (f.type == "reset") {
    transition(f.segment, SegmentInput::MaintenanceReset, t);
  } else if (f.type == "theft") {
    auto& s = segments_[sidx];
    s.kwh_tx += f.kwh;
    s.kwh_delivered += f.kwh;
    win_delivered_[sidx] += f.kwh;
    win_tx_[sidx] += f.kwh;
    tx_step_kwh_ += f.kwh;
  }
}

// ---------------------------------------------------------------------------
// Crossing enumeration: boundary positions in (from_pos, to_pos].

void Engine::enumerate_crossings(EngineVehicle& v, double from_pos,
                                 double to_pos) {
  if (v.speed_kmh <= 0.0 || to_pos <= from_pos) return;
  auto first_k = [&](double offset) {
    // smallest k with k*pitch + offset > from_pos
    return static_cast<long long>(std::floor((from_pos - offset) / pitch_)) + 1;
  };
  auto emit_family = [&](double offset, int kind) {
    for (long long k = first_k(offset);; ++k) {
      double x = static_cast<double>(k) * pitch_ + offset;
      if (x > to_pos) break;
      if (k < 0 || k >= nseg_) continue;
      push(time_to_pos(v, x), kind, v.id, k);
    }
  };
  emit_family(-lead_, kDetect);
  emit_family(0.0, kSpanEnter);
  emit_family(span_, kSpanExit);
  // RSU zone boundaries
  for (long long z = static_cast<long long>(std::floor(from_pos / zone_m_)) + 1;;
       ++z) {
    double x = static_cast<double>(z) * zone_m_;
    if (x > to_pos || x >= length_m_) break;
    if (z < 1) continue;
    push(time_to_pos(v, x), kZoneCross, v.id, z);
  }
  // instrumented window edges split integration sub-intervals
  if (sc_.instrument.enabled) {
    for (double x : {sc_.instrument.start_m, sc_.instrument.end_m}) {
      if (x > from_pos && x <= to_pos) {
        push(time_to_pos(v, x), kSpanEnter, v.id, -1000000); // integration split
      }
    }
  }
  if (length_m_ > from_pos && length_m_ <= to_pos) {
    push(time_to_pos(v, length_m_), kExitCross, v.id);
  }
}

// ---------------------------------------------------------------------------

void Engine::plan_motion(double t0, double dt_s) {
  motion_slots_.clear();
  motion_out_.assign(on_road_.size(), 0.0);
  double leader_pos = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < on_road_.size(); ++i) {
    const auto& v = fleet_[static_cast<std::size_t>(on_road_[i])];
    kernels::MotionSlot s;
    s.speed_kmh = v.speed_kmh;
    s.target_kmh = v.target_kmh;
    s.gap_m = i == 0 ? -1.0 : leader_pos - v.anchor_pos;
    leader_pos = v.anchor_pos;
    motion_slots_.push_back(s);
  }
  (void)t0;
  kernels::motion_sweep(opts_.kernel_mode, motion_slots_, motion_out_, dt_s,
                        motion_);
  for (std::size_t i = 0; i < on_road_.size(); ++i) {
    fleet_[static_cast<std::size_t>(on_road_[i])].speed_kmh = motion_out_[i];
  }
}

void Engine::shed_control(double t0) {
  shed_step_kw_ = 0.0;
  shed_engaged_ = false;
  activation_budget_kw_ = std::numeric_limits<double>::infinity();
  if (!sc_.energy.shedding_enabled || nseg_ == 0) return;

  double t_mid = t0 + dt_s_ / 2.0;
  double solar_kw = solar_available_kw(sc_.energy.solar, tod_s(t_mid),
                                       sc_.sim.day_of_year, sc_.energy.pv_area_m2,
                                       sc_.energy.pv_efficiency);
  double buffer_out_cap =
      std::min(buffer_.max_discharge_kw,
               buffer_.stored_kwh * buffer_.round_trip_eff / (dt_s_ / 3600.0));
  double grid_cap = sc_.energy.grid_capacity_kw;
  double supply_max = solar_kw + buffer_out_cap + grid_cap + v2g_available_kw(t_mid);
  double margin_kw = grid_.shed_trigger_dev / grid_.droop_freq * grid_.capacity_kw;

  // Conservative projection: every vehicle inside an approach zone or span of
  // a segment that is armed or energized may draw its full coupling power.
  double projected = idle_count_ * standby_kw_;
  std::vector<double> seg_potential(static_cast<std::size_t>(nseg_), 0.0);
  std::vector<int> seg_priority(static_cast<std::size_t>(nseg_), -1);
  for (int vid : on_road_) {
    const auto& v = fleet_[static_cast<std::size_t>(vid)];
    double pos = v.anchor_pos;
    int k = -1;
    int k_span = static_cast<int>(std::floor(pos / pitch_));
    if (k_span >= 0 && k_span < nseg_ &&
        pos >= k_span * pitch_ && pos < k_span * pitch_ + span_) {
      k = k_span;
    } else {
      int k_appr = static_cast<int>(std::floor((pos + lead_) / pitch_));
      if (k_appr >= 0 && k_appr < nseg_ && pos >= k_appr * pitch_ - lead_ &&
          pos < k_appr * pitch_) {
        k = k_appr;
      }
    }
    if (k < 0) continue;
    double pot = coupling_potential_kw(v, k);
    if (pot <= 0.0) continue;
    projected += pot;
    seg_potential[static_cast<std::size_t>(k)] += pot;
    seg_priority[static_cast<std::size_t>(k)] = std::max(
        seg_priority[static_cast<std::size_t>(k)], shed_priority(v.cls));
  }

  double allowed = supply_max + margin_kw;
  if (projected <= allowed) return;

  shed_engaged_ = true;
  double required = projected - allowed;
  std::vector<ShedCandidate> cands;
  for (int k = 0; k < nseg_; ++k) {
    const auto& s = segments_[static_cast<std::size_t>(k)];
    if ((s.state == SegmentState::Active || s.state == SegmentState::Derated) &&
        seg_potential[static_cast<std::size_t>(k)] > 0.0) {
      cands.push_back({k, seg_priority[static_cast<std::size_t>(k)],
                       seg_potential[static_cast<std::size_t>(k)]});
    }
  }
  ShedPlan plan = shed_load(std::move(cands), required);
  for (int k : plan.segments) {
    for (int vid : occupants_[static_cast<std::size_t>(k)]) {
      integrate_vehicle(fleet_[static_cast<std::size_t>(vid)], t0);
    }
    transition(k, SegmentInput::Shed, t0);
  }
  shed_step_kw_ += plan.shed_kw;
  agg_.shed_events += static_cast<std::int64_t>(plan.segments.size());
  if (plan.insufficient) agg_.shed_alarms += 1;
  activation_budget_kw_ = std::max(0.0, allowed - (projected - plan.shed_kw));
}

void Engine::process_agenda(double t1) {
  while (!heap_.empty() && heap_.top().t < t1) {
    Ev ev = heap_.top();
    heap_.pop();
    if (ev.t < last_event_t_ - 1e-9) {
      throw std::logic_error("event clock moved backwards");
    }
    last_event_t_ = ev.t;
    handle(ev);
  }
}

void Engine::commit_step(double t0, double t1) {
  (void)t0;
  batt_slots_.clear();
  for (int vid : on_road_) {
    auto& v = fleet_[static_cast<std::size_t>(vid)];
    if (v.done) continue;
    integrate_vehicle(v, t1);
    double pos1 = pos_at(v, t1);
    double dist_km = (pos1 - v.anchor_pos) / 1000.0;
    const auto& cp = cls_params(v.cls);
    agg_.vehicle_km += dist_km;
    consumption_weighted_km_ += dist_km * cp.consumption_kwh_km;
    kernels::BatterySlot s;
    s.batt = &v.batt;
    s.new_soc = std::max(
        0.0, v.batt.soc - cp.consumption_kwh_km * dist_km / cp.capacity_kwh);
    s.temp_c = cp.pack_temp_c;
    s.capacity_kwh = cp.capacity_kwh;
    batt_slots_.push_back(s);
    v.anchor_pos = pos1;
    v.anchor_t = t1;
    v.integ_from = t1;
  }
  kernels::battery_sweep(opts_.kernel_mode, batt_slots_, sc_.wear);
  while (!on_road_.empty() &&
         fleet_[static_cast<std::size_t>(on_road_.front())].done) {
    on_road_.pop_front();
  }

  // Interval-average dissipated power drives the first-order thermal step.
  double kwh_to_kw = 3600.0 / dt_s_;
  for (std::size_t k = 0; k < diss_kw_scratch_.size(); ++k) {
    diss_kw_scratch_[k] = diss_step_kwh_[k] * kwh_to_kw;
  }
  double ambient = sc_.corridor.road.ambient_c(tod_s(t1 - dt_s_ / 2.0));
  kernels::thermal_sweep(opts_.kernel_mode, segments_, diss_kw_scratch_,
                         ambient, thermal_decay_, sc_.corridor.params);
}

void Engine::dispatch_step(double t0, double t1) {
  standby_mark(t1);
  double dt_h = dt_s_ / 3600.0;
  double t_mid = t0 + dt_s_ / 2.0;
  double demand_kw = (tx_step_kwh_ + standby_step_kwh_) / dt_h;
  double solar_kw = solar_available_kw(sc_.energy.solar, tod_s(t_mid),
                                       sc_.sim.day_of_year, sc_.energy.pv_area_m2,
                                       sc_.energy.pv_efficiency);
  bool offpeak = in_offpeak(t_mid);
  double opcap = offpeak ? sc_.energy.grid_capacity_kw : 0.0;
  double pkcap = offpeak ? 0.0 : sc_.energy.grid_capacity_kw;
  double v2g = v2g_available_kw(t_mid);

  SourceMix mix = dispatch(demand_kw, solar_kw, buffer_, opcap, pkcap, v2g, dt_s_);
  GridState g = update_grid(grid_, mix.supplied(), demand_kw);

  TimePoint tp;
  tp.t_s = t0;
  tp.demand_kw = demand_kw;
  tp.solar_kw = mix.solar;
  tp.buffer_kw = mix.buffer;
  tp.grid_offpeak_kw = mix.grid_offpeak;
  tp.grid_peak_kw = mix.grid_peak;
  tp.v2g_kw = mix.v2g;
  tp.deficit_kw = mix.deficit;
  tp.freq_dev_pct = g.freq_dev * 100.0;
  tp.volt_dev_pct = g.volt_dev * 100.0;
  tp.shed_kw = shed_step_kw_;
  tp.curtailed_kw = mix.curtailed;
  tp.solar_to_buffer_kw = mix.solar_to_buffer;
  tp.standby_kw = standby_step_kwh_ / dt_h;
  timeseries_.push_back(tp);

  double lhs = (mix.solar + mix.solar_to_buffer + mix.curtailed) + mix.buffer +
               mix.grid_offpeak + mix.grid_peak + mix.deficit + mix.v2g;
  double rhs = demand_kw + mix.solar_to_buffer + mix.curtailed;
  double scale = std::max(1.0, std::max(lhs, rhs));
  agg_.max_balance_rel_err =
      std::max(agg_.max_balance_rel_err, std::abs(lhs - rhs) / scale);

  agg_.demand_kwh += demand_kw * dt_h;
  agg_.solar_used_kwh += mix.solar * dt_h;
  agg_.solar_to_buffer_kwh += mix.solar_to_buffer * dt_h;
  agg_.buffer_out_kwh += mix.buffer * dt_h;
  agg_.grid_offpeak_kwh += mix.grid_offpeak * dt_h;
  agg_.grid_peak_kwh += mix.grid_peak * dt_h;
  agg_.v2g_kwh += mix.v2g * dt_h;
  agg_.deficit_kwh += mix.deficit * dt_h;
  agg_.curtailed_kwh += mix.curtailed * dt_h;
  agg_.shed_kwh += shed_step_kw_ * dt_h;
  agg_.standby_kwh += standby_step_kwh_;
  agg_.max_abs_freq_dev_pct =
      std::max(agg_.max_abs_freq_dev_pct, std::abs(tp.freq_dev_pct));
  agg_.max_abs_volt_dev_pct =
      std::max(agg_.max_abs_volt_dev_pct, std::abs(tp.volt_dev_pct));

  std::size_t hour = static_cast<std::size_t>(t0 / 3600.0);
  if (hour < hourly_demand_kwh_.size()) {
    hourly_demand_kwh_[hour] += demand_kw * dt_h;
  }

  tx_step_kwh_ = 0.0;
  standby_step_kwh_ = 0.0;
  std::fill(diss_step_kwh_.begin(), diss_step_kwh_.end(), 0.0);
}

void Engine::process_windows(double t1) {
  while (next_window_end_ <= t1 + 1e-9) {
    double wstart = next_window_end_ - sc_.v2i.window_s;
    // zone-level reconciliation (mismatch only)
    for (int z = 0; z < nzones_; ++z) {
      WindowObservation obs;
      obs.segment_id = static_cast<int>(z * zone_m_ / pitch_);
      obs.window_start_s = wstart;
      obs.metered_kwh = zwin_metered_[static_cast<std::size_t>(z)];
      obs.telemetry_kwh = zwin_telemetry_[static_cast<std::size_t>(z)];
      obs.session_mapped = true;
      for (const auto& a : detect_anomalies(obs, sc_.v2i.anomaly)) {
        alerts_.push_back(a);
        agg_.alerts_mismatch += 1;
      }
      zwin_metered_[static_cast<std::size_t>(z)] = 0.0;
      zwin_telemetry_[static_cast<std::size_t>(z)] = 0.0;
    }
    // segment-level: unauthorized draw and maintenance drift
    for (int k = 0; k < nseg_; ++k) {
      auto ks = static_cast<std::size_t>(k);
      if (win_delivered_[ks] > 0.0 && !win_has_session_[ks]) {
        WindowObservation obs;
        obs.segment_id = k;
        obs.window_start_s = wstart;
        obs.metered_kwh = win_delivered_[ks];
        obs.telemetry_kwh = win_delivered_[ks];
        obs.session_mapped = false;
        for (const auto& a : detect_anomalies(obs, sc_.v2i.anomaly)) {
          alerts_.push_back(a);
          agg_.alerts_unauthorized += 1;
        }
      }
      if (auto a = maint_.observe(k, wstart, win_tx_[ks], win_delivered_[ks])) {
        alerts_.push_back(*a);
        agg_.alerts_maintenance += 1;
      }
      win_tx_[ks] = 0.0;
      win_delivered_[ks] = 0.0;
      win_has_session_[ks] = 0;
    }
    next_window_end_ += sc_.v2i.window_s;
  }
}

void Engine::step(std::int64_t istep) {
  double t0 = static_cast<double>(istep) * dt_s_;
  double t1 = static_cast<double>(istep + 1) * dt_s_;
  cur_t1_ = t1;
  plan_motion(t0, dt_s_);
  shed_control(t0);
  for (int vid : on_road_) {
    auto& v = fleet_[static_cast<std::size_t>(vid)];
    enumerate_crossings(v, v.anchor_pos, pos_at(v, t1));
  }
  process_agenda(t1);
  commit_step(t0, t1);
  dispatch_step(t0, t1);
  process_windows(t1);
  agg_.steps += 1;
}

void Engine::finalize(SimulationResult& out) {
  double t_end = sc_.sim.duration_s;
  // flush idle standby accrual per segment
  for (int k = 0; k < nseg_; ++k) {
    auto& s = segments_[static_cast<std::size_t>(k)];
    if (s.state == SegmentState::Idle) {
      s.standby_kwh +=
          standby_kw_ * (t_end - idle_since_[static_cast<std::size_t>(k)]) / 3600.0;
    }
  }

  out.segments.reserve(static_cast<std::size_t>(nseg_));
  for (const auto& s : segments_) {
    SegmentRecord r;
    r.index = s.index;
    r.position_m = s.start_m;
    r.activations = s.activations;
    r.kwh_tx = s.kwh_tx;
    r.kwh_delivered = s.kwh_delivered;
    r.peak_temp_c = s.peak_temp_c;
    r.fault_count = s.fault_count;
    r.standby_kwh = s.standby_kwh;
    out.segments.push_back(r);
    agg_.kwh_tx += s.kwh_tx;
    agg_.kwh_delivered += s.kwh_delivered;
    agg_.worst_activation_latency_ms =
        std::max(agg_.worst_activation_latency_ms, s.worst_activation_latency_ms);
    agg_.peak_temp_c = std::max(agg_.peak_temp_c, s.peak_temp_c);
    agg_.fault_count += s.fault_count;
  }
  agg_.segment_count = nseg_;

  double speed_time_weight = 0.0;
  double speed_weighted = 0.0;
  for (auto& v : fleet_) {
    if (v.entry_s < 0.0) continue; // never spawned
    VehicleRecord r;
    r.id = v.id;
    r.cls = v.cls;
    r.entry_s = v.entry_s;
    r.exit_s = v.done ? v.exit_s : -1.0;
    double horizon = v.done ? v.exit_s : t_end;
    double dist_m = v.done ? length_m_ : v.anchor_pos;
    double dur = std::max(1e-9, horizon - v.entry_s);
    r.mean_speed_kmh = dist_m / dur * 3.6;
    r.tic_s = v.tic_s;
    r.kwh_received = v.kwh_received;
    r.soc_in = v.entry_soc;
    r.soc_out = v.batt.soc;
    r.deep_discharges = v.batt.deep_discharges;
    out.vehicles.push_back(r);
    agg_.kwh_received += v.kwh_received;
    agg_.deep_discharges += v.batt.deep_discharges;
    speed_weighted += r.mean_speed_kmh * dur;
    speed_time_weight += dur;
    if (v.done) {
      agg_.vehicles_completed += 1;
      if (sc_.instrument.enabled) {
        agg_.instr_vehicles += 1;
        agg_.instr_kwh_mean += v.instr_kwh; // sum; divided below
      }
    }
  }
  agg_.mean_speed_kmh =
      speed_time_weight > 0.0 ? speed_weighted / speed_time_weight : 0.0;
  if (sc_.instrument.enabled) {
    agg_.instrumented = true;
    agg_.instr_window_m = sc_.instrument.end_m - sc_.instrument.start_m;
    if (agg_.instr_vehicles > 0) {
      agg_.instr_kwh_mean /= static_cast<double>(agg_.instr_vehicles);
      agg_.instr_e_per_2km_kwh =
          agg_.instr_kwh_mean * 2000.0 / agg_.instr_window_m;
    }
  }
  agg_.fleet_consumption_kwh_km =
      agg_.vehicle_km > 0.0 ? consumption_weighted_km_ / agg_.vehicle_km : 0.0;

  agg_.ledger_entries = static_cast<std::int64_t>(ledger_.entries().size());

  double served = agg_.solar_used_kwh + agg_.buffer_out_kwh +
                  agg_.grid_offpeak_kwh + agg_.grid_peak_kwh + agg_.v2g_kwh +
                  agg_.deficit_kwh;
  if (served > 0.0) {
    agg_.solar_share = (agg_.solar_used_kwh + agg_.buffer_out_kwh) / served;
    agg_.v2g_share = agg_.v2g_kwh / served;
  }

  // forecast evaluation needs two full days of hourly history
  std::size_t hours = static_cast<std::size_t>(
      std::floor(sc_.sim.duration_s / 3600.0));
  if (hours >= 48) {
    std::vector<double> hist(hourly_demand_kwh_.begin(),
                             hourly_demand_kwh_.begin() +
                                 static_cast<std::ptrdiff_t>(hours - 24));
    std::vector<double> realized(
        hourly_demand_kwh_.begin() + static_cast<std::ptrdiff_t>(hours - 24),
        hourly_demand_kwh_.begin() + static_cast<std::ptrdiff_t>(hours));
    ForecastParams fp;
    Forecast f = forecast_demand(hist, 24, fp);
    agg_.forecast_accuracy_pct = forecast_accuracy(f, realized, fp);
  }

  SuppliedEnergy supplied;
  supplied.solar_kwh = agg_.solar_used_kwh + agg_.solar_to_buffer_kwh;
  supplied.grid_offpeak_kwh = agg_.grid_offpeak_kwh;
  supplied.grid_peak_kwh = agg_.grid_peak_kwh;
  supplied.deficit_kwh = agg_.deficit_kwh;
  supplied.v2g_kwh = agg_.v2g_kwh;
  agg_.fin = financial_report(sc_.econ, length_m_ / 1000.0, sc_.sim.duration_s,
                              agg_.kwh_received, agg_.vehicle_km, supplied,
                              agg_.fleet_consumption_kwh_km);

  out.timeseries = std::move(timeseries_);
  out.ledger = std::move(ledger_);
  out.alerts = std::move(alerts_);
  out.agg = agg_;
}

SimulationResult Engine::run() {
  SimulationResult out;
  out.seed = seed_;
  out.warnings = sc_.warnings;
  out.scenario_digest = sc_.digest;

  if (sc_.sim.mode == "battery_profile") {
    agg_.battery_mode = true;
    bool ers_style = sc_.battery.profile == "ers-dynamic";
    if (sc_.battery.profile != "ers-dynamic" &&
        sc_.battery.profile != "static-fast-charge") {
      throw SimError(ErrorCode::UnknownProfile, sc_.battery.profile);
    }
    agg_.life = estimate_battery_life(sc_.battery.params, ers_style, sc_.wear);
    out.agg = agg_;
    return out;
  }

  build();
  schedule_arrivals();
  std::int64_t steps = static_cast<std::int64_t>(
      std::llround(sc_.sim.duration_s * 1000.0 / sc_.sim.control_dt_ms));
  for (std::int64_t i = 0; i < steps; ++i) step(i);
  finalize(out);
  return out;
}

} // namespace

SimulationResult run(const Scenario& scenario, std::uint64_t seed,
                     const RunOptions& opts) {
  Engine e(scenario, seed, opts);
  return e.run();
}

} // namespace ers
