#include "ers/scenario.hpp"

#include "ers/errors.hpp"
#include "ers/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ers {

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

/// Section reader that tracks consumed keys so unknown ones can be rejected.
class Section {
public:
  Section(const json* obj, std::string path) : obj_(obj), path_(std::move(path)) {}

  bool present() const { return obj_ != nullptr; }

  Section child(const std::string& key) {
    consumed_.insert(key);
    if (!obj_ || !obj_->contains(key)) return Section(nullptr, path_ + key + ".");
    const json& v = (*obj_)[key];
    if (!v.is_object()) {
      throw SimError(ErrorCode::InvalidValue, path_ + key + " must be an object");
    }
    return Section(&v, path_ + key + ".");
  }

  const json* raw(const std::string& key) {
    consumed_.insert(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    return &(*obj_)[key];
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    consumed_.insert(key);
    if (!obj_ || !obj_->contains(key)) return fallback;
    try {
      return (*obj_)[key].get<T>();
    } catch (const json::exception&) {
      throw SimError(ErrorCode::InvalidValue, path_ + key + " has the wrong type");
    }
  }

  template <typename T>
  T require(const std::string& key) {
    consumed_.insert(key);
    if (!obj_ || !obj_->contains(key)) {
      throw SimError(ErrorCode::MissingField, path_ + key);
    }
    try {
      return (*obj_)[key].get<T>();
    } catch (const json::exception&) {
      throw SimError(ErrorCode::InvalidValue, path_ + key + " has the wrong type");
    }
  }

  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!consumed_.count(it.key())) {
        throw SimError(ErrorCode::InvalidValue, "unknown key: " + path_ + it.key());
      }
    }
  }

private:
  const json* obj_;
  std::string path_;
  std::set<std::string> consumed_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw SimError(ErrorCode::InvalidValue, what);
}

VehicleClassId class_id_from_name(const std::string& name) {
  for (int c = 0; c < kVehicleClassCount; ++c) {
    if (name == vehicle_class_name(static_cast<VehicleClassId>(c))) {
      return static_cast<VehicleClassId>(c);
    }
  }
  throw SimError(ErrorCode::InvalidValue, "unknown vehicle class: " + name);
}

VehicleClassParams default_class(VehicleClassId id) {
  VehicleClassParams p;
  switch (id) {
    case VehicleClassId::Bus:
      p = {250.0, 150.0, 1.2, 42.0, 5.0, 32.0};
      break;
    case VehicleClassId::Taxi:
      p = {50.0, 100.0, 0.15, 50.0, 6.0, 32.0};
      break;
    case VehicleClassId::DeliveryVan:
      p = {80.0, 120.0, 0.30, 46.0, 6.0, 32.0};
      break;
    case VehicleClassId::PrivateCar:
      p = {40.0, 80.0, 0.15, 52.0, 7.0, 32.0};
      break;
  }
  return p;
}

void read_class(Section& sec, VehicleClassParams& p) {
  if (!sec.present()) {
    sec.finish();
    return;
  }
  p.capacity_kwh = sec.get_or("capacity_kwh", p.capacity_kwh);
  p.receiver_kw = sec.get_or("receiver_kw", p.receiver_kw);
  p.consumption_kwh_km = sec.get_or("consumption_kwh_km", p.consumption_kwh_km);
  p.speed_mean_kmh = sec.get_or("speed_mean_kmh", p.speed_mean_kmh);
  p.speed_spread_kmh = sec.get_or("speed_spread_kmh", p.speed_spread_kmh);
  p.pack_temp_c = sec.get_or("pack_temp_c", p.pack_temp_c);
  sec.finish();
  check(p.capacity_kwh > 0.0, "class capacity_kwh must be > 0");
  check(p.receiver_kw > 0.0, "class receiver_kw must be > 0");
  check(p.consumption_kwh_km > 0.0, "class consumption_kwh_km must be > 0");
}

} // namespace

double RoadConditionCfg::ambient_c(double tod_s) const {
  double h = tod_s / 3600.0;
  return ambient_mean_c +
         ambient_amplitude_c * std::sin(2.0 * kPi * (h - ambient_peak_hour) / 24.0 +
                                        kPi / 2.0);
}

double RoadConditionCfg::speed_factor() const {
  double effective = precipitation ? std::min(friction, 0.6) : friction;
  return std::min(1.0, effective / 0.8);
}

VehicleClassId Scenario::scripted_class_id() const {
  return class_id_from_name(traffic.scripted_class);
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw SimError(ErrorCode::ParseError, "top-level document must be an object");
  }
  Scenario sc;
  Section root(&doc, "");

  // --- sim (mode decides which sections are required) ---
  {
    Section sim = root.child("sim");
    sc.sim.mode = sim.get_or<std::string>("mode", "corridor");
    check(sc.sim.mode == "corridor" || sc.sim.mode == "battery_profile",
          "sim.mode must be corridor or battery_profile");
    if (sc.sim.mode == "corridor") {
      sc.sim.duration_s = sim.require<double>("duration_s");
    } else {
      sc.sim.duration_s = sim.get_or("duration_s", 0.0);
    }
    sc.sim.control_dt_ms = sim.get_or("control_dt_ms", 100);
    sc.sim.seed = sim.get_or<std::uint64_t>("seed", 42);
    sc.sim.start_hour = sim.get_or("start_hour", 0.0);
    sc.sim.day_of_year = sim.get_or("day_of_year", 80);
    sim.finish();
    check(sc.sim.duration_s >= 0.0, "sim.duration_s must be >= 0");
    check(sc.sim.control_dt_ms >= 1 && sc.sim.control_dt_ms <= 1000,
          "sim.control_dt_ms must be in [1, 1000]");
    double steps = sc.sim.duration_s * 1000.0 / sc.sim.control_dt_ms;
    check(std::abs(steps - std::round(steps)) < 1e-9,
          "sim.duration_s must be a whole number of control steps");
    check(sc.sim.start_hour >= 0.0 && sc.sim.start_hour < 24.0,
          "sim.start_hour must be in [0, 24)");
    check(sc.sim.day_of_year >= 0 && sc.sim.day_of_year < 365,
          "sim.day_of_year must be in [0, 365)");
  }

  const bool corridor_mode = sc.sim.mode == "corridor";

  // --- corridor ---
  {
    Section cor = root.child("corridor");
    if (corridor_mode) {
      sc.corridor.length_m = cor.require<double>("length_m");
    } else {
      sc.corridor.length_m = cor.get_or("length_m", 0.0);
    }
    auto& p = sc.corridor.params;
    p.pitch_m = cor.get_or("pitch_m", p.pitch_m);
    p.coil_len_m = cor.get_or("coil_len_m", p.coil_len_m);
    p.rows = cor.get_or("rows", p.rows);
    p.p_tx_kw_per_row = cor.get_or("p_tx_kw_per_row", p.p_tx_kw_per_row);
    p.ramp_ms = cor.get_or("ramp_ms", p.ramp_ms);
    p.hold_ms = cor.get_or("hold_ms", p.hold_ms);
    p.standby_w = cor.get_or("standby_w", p.standby_w);
    p.detection_lead_m = cor.get_or("detection_lead_m", p.detection_lead_m);
    p.r_th_c_per_kw = cor.get_or("r_th_c_per_kw", p.r_th_c_per_kw);
    p.tau_s = cor.get_or("tau_s", p.tau_s);
    p.derate_on_c = cor.get_or("derate_on_c", p.derate_on_c);
    p.derate_clear_c = cor.get_or("derate_clear_c", p.derate_clear_c);
    p.cutoff_c = cor.get_or("cutoff_c", p.cutoff_c);
    p.cutoff_clear_c = cor.get_or("cutoff_clear_c", p.cutoff_clear_c);
    auto& road = sc.corridor.road;
    road.ambient_mean_c = cor.get_or("ambient_mean_c", road.ambient_mean_c);
    road.ambient_amplitude_c =
        cor.get_or("ambient_amplitude_c", road.ambient_amplitude_c);
    road.friction = cor.get_or("friction", road.friction);
    road.precipitation = cor.get_or("precipitation", road.precipitation);
    cor.finish();
    check(sc.corridor.length_m >= 0.0, "corridor.length_m must be >= 0");
    check(p.pitch_m > 0.0, "corridor.pitch_m must be > 0");
    check(p.coil_len_m >= 0.0, "corridor.coil_len_m must be >= 0");
    check(p.coil_len_m <= p.pitch_m, "corridor.coil_len_m must be <= pitch_m");
    check(p.rows == 1 || p.rows == 2, "corridor.rows must be 1 or 2");
    check(p.p_tx_kw_per_row >= 0.0, "corridor.p_tx_kw_per_row must be >= 0");
    check(p.ramp_ms > 0.0 && p.ramp_ms <= 200.0,
          "corridor.ramp_ms must be in (0, 200]");
    check(p.hold_ms > 0.0, "corridor.hold_ms must be > 0");
    check(p.standby_w >= 0.0, "corridor.standby_w must be >= 0");
    check(p.detection_lead_m >= 0.0, "corridor.detection_lead_m must be >= 0");
    check(p.tau_s > 0.0, "corridor.tau_s must be > 0");
    check(p.r_th_c_per_kw >= 0.0, "corridor.r_th_c_per_kw must be >= 0");
    check(p.derate_clear_c < p.derate_on_c,
          "corridor.derate_clear_c must be below derate_on_c");
    check(p.derate_on_c < p.cutoff_c, "corridor.derate_on_c must be below cutoff_c");
    check(p.cutoff_clear_c < p.cutoff_c,
          "corridor.cutoff_clear_c must be below cutoff_c");
    check(road.friction > 0.0 && road.friction <= 1.2,
          "corridor.friction must be in (0, 1.2]");
  }

  // --- traffic ---
  {
    Section tr = root.child("traffic");
    sc.traffic.mode = tr.get_or<std::string>("mode", "poisson");
    check(sc.traffic.mode == "poisson" || sc.traffic.mode == "scripted",
          "traffic.mode must be poisson or scripted");
    auto& arr = sc.traffic.arrivals;
    if (corridor_mode && sc.traffic.mode == "poisson") {
      arr.rate_veh_h = tr.require<double>("rate_veh_h");
    } else {
      arr.rate_veh_h = tr.get_or("rate_veh_h", 0.0);
    }
    if (const json* shape = tr.raw("hourly_shape")) {
      check(shape->is_array() && shape->size() == 24,
            "traffic.hourly_shape must be an array of 24 multipliers");
      for (const auto& v : *shape) {
        double m = v.get<double>();
        check(m >= 0.0, "traffic.hourly_shape entries must be >= 0");
        arr.hourly_shape.push_back(m);
      }
    }
    {
      Section mix = tr.child("mix");
      if (mix.present()) {
        for (int c = 0; c < kVehicleClassCount; ++c) {
          auto id = static_cast<VehicleClassId>(c);
          arr.mix[static_cast<std::size_t>(c)] =
              mix.get_or(vehicle_class_name(id), 0.0);
        }
      }
      mix.finish();
    }
    {
      Section classes = tr.child("classes");
      for (int c = 0; c < kVehicleClassCount; ++c) {
        auto id = static_cast<VehicleClassId>(c);
        arr.classes[static_cast<std::size_t>(c)] = default_class(id);
        Section cs = classes.child(vehicle_class_name(id));
        read_class(cs, arr.classes[static_cast<std::size_t>(c)]);
      }
      classes.finish();
    }
    arr.speed_min_kmh = tr.get_or("speed_min_kmh", arr.speed_min_kmh);
    arr.speed_max_kmh = tr.get_or("speed_max_kmh", arr.speed_max_kmh);
    arr.offset_sigma_m = tr.get_or("offset_sigma_m", arr.offset_sigma_m);
    arr.offset_trunc_m = tr.get_or("offset_trunc_m", arr.offset_trunc_m);
    arr.entry_soc_min = tr.get_or("entry_soc_min", arr.entry_soc_min);
    arr.entry_soc_max = tr.get_or("entry_soc_max", arr.entry_soc_max);
    arr.start_hour = sc.sim.start_hour;
    sc.traffic.motion.headway_s = tr.get_or("headway_s", 1.5);
    sc.traffic.motion.accel_ms2 = tr.get_or("accel_ms2", 2.0);
    sc.traffic.min_spawn_gap_m = tr.get_or("min_spawn_gap_m", 8.0);
    sc.traffic.scripted_class = tr.get_or<std::string>("scripted_class", "taxi");
    sc.traffic.speed_kmh = tr.get_or("speed_kmh", 50.0);
    sc.traffic.scripted_offset_m = tr.get_or("scripted_offset_m", 0.0);
    sc.traffic.scripted_entry_soc = tr.get_or("scripted_entry_soc", 0.50);
    sc.traffic.scripted_entry_time_s = tr.get_or("scripted_entry_time_s", 0.0);
    sc.traffic.scripted_count = tr.get_or("scripted_count", 1);
    sc.traffic.scripted_spacing_s = tr.get_or("scripted_spacing_s", 60.0);
    tr.finish();

    check(arr.rate_veh_h >= 0.0, "traffic.rate_veh_h must be >= 0");
    if (corridor_mode && sc.traffic.mode == "poisson") {
      double mix_sum = 0.0;
      for (double m : arr.mix) {
        check(m >= 0.0, "traffic.mix fractions must be >= 0");
        mix_sum += m;
      }
      check(std::abs(mix_sum - 1.0) <= 1e-9, "traffic.mix must sum to 1");
    }
    check(arr.speed_min_kmh > 0.0 && arr.speed_max_kmh >= arr.speed_min_kmh,
          "traffic speed band is invalid");
    check(arr.entry_soc_min >= 0.0 && arr.entry_soc_max <= 1.0 &&
              arr.entry_soc_min <= arr.entry_soc_max,
          "traffic entry SoC band is invalid");
    check(sc.traffic.motion.headway_s > 0.0, "traffic.headway_s must be > 0");
    check(sc.traffic.speed_kmh >= 0.0, "traffic.speed_kmh must be >= 0");
    check(sc.traffic.scripted_count >= 0, "traffic.scripted_count must be >= 0");
    class_id_from_name(sc.traffic.scripted_class);

    if (corridor_mode && sc.traffic.mode == "poisson") {
      double peak = arr.rate_veh_h;
      if (!arr.hourly_shape.empty()) {
        peak = 0.0;
        for (double m : arr.hourly_shape) peak = std::max(peak, arr.rate_veh_h * m);
      }
      if (peak < 500.0 || peak > 800.0) {
        sc.warnings.push_back(
            "traffic peak arrival rate " + std::to_string(peak) +
            " veh/h lies outside the studied 500-800 veh/h band");
      }
    }
  }

  // --- transfer ---
  {
    Section tf = root.child("transfer");
    sc.transfer.coverage = tf.get_or("coverage", sc.transfer.coverage);
    if (const json* nodes = tf.raw("eta_nodes")) {
      check(nodes->is_array() && nodes->size() >= 2,
            "transfer.eta_nodes must be an array of [speed, eta] pairs");
      sc.transfer.eta_nodes.clear();
      for (const auto& n : *nodes) {
        check(n.is_array() && n.size() == 2, "transfer.eta_nodes entries are pairs");
        sc.transfer.eta_nodes.emplace_back(n[0].get<double>(), n[1].get<double>());
      }
    }
    sc.transfer.duty_ref_kmh = tf.get_or("duty_ref_kmh", sc.transfer.duty_ref_kmh);
    sc.transfer.misalign_cutoff_m =
        tf.get_or("misalign_cutoff_m", sc.transfer.misalign_cutoff_m);
    tf.finish();
    sc.transfer.peak_power_kw =
        sc.corridor.params.p_tx_kw_per_row * sc.corridor.params.rows;
    sc.transfer.derate_start_c = sc.corridor.params.derate_on_c;
    sc.transfer.derate_full_c = sc.corridor.params.cutoff_c;
    check(sc.transfer.coverage > 0.0 && sc.transfer.coverage <= 1.0,
          "transfer.coverage must be in (0, 1]");
    check(sc.transfer.duty_ref_kmh > 0.0, "transfer.duty_ref_kmh must be > 0");
    check(sc.transfer.misalign_cutoff_m > 0.0,
          "transfer.misalign_cutoff_m must be > 0");
    for (std::size_t i = 0; i < sc.transfer.eta_nodes.size(); ++i) {
      auto [v, eta] = sc.transfer.eta_nodes[i];
      check(eta > 0.0 && eta < 1.0, "transfer efficiency values must be in (0, 1)");
      if (i > 0) {
        check(v > sc.transfer.eta_nodes[i - 1].first,
              "transfer.eta_nodes speeds must be strictly increasing");
      }
    }
  }

  // --- energy ---
  {
    Section en = root.child("energy");
    sc.energy.pv_area_m2 = en.get_or("pv_area_m2", 0.0);
    sc.energy.pv_efficiency = en.get_or("pv_efficiency", 0.20);
    sc.energy.solar.annual_kwh_m2 =
        en.get_or("annual_irradiance_kwh_m2", sc.energy.solar.annual_kwh_m2);
    sc.energy.solar.daylength_amplitude_h =
        en.get_or("daylength_amplitude_h", sc.energy.solar.daylength_amplitude_h);
    sc.energy.grid_capacity_kw = en.get_or("grid_capacity_kw", 5000.0);
    sc.energy.offpeak_start_h = en.get_or("offpeak_start_h", 22.0);
    sc.energy.offpeak_end_h = en.get_or("offpeak_end_h", 6.0);
    sc.energy.v2g_bus_count = en.get_or("v2g_bus_count", 0);
    sc.energy.v2g_per_bus_kw = en.get_or("v2g_per_bus_kw", 50.0);
    if (const json* w = en.raw("v2g_windows")) {
      check(w->is_array(), "energy.v2g_windows must be an array of [start, end]");
      for (const auto& e : *w) {
        check(e.is_array() && e.size() == 2, "v2g window entries are [start, end]");
        sc.energy.v2g_windows.push_back({e[0].get<double>(), e[1].get<double>()});
      }
    }
    {
      Section buf = en.child("buffer");
      auto& b = sc.energy.buffer;
      b.capacity_kwh = buf.get_or("capacity_kwh", 0.0);
      b.stored_kwh = buf.get_or("initial_kwh", 0.0);
      b.max_charge_kw = buf.get_or("max_charge_kw", 0.0);
      b.max_discharge_kw = buf.get_or("max_discharge_kw", 0.0);
      b.round_trip_eff = buf.get_or("round_trip_eff", 0.90);
      buf.finish();
      check(b.capacity_kwh >= 0.0 && b.stored_kwh >= 0.0 &&
                b.stored_kwh <= std::max(b.capacity_kwh, 0.0),
            "energy.buffer stored/capacity invalid");
      check(b.max_charge_kw >= 0.0 && b.max_discharge_kw >= 0.0,
            "energy.buffer rates must be >= 0");
      check(b.round_trip_eff > 0.0 && b.round_trip_eff <= 1.0,
            "energy.buffer.round_trip_eff must be in (0, 1]");
    }
    sc.energy.shedding_enabled = en.get_or("shedding_enabled", true);
    sc.energy.grid.capacity_kw = sc.energy.grid_capacity_kw;
    sc.energy.grid.droop_freq = en.get_or("droop_freq", 0.04);
    sc.energy.grid.droop_volt = en.get_or("droop_volt", 0.03);
    sc.energy.grid.shed_trigger_dev = en.get_or("shed_trigger_dev", 0.012);
    en.finish();
    check(sc.energy.pv_area_m2 >= 0.0, "energy.pv_area_m2 must be >= 0");
    check(sc.energy.pv_efficiency >= 0.0 && sc.energy.pv_efficiency <= 1.0,
          "energy.pv_efficiency must be in [0, 1]");
    check(sc.energy.grid_capacity_kw > 0.0, "energy.grid_capacity_kw must be > 0");
    check(sc.energy.v2g_bus_count >= 0, "energy.v2g_bus_count must be >= 0");
    check(sc.energy.v2g_per_bus_kw >= 0.0 && sc.energy.v2g_per_bus_kw <= 50.0,
          "energy.v2g_per_bus_kw must be in [0, 50]");
    check(sc.energy.grid.droop_freq > 0.0 && sc.energy.grid.droop_volt > 0.0,
          "droop constants must be > 0");
    check(sc.energy.grid.shed_trigger_dev > 0.0 &&
              sc.energy.grid.shed_trigger_dev < 0.015,
          "energy.shed_trigger_dev must leave margin below 1.5%");
  }

  // --- econ ---
  {
    Section ec = root.child("econ");
    auto& f = sc.econ;
    f.capex_per_km = ec.get_or("capex_per_km", f.capex_per_km);
    f.opex_fraction_per_yr = ec.get_or("opex_fraction_per_yr", f.opex_fraction_per_yr);
    f.tariff_per_kwh = ec.get_or("tariff_per_kwh", f.tariff_per_kwh);
    f.cost_solar = ec.get_or("cost_solar", f.cost_solar);
    f.cost_grid_offpeak = ec.get_or("cost_grid_offpeak", f.cost_grid_offpeak);
    f.cost_grid_peak = ec.get_or("cost_grid_peak", f.cost_grid_peak);
    f.cost_v2g = ec.get_or("cost_v2g", f.cost_v2g);
    f.emission_factor_kg_per_km =
        ec.get_or("emission_factor_kg_per_km", f.emission_factor_kg_per_km);
    f.energy_savings_kwh_per_km =
        ec.get_or("energy_savings_kwh_per_km", f.energy_savings_kwh_per_km);
    f.horizon_years = ec.get_or("horizon_years", f.horizon_years);
    f.currency = ec.get_or<std::string>("currency", f.currency);
    f.fx_usd_inr = ec.get_or("fx_usd_inr", f.fx_usd_inr);
    f.days_per_year = ec.get_or("days_per_year", f.days_per_year);
    ec.finish();
    check(f.capex_per_km >= 0.0, "econ.capex_per_km must be >= 0");
    check(f.opex_fraction_per_yr >= 0.0 && f.opex_fraction_per_yr <= 0.2,
          "econ.opex_fraction_per_yr must be in [0, 0.2]");
    check(f.horizon_years >= 1, "econ.horizon_years must be >= 1");
    check(f.tariff_per_kwh >= 0.0, "econ.tariff_per_kwh must be >= 0");
    check(f.fx_usd_inr > 0.0, "econ.fx_usd_inr must be > 0");
    check(f.currency == "USD" || f.currency == "INR",
          "econ.currency must be USD or INR");
    check(f.days_per_year > 0, "econ.days_per_year must be > 0");
  }

  // --- v2i ---
  {
    Section v = root.child("v2i");
    sc.v2i.latency_ms = v.get_or("latency_ms", 20.0);
    sc.v2i.zone_m = v.get_or("zone_m", 500.0);
    sc.v2i.window_s = v.get_or("window_s", 60.0);
    sc.v2i.anomaly.mismatch_abs_kwh = v.get_or("mismatch_abs_kwh", 0.01);
    sc.v2i.anomaly.mismatch_rel = v.get_or("mismatch_rel", 0.01);
    sc.v2i.anomaly.maintenance_drop = v.get_or("maintenance_drop", 0.05);
    sc.v2i.anomaly.maintenance_windows = v.get_or("maintenance_windows", 3);
    sc.v2i.tariff_id = v.get_or<std::string>("tariff_id", "std");
    v.finish();
    check(sc.v2i.latency_ms >= 1.0 && sc.v2i.latency_ms <= 100.0,
          "v2i.latency_ms must be in [1, 100]");
    check(sc.v2i.zone_m > 0.0, "v2i.zone_m must be > 0");
    check(sc.v2i.window_s > 0.0, "v2i.window_s must be > 0");
  }

  // --- wear ---
  {
    Section w = root.child("wear");
    sc.wear.f0 = w.get_or("f0", sc.wear.f0);
    sc.wear.alpha = w.get_or("alpha", sc.wear.alpha);
    sc.wear.deep_discharge_soc = w.get_or("deep_discharge_soc", 0.30);
    sc.wear.taper_start_soc = w.get_or("taper_start_soc", 0.85);
    sc.wear.ceiling_soc = w.get_or("ceiling_soc", 0.90);
    w.finish();
    check(sc.wear.f0 >= 0.0 && sc.wear.alpha > 0.0, "wear constants invalid");
    check(sc.wear.taper_start_soc < sc.wear.ceiling_soc &&
              sc.wear.ceiling_soc <= 1.0,
          "wear taper band invalid");
  }

  // --- battery profile ---
  {
    Section b = root.child("battery");
    sc.battery.profile = b.get_or<std::string>("profile", "static-fast-charge");
    auto& p = sc.battery.params;
    bool ers_style = sc.battery.profile == "ers-dynamic";
    p = ers_style ? ers_dynamic_profile() : static_fast_charge_profile();
    p.capacity_kwh = b.get_or("capacity_kwh", p.capacity_kwh);
    p.consumption_kwh_km = b.get_or("consumption_kwh_km", p.consumption_kwh_km);
    p.daily_km = b.get_or("daily_km", p.daily_km);
    p.pack_temp_c = b.get_or("pack_temp_c", p.pack_temp_c);
    p.charge_trigger_soc = b.get_or("charge_trigger_soc", p.charge_trigger_soc);
    p.charge_to_soc = b.get_or("charge_to_soc", p.charge_to_soc);
    p.band_low_soc = b.get_or("band_low_soc", p.band_low_soc);
    p.band_high_soc = b.get_or("band_high_soc", p.band_high_soc);
    p.deep_floor_soc = b.get_or("deep_floor_soc", p.deep_floor_soc);
    p.deep_trips_per_year = b.get_or("deep_trips_per_year", p.deep_trips_per_year);
    b.finish();
    if (sc.sim.mode == "battery_profile") {
      check(sc.battery.profile == "static-fast-charge" ||
                sc.battery.profile == "ers-dynamic",
            "battery.profile must be static-fast-charge or ers-dynamic");
    }
    check(p.capacity_kwh > 0.0 && p.consumption_kwh_km > 0.0 && p.daily_km >= 0.0,
          "battery profile parameters must be positive");
  }

  // --- faults ---
  if (const json* fl = root.raw("faults")) {
    check(fl->is_array(), "faults must be an array");
    for (const auto& e : *fl) {
      Section fs(&e, "faults[].");
      FaultSpec f;
      f.type = fs.require<std::string>("type");
      check(f.type == "fault" || f.type == "reset" || f.type == "efficiency" ||
                f.type == "theft",
            "fault type must be fault|reset|efficiency|theft");
      f.segment = fs.require<int>("segment");
      f.t_s = fs.require<double>("t_s");
      f.duration_s = fs.get_or("duration_s", 0.0);
      f.factor = fs.get_or("factor", 1.0);
      f.kwh = fs.get_or("kwh", 0.0);
      fs.finish();
      check(f.segment >= 0 && f.t_s >= 0.0 && f.duration_s >= 0.0 &&
                f.factor >= 0.0 && f.kwh >= 0.0,
            "fault fields must be non-negative");
      sc.faults.push_back(f);
    }
  }

  // --- instrument ---
  {
    Section in = root.child("instrument");
    if (in.present()) {
      sc.instrument.enabled = true;
      sc.instrument.start_m = in.require<double>("start_m");
      sc.instrument.end_m = in.require<double>("end_m");
      check(sc.instrument.end_m > sc.instrument.start_m,
            "instrument window must be non-empty");
    }
    in.finish();
  }

  root.finish();

  sc.digest = sha256_hex(doc.dump());
  return sc;
}

Scenario load_scenario(const std::string& config_text) {
  json doc = json::parse(config_text, nullptr, false);
  if (doc.is_discarded()) {
    throw SimError(ErrorCode::ParseError, "scenario document is not valid JSON");
  }
  return scenario_from_json(doc);
}

} // namespace ers
