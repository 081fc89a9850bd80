#include "ers/traffic.hpp"

#include "ers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ers {

namespace {

// Piecewise-linear cumulative expected-arrival count over [0, duration].
struct RateIntegral {
  std::vector<double> edge_t;   // bin edges, seconds
  std::vector<double> cum;      // cumulative expected arrivals at each edge
  std::vector<double> rate;     // arrivals/s within each bin

  double total() const { return cum.back(); }

  // Smallest t with Lambda(t) = mark (mark < total()).
  double invert(double mark) const {
    auto it = std::upper_bound(cum.begin(), cum.end(), mark);
    std::size_t bin = static_cast<std::size_t>(it - cum.begin());
    if (bin == 0) bin = 1;
    if (bin >= cum.size()) bin = cum.size() - 1;
    std::size_t i = bin - 1;
    if (rate[i] <= 0.0) return edge_t[bin];
    return edge_t[i] + (mark - cum[i]) / rate[i];
  }
};

RateIntegral build_rate_integral(const ArrivalParams& p, double duration_s) {
  RateIntegral ri;
  ri.edge_t.push_back(0.0);
  ri.cum.push_back(0.0);
  if (p.hourly_shape.empty()) {
    ri.rate.push_back(p.rate_veh_h / 3600.0);
    ri.edge_t.push_back(duration_s);
    ri.cum.push_back(duration_s * p.rate_veh_h / 3600.0);
    return ri;
  }
  double t = 0.0;
  while (t < duration_s) {
    double hour = p.start_hour + t / 3600.0;
    int hod = static_cast<int>(std::floor(hour)) % 24;
    if (hod < 0) hod += 24;
    double bin_end = std::min(duration_s, (std::floor(hour) + 1.0 - p.start_hour) * 3600.0);
    if (bin_end <= t) bin_end = std::min(duration_s, t + 3600.0);
    double r = p.rate_veh_h * p.hourly_shape[static_cast<std::size_t>(hod) % p.hourly_shape.size()] / 3600.0;
    ri.rate.push_back(r);
    ri.edge_t.push_back(bin_end);
    ri.cum.push_back(ri.cum.back() + r * (bin_end - t));
    t = bin_end;
  }
  return ri;
}

VehicleClassId sample_class(double u, const std::array<double, kVehicleClassCount>& mix) {
  double acc = 0.0;
  for (int c = 0; c < kVehicleClassCount; ++c) {
    acc += mix[static_cast<std::size_t>(c)];
    if (u < acc) return static_cast<VehicleClassId>(c);
  }
  return static_cast<VehicleClassId>(kVehicleClassCount - 1);
}

} // namespace

std::vector<ArrivalSpec> generate_arrivals(const ArrivalParams& p,
                                           double duration_s,
                                           std::uint64_t seed) {
  double mix_sum = 0.0;
  for (double m : p.mix) {
    if (m < 0.0) throw SimError(ErrorCode::InvalidMix, "negative mix fraction");
    mix_sum += m;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    throw SimError(ErrorCode::InvalidMix, "class mix must sum to 1");
  }
  if (p.rate_veh_h < 0.0) {
    throw SimError(ErrorCode::InvalidValue, "arrival rate must be >= 0");
  }

  std::vector<ArrivalSpec> out;
  if (p.rate_veh_h == 0.0 || duration_s <= 0.0) return out;

  RateIntegral ri = build_rate_integral(p, duration_s);
  double mark = 0.0;
  for (std::uint64_t i = 0;; ++i) {
    mark += RngStream(seed, RngDomain::ArrivalGap, i).exponential(1.0);
    if (mark >= ri.total()) break;

    ArrivalSpec a;
    a.t_s = ri.invert(mark);
    a.cls = sample_class(RngStream(seed, RngDomain::VehicleClass, i).next_double(), p.mix);
    const auto& cp = p.classes[static_cast<std::size_t>(a.cls)];
    a.target_kmh = RngStream(seed, RngDomain::TargetSpeed, i)
                       .truncated_normal(cp.speed_mean_kmh, cp.speed_spread_kmh,
                                         p.speed_min_kmh, p.speed_max_kmh);
    a.offset_m = RngStream(seed, RngDomain::LateralOffset, i)
                     .truncated_normal(0.0, p.offset_sigma_m, -p.offset_trunc_m,
                                       p.offset_trunc_m);
    a.entry_soc = RngStream(seed, RngDomain::EntrySoc, i)
                      .uniform(p.entry_soc_min, p.entry_soc_max);
    out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------

double charge_acceptance(double soc, const WearParams& w) {
  if (soc <= w.taper_start_soc) return 1.0;
  if (soc >= w.ceiling_soc) return 0.0;
  return (w.ceiling_soc - soc) / (w.ceiling_soc - w.taper_start_soc);
}

double apply_charge(BatteryState& b, double capacity_kwh, double energy_kwh,
                    double charge_power_kw, const WearParams& w) {
  (void)charge_power_kw;
  if (energy_kwh < 0.0) {
    throw SimError(ErrorCode::NegativeEnergy, "charge energy must be >= 0");
  }
  if (energy_kwh == 0.0 || capacity_kwh <= 0.0) return 0.0;

  double remaining = energy_kwh;
  double accepted = 0.0;

  if (b.soc < w.taper_start_soc) {
    double room = (w.taper_start_soc - b.soc) * capacity_kwh;
    double take = std::min(remaining, room);
    b.soc += take / capacity_kwh;
    accepted += take;
    remaining -= take;
  }
  if (remaining > 0.0 && b.soc < w.ceiling_soc) {
    // In the taper band acceptance falls linearly with SoC, so SoC approaches
    // the ceiling exponentially in offered energy.
    double width = w.ceiling_soc - w.taper_start_soc;
    double gap = w.ceiling_soc - b.soc;
    double new_gap = gap * std::exp(-remaining / (width * capacity_kwh));
    accepted += (gap - new_gap) * capacity_kwh;
    b.soc = w.ceiling_soc - new_gap;
  }
  if (b.soc > w.ceiling_soc) b.soc = w.ceiling_soc;
  return accepted;
}

void wear_observe(BatteryState& b, double new_soc, double capacity_kwh,
                  double temp_c, const WearParams& w) {
  new_soc = std::clamp(new_soc, 0.0, 1.0);
  double prev = b.prev_soc;
  if (new_soc < prev) {
    if (b.direction >= 0) {
      b.excursion_peak_soc = prev;
      b.direction = -1;
    }
    if (prev >= w.deep_discharge_soc && new_soc < w.deep_discharge_soc) {
      b.deep_discharges += 1;
    }
    double delta = prev - new_soc;
    b.throughput_kwh += delta * capacity_kwh;
    b.efc += delta;
  } else if (new_soc > prev) {
    if (b.direction == -1) {
      double depth = b.excursion_peak_soc - prev;
      if (depth > 0.0) {
        double add = w.f0 * std::pow(depth, w.alpha) *
                     std::exp2((temp_c - 25.0) / 10.0);
        b.stress += add;
        b.health = std::max(0.0, b.health - add);
      }
    }
    b.direction = 1;
  }
  b.prev_soc = new_soc;
  b.soc = new_soc;
}

void wear_flush(BatteryState& b, double temp_c, const WearParams& w) {
  if (b.direction == -1) {
    double depth = b.excursion_peak_soc - b.prev_soc;
    if (depth > 0.0) {
      double add =
          w.f0 * std::pow(depth, w.alpha) * std::exp2((temp_c - 25.0) / 10.0);
      b.stress += add;
      b.health = std::max(0.0, b.health - add);
    }
  }
  b.direction = 0;
  b.excursion_peak_soc = b.prev_soc;
}

void update_battery_wear(BatteryState& b, std::span<const double> soc_trace,
                         double capacity_kwh, double mean_temp_c,
                         const WearParams& w) {
  for (double s : soc_trace) {
    wear_observe(b, s, capacity_kwh, mean_temp_c, w);
  }
  wear_flush(b, mean_temp_c, w);
}

// ---------------------------------------------------------------------------

DutyProfileParams static_fast_charge_profile() {
  DutyProfileParams p;
  p.daily_km = 198.2;
  p.pack_temp_c = 47.5;
  return p;
}

DutyProfileParams ers_dynamic_profile() {
  DutyProfileParams p;
  p.daily_km = 366.7;
  p.pack_temp_c = 34.0;
  return p;
}

namespace {

// True when day d (0-based) carries one of the evenly spread deep trips.
bool is_deep_day(int day, double deep_per_year) {
  auto count_before = [&](int d) {
    return static_cast<long long>(std::floor(d * deep_per_year / 365.0));
  };
  return count_before(day + 1) > count_before(day);
}

} // namespace

LifeEstimate estimate_battery_life(const DutyProfileParams& p, bool ers_style,
                                   const WearParams& w) {
  BatteryState b;
  battery_init(b, ers_style ? p.band_high_soc : p.charge_to_soc);
  b.temp_c = p.pack_temp_c;

  const double daily_kwh = p.daily_km * p.consumption_kwh_km;
  const int max_days = static_cast<int>(p.calendar_cap_years * 365.0);
  int day = 0;
  bool reached_eol = false;
  while (day < max_days && !reached_eol) {
    double remaining = daily_kwh;
    bool deep_pending = ers_style && is_deep_day(day, p.deep_trips_per_year);
    while (remaining > 1e-12) {
      double floor_soc = ers_style
                             ? (deep_pending ? p.deep_floor_soc : p.band_low_soc)
                             : p.charge_trigger_soc;
      double top_soc = ers_style ? p.band_high_soc : p.charge_to_soc;
      double leg_kwh = std::min(remaining, (b.soc - floor_soc) * p.capacity_kwh);
      if (leg_kwh > 0.0) {
        wear_observe(b, b.soc - leg_kwh / p.capacity_kwh, p.capacity_kwh,
                     p.pack_temp_c, w);
        remaining -= leg_kwh;
      }
      if (b.soc <= floor_soc + 1e-12) {
        // Recharge leg: fast charger for static, in-motion pickup for ERS.
        wear_observe(b, top_soc, p.capacity_kwh, p.pack_temp_c, w);
        deep_pending = false;
      } else {
        break; // day's driving finished mid-band
      }
    }
    if (ers_style && b.soc < p.band_high_soc - 1e-12) {
      // ERS vehicles end the day topped back to the band by in-motion charging.
      wear_observe(b, p.band_high_soc, p.capacity_kwh, p.pack_temp_c, w);
    }
    ++day;
    if (b.health <= p.end_of_life_health) reached_eol = true;
  }
  wear_flush(b, p.pack_temp_c, w);

  LifeEstimate e;
  double years = day / 365.0;
  e.calendar_capped = !reached_eol;
  e.years = e.calendar_capped ? p.calendar_cap_years : years;
  double denom_years = std::max(years, 1.0 / 365.0);
  e.deep_discharges_per_year = b.deep_discharges / denom_years;
  e.efc_per_year = b.efc / denom_years;
  e.final_health = b.health;
  return e;
}

LifeEstimate estimate_battery_life(const std::string& profile_id,
                                   const WearParams& w) {
  if (profile_id == "static-fast-charge") {
    return estimate_battery_life(static_fast_charge_profile(), false, w);
  }
  if (profile_id == "ers-dynamic") {
    return estimate_battery_life(ers_dynamic_profile(), true, w);
  }
  throw SimError(ErrorCode::UnknownProfile, profile_id);
}

LifeEstimate estimate_battery_life_from_daily_trace(
    std::span<const double> day_trace, double capacity_kwh, double temp_c,
    const WearParams& w) {
  DutyProfileParams defaults;
  BatteryState b;
  battery_init(b, day_trace.empty() ? 0.5 : day_trace.front());
  const int max_days = static_cast<int>(defaults.calendar_cap_years * 365.0);
  int day = 0;
  for (; day < max_days; ++day) {
    for (double s : day_trace) wear_observe(b, s, capacity_kwh, temp_c, w);
    if (b.health <= defaults.end_of_life_health) {
      ++day;
      break;
    }
  }
  LifeEstimate e;
  double years = day / 365.0;
  e.calendar_capped = b.health > defaults.end_of_life_health;
  e.years = e.calendar_capped ? defaults.calendar_cap_years : years;
  double denom_years = std::max(years, 1.0 / 365.0);
  e.deep_discharges_per_year = b.deep_discharges / denom_years;
  e.efc_per_year = b.efc / denom_years;
  e.final_health = b.health;
  return e;
}

// ---------------------------------------------------------------------------

void advance_vehicle(VehicleMotion& v, double dt_s, double gap_m,
                     double leader_speed_kmh, const MotionParams& p) {
  (void)leader_speed_kmh; // the minimal rule depends on the gap alone
  double headway_limit_kmh =
      gap_m < 0.0 ? 0.0 : std::max(0.0, gap_m / p.headway_s) * 3.6;
  double target = v.target_kmh * p.speed_factor;
  double limit = std::min(target, headway_limit_kmh);
  if (limit < v.speed_kmh) {
    v.speed_kmh = limit;
  } else {
    v.speed_kmh = std::min(limit, v.speed_kmh + p.accel_ms2 * 3.6 * dt_s);
  }
  if (v.speed_kmh < 0.0) v.speed_kmh = 0.0;
  v.pos_m += v.speed_kmh / 3.6 * dt_s;
}

} // namespace ers
