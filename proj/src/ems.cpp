#include "ers/ems.hpp"

#include "ers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ers {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double solar_daylength_h(const SolarParams& p, int day_of_year) {
  return p.daylength_mean_h +
         p.daylength_amplitude_h *
             std::sin(2.0 * kPi * (day_of_year - p.equinox_day) / 365.0);
}

double solar_peak_kw_m2(const SolarParams& p) {
  // Annual integral of the half-sine day profile is peak * (2/pi) * daylength
  // per day; the sinusoidal daylength term sums to zero over a full year.
  double annual_hours = (2.0 / kPi) * 365.0 * p.daylength_mean_h;
  return p.annual_kwh_m2 / annual_hours;
}

double solar_irradiance_kw_m2(const SolarParams& p, double tod_s,
                              int day_of_year) {
  double daylength = solar_daylength_h(p, day_of_year);
  double sunrise = 12.0 - daylength / 2.0;
  double h = tod_s / 3600.0 - sunrise;
  if (h <= 0.0 || h >= daylength) return 0.0;
  return solar_peak_kw_m2(p) * std::sin(kPi * h / daylength);
}

double solar_available_kw(const SolarParams& p, double tod_s, int day_of_year,
                          double area_m2, double efficiency) {
  return solar_irradiance_kw_m2(p, tod_s, day_of_year) * area_m2 * efficiency;
}

// ---------------------------------------------------------------------------

Forecast forecast_demand(const std::vector<double>& hist, int horizon_h,
                         const ForecastParams& p) {
  const int season = p.season_h;
  if (static_cast<int>(hist.size()) < 2 * season) {
    throw SimError(ErrorCode::InsufficientHistory,
                   "need at least 48 h of hourly history");
  }
  // Per-hour-of-day exponential smoothing over the history.
  std::vector<double> s(static_cast<std::size_t>(season), 0.0);
  std::vector<bool> seeded(static_cast<std::size_t>(season), false);
  for (std::size_t t = 0; t < hist.size(); ++t) {
    std::size_t hod = t % static_cast<std::size_t>(season);
    if (!seeded[hod]) {
      s[hod] = hist[t];
      seeded[hod] = true;
    } else {
      s[hod] += p.smoothing_alpha * (hist[t] - s[hod]);
    }
  }
  Forecast f;
  f.values_kw.reserve(static_cast<std::size_t>(horizon_h));
  std::size_t origin = hist.size();
  for (int k = 0; k < horizon_h; ++k) {
    std::size_t t = origin + static_cast<std::size_t>(k);
    std::size_t hod = t % static_cast<std::size_t>(season);
    std::size_t lag = t - static_cast<std::size_t>(season);
    double seasonal = lag < hist.size()
                          ? hist[lag]
                          : f.values_kw[lag - hist.size()];
    double v = p.beta * seasonal + (1.0 - p.beta) * s[hod];
    f.values_kw.push_back(std::max(0.0, v));
  }
  return f;
}

double forecast_accuracy(Forecast& f, const std::vector<double>& realized_kw,
                         const ForecastParams& p) {
  std::size_t n = std::min(f.values_kw.size(), realized_kw.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, realized_kw[i]);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (realized_kw[i] < p.exclusion_frac * peak || realized_kw[i] <= 0.0) continue;
    sum += std::abs(f.values_kw[i] - realized_kw[i]) / realized_kw[i];
    ++count;
  }
  if (count == 0) {
    f.accuracy_defined = false;
    f.accuracy_pct = 0.0;
    return 0.0;
  }
  double mape = 100.0 * sum / static_cast<double>(count);
  f.accuracy_pct = std::clamp(100.0 - mape, 0.0, 100.0);
  f.accuracy_defined = true;
  return f.accuracy_pct;
}

// ---------------------------------------------------------------------------

SourceMix dispatch(double demand_kw, double solar_kw, BufferState& buffer,
                   double grid_offpeak_cap_kw, double grid_peak_cap_kw,
                   double v2g_kw, double dt_s) {
  SourceMix mix;
  double dt_h = dt_s / 3600.0;
  double rem = std::max(0.0, demand_kw);

  mix.solar = std::min(rem, std::max(0.0, solar_kw));
  rem -= mix.solar;

  if (rem > 0.0 && buffer.stored_kwh > 0.0 && dt_h > 0.0) {
    double out_cap = std::min(buffer.max_discharge_kw,
                              buffer.stored_kwh * buffer.round_trip_eff / dt_h);
    mix.buffer = std::min(rem, out_cap);
    buffer.stored_kwh -= mix.buffer * dt_h / buffer.round_trip_eff;
    if (buffer.stored_kwh < 0.0) buffer.stored_kwh = 0.0;
    rem -= mix.buffer;
  }

  mix.grid_offpeak = std::min(rem, std::max(0.0, grid_offpeak_cap_kw));
  rem -= mix.grid_offpeak;
  mix.grid_peak = std::min(rem, std::max(0.0, grid_peak_cap_kw));
  rem -= mix.grid_peak;
  mix.v2g = std::min(rem, std::max(0.0, v2g_kw));
  rem -= mix.v2g;
  mix.deficit = rem;

  double surplus = std::max(0.0, solar_kw) - mix.solar;
  if (surplus > 0.0 && dt_h > 0.0) {
    double room = std::max(0.0, buffer.capacity_kwh - buffer.stored_kwh);
    double charge = std::min({surplus, buffer.max_charge_kw, room / dt_h});
    buffer.stored_kwh += charge * dt_h;
    mix.solar_to_buffer = charge;
    mix.curtailed = surplus - charge;
  }
  return mix;
}

GridState update_grid(const GridParams& p, double supply_kw, double demand_kw) {
  GridState g;
  double imbalance = (demand_kw - supply_kw) / p.capacity_kw;
  g.freq_dev = -p.droop_freq * imbalance;
  g.volt_dev = -p.droop_volt * imbalance;
  return g;
}

ShedPlan shed_load(std::vector<ShedCandidate> candidates, double required_kw) {
  ShedPlan plan;
  if (required_kw <= 0.0) return plan;
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const ShedCandidate& a, const ShedCandidate& b) {
                     if (a.class_priority != b.class_priority) {
                       return a.class_priority < b.class_priority;
                     }
                     return a.segment_id < b.segment_id;
                   });
  for (const auto& c : candidates) {
    if (plan.shed_kw >= required_kw) break;
    plan.segments.push_back(c.segment_id);
    plan.shed_kw += c.potential_kw;
  }
  plan.insufficient = plan.shed_kw < required_kw;
  return plan;
}

} // namespace ers
