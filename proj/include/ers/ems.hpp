#pragma once

#include <cstdint>
#include <vector>

namespace ers {

// ---------------------------------------------------------------------------
// Solar availability

struct SolarParams {
  double annual_kwh_m2 = 2200.0; // plane-of-array annual target
  double daylength_mean_h = 12.0;
  double daylength_amplitude_h = 1.9;
  int equinox_day = 80; // daylength crosses the mean here, maximum ~91 days later
};

/// Daylength for a given day of year (0-based), hours.
double solar_daylength_h(const SolarParams& p, int day_of_year);

/// Peak plane-of-array irradiance (kW/m2) that makes the annual integral of
/// the half-sine profile equal the annual target exactly.
double solar_peak_kw_m2(const SolarParams& p);

/// Irradiance at a time of day (seconds past midnight, solar noon at 12:00).
double solar_irradiance_kw_m2(const SolarParams& p, double tod_s, int day_of_year);

/// PV output for a given array.
double solar_available_kw(const SolarParams& p, double tod_s, int day_of_year,
                          double area_m2, double efficiency);

// ---------------------------------------------------------------------------
// Demand forecasting

struct ForecastParams {
  double beta = 0.6;            // weight on the seasonal-naive term
  double smoothing_alpha = 0.3; // per-hour-of-day exponential smoothing
  int season_h = 24;
  double exclusion_frac = 0.01; // hours below this fraction of peak are skipped
};

struct Forecast {
  std::vector<double> values_kw;
  double accuracy_pct = 0.0; // 100 - MAPE, set by forecast_accuracy
  bool accuracy_defined = false;
};

/// Baseline predictor: y_hat(t) = beta * y(t - 24h) + (1 - beta) * s(t), where
/// s is an exponentially smoothed value per hour-of-day. Requires >= 48 h of
/// hourly history (throws INSUFFICIENT_HISTORY).
Forecast forecast_demand(const std::vector<double>& hourly_history_kw,
                         int horizon_h, const ForecastParams& p);

/// 100 - MAPE over the overlapping window, excluding hours whose realized
/// demand is below exclusion_frac of the window's realized peak. Clamped to
/// [0, 100]; accuracy_defined is false when nothing was evaluable.
double forecast_accuracy(Forecast& f, const std::vector<double>& realized_kw,
                         const ForecastParams& p);

// ---------------------------------------------------------------------------
// Dispatch

struct BufferState {
  double capacity_kwh = 0.0;
  double stored_kwh = 0.0; // measured as charged (input side)
  double max_charge_kw = 0.0;
  double max_discharge_kw = 0.0;
  double round_trip_eff = 0.90; // applied on discharge
};

/// Instantaneous source mix for one control interval, all kW.
struct SourceMix {
  double solar = 0.0; // solar serving demand
  double buffer = 0.0;
  double grid_offpeak = 0.0;
  double grid_peak = 0.0;
  double v2g = 0.0;
  double deficit = 0.0;         // unmet by dispatchable sources (grid over-draw)
  double solar_to_buffer = 0.0; // surplus absorbed by the buffer
  double curtailed = 0.0;       // surplus solar lost

  double supplied() const {
    return solar + buffer + grid_offpeak + grid_peak + v2g;
  }
};

/// Merit order: solar, buffer discharge, off-peak grid, peak grid, V2G.
/// Surplus solar charges the buffer, then is curtailed. Mutates the buffer.
SourceMix dispatch(double demand_kw, double solar_kw, BufferState& buffer,
                   double grid_offpeak_cap_kw, double grid_peak_cap_kw,
                   double v2g_kw, double dt_s);

// ---------------------------------------------------------------------------
// Grid state

struct GridParams {
  double nominal_hz = 50.0;
  double capacity_kw = 5000.0;
  double droop_freq = 0.04;
  double droop_volt = 0.03;
  double shed_trigger_dev = 0.012; // shedding engages before the 1.5% bound
};

struct GridState {
  double freq_dev = 0.0; // fraction of nominal
  double volt_dev = 0.0;
  double shed_kw = 0.0;
};

/// Droop relation: deviation = -droop * (demand - supply) / capacity.
/// Reporting-only; no dynamics.
GridState update_grid(const GridParams& p, double supply_kw, double demand_kw);

// ---------------------------------------------------------------------------
// Load shedding

struct ShedCandidate {
  int segment_id = 0;
  int class_priority = 0; // lower sheds first (private cars = 0, buses = 3)
  double potential_kw = 0.0;
};

struct ShedPlan {
  std::vector<int> segments;
  double shed_kw = 0.0;
  bool insufficient = false;
};

/// Picks segments in (priority, segment id) order until shed >= required.
ShedPlan shed_load(std::vector<ShedCandidate> candidates, double required_kw);

} // namespace ers
