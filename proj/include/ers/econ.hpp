#pragma once

#include <optional>
#include <string>

namespace ers {

struct FinancialConfig {
  double capex_per_km = 1.8e6;
  double opex_fraction_per_yr = 0.02; // of capex
  double tariff_per_kwh = 0.089;      // charged to vehicles
  // Per-source supply costs, same currency as the tariff.
  double cost_solar = 0.030;
  double cost_grid_offpeak = 0.055;
  double cost_grid_peak = 0.085;
  double cost_v2g = 0.075;
  double emission_factor_kg_per_km = 0.5023;
  double energy_savings_kwh_per_km = 0.1492; // avoided fossil-equivalent energy
  int horizon_years = 10;
  std::string currency = "USD";
  double fx_usd_inr = 83.0;
  int days_per_year = 365;
};

/// vehicle_km * factor / 1000, tonnes per year.
double co2_savings_tonnes(double vehicle_km_per_year, double factor_kg_per_km);

/// Smallest (fractional) year at which cumulative revenue minus energy cost
/// minus opex reaches capex; empty when the annual margin is not positive.
std::optional<double> breakeven_year(double capex, double annual_opex,
                                     double annual_revenue,
                                     double annual_energy_cost);

/// Consumption times blended supply cost.
double cost_per_vehicle_km(double consumption_kwh_per_km,
                           double blended_cost_per_kwh);

/// Energy supplied by source over a run, kWh. Deficit is over-capacity grid
/// draw and is costed at the peak rate.
struct SuppliedEnergy {
  double solar_kwh = 0.0; // total solar production used or buffered
  double grid_offpeak_kwh = 0.0;
  double grid_peak_kwh = 0.0;
  double deficit_kwh = 0.0;
  double v2g_kwh = 0.0;
};

struct FinancialReport {
  std::string currency;
  double capex = 0.0;
  double annual_opex = 0.0;
  double annual_revenue = 0.0;
  double annual_energy_cost = 0.0;
  double annual_kwh_sold = 0.0;
  double blended_cost_per_kwh = 0.0;
  double margin_per_kwh = 0.0;
  std::optional<double> breakeven_years;
  double cost_per_vehicle_km = 0.0;
  double cost_per_vehicle_km_inr = 0.0;
  double annual_vehicle_km = 0.0;
  double co2_tonnes = 0.0;
  double energy_savings_gwh = 0.0;
};

/// Annualizes one simulated run: totals scale by (seconds per year) /
/// (run duration). mean_consumption is the fleet-weighted kWh/km used for the
/// per-km cost figure.
FinancialReport financial_report(const FinancialConfig& cfg, double corridor_km,
                                 double run_duration_s, double kwh_sold_run,
                                 double vehicle_km_run,
                                 const SuppliedEnergy& supplied_run,
                                 double mean_consumption_kwh_per_km);

} // namespace ers
