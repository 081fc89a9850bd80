#include "ers/econ.hpp"

namespace ers {

double co2_savings_tonnes(double vehicle_km_per_year, double factor_kg_per_km) {
  return vehicle_km_per_year * factor_kg_per_km / 1000.0;
}

std::optional<double> breakeven_year(double capex, double annual_opex,
                                     double annual_revenue,
                                     double annual_energy_cost) {
  double annual_net = annual_revenue - annual_energy_cost - annual_opex;
  if (annual_net <= 0.0) return std::nullopt;
  if (capex <= 0.0) return 0.0;
  // Uniform annual cash flow: linear interpolation within the year is exact.
  return capex / annual_net;
}

double cost_per_vehicle_km(double consumption_kwh_per_km,
                           double blended_cost_per_kwh) {
  return consumption_kwh_per_km * blended_cost_per_kwh;
}

FinancialReport financial_report(const FinancialConfig& cfg, double corridor_km,
                                 double run_duration_s, double kwh_sold_run,
                                 double vehicle_km_run,
                                 const SuppliedEnergy& supplied_run,
                                 double mean_consumption_kwh_per_km) {
  FinancialReport r;
  r.currency = cfg.currency;
  r.capex = cfg.capex_per_km * corridor_km;
  r.annual_opex = r.capex * cfg.opex_fraction_per_yr;

  double seconds_per_year = cfg.days_per_year * 86400.0;
  double scale = run_duration_s > 0.0 ? seconds_per_year / run_duration_s : 0.0;

  r.annual_kwh_sold = kwh_sold_run * scale;
  r.annual_vehicle_km = vehicle_km_run * scale;
  r.annual_revenue = r.annual_kwh_sold * cfg.tariff_per_kwh;

  double supplied_kwh = supplied_run.solar_kwh + supplied_run.grid_offpeak_kwh +
                        supplied_run.grid_peak_kwh + supplied_run.deficit_kwh +
                        supplied_run.v2g_kwh;
  double cost_run = supplied_run.solar_kwh * cfg.cost_solar +
                    supplied_run.grid_offpeak_kwh * cfg.cost_grid_offpeak +
                    (supplied_run.grid_peak_kwh + supplied_run.deficit_kwh) *
                        cfg.cost_grid_peak +
                    supplied_run.v2g_kwh * cfg.cost_v2g;
  r.blended_cost_per_kwh = supplied_kwh > 0.0 ? cost_run / supplied_kwh : 0.0;
  r.annual_energy_cost = cost_run * scale;

  r.margin_per_kwh = r.annual_kwh_sold > 0.0
                         ? (r.annual_revenue - r.annual_energy_cost) / r.annual_kwh_sold
                         : 0.0;
  r.breakeven_years = breakeven_year(r.capex, r.annual_opex, r.annual_revenue,
                                     r.annual_energy_cost);

  r.cost_per_vehicle_km =
      cost_per_vehicle_km(mean_consumption_kwh_per_km, r.blended_cost_per_kwh);
  r.cost_per_vehicle_km_inr = cfg.currency == "INR"
                                  ? r.cost_per_vehicle_km
                                  : r.cost_per_vehicle_km * cfg.fx_usd_inr;

  r.co2_tonnes =
      co2_savings_tonnes(r.annual_vehicle_km, cfg.emission_factor_kg_per_km);
  r.energy_savings_gwh =
      r.annual_vehicle_km * cfg.energy_savings_kwh_per_km / 1e6;
  return r;
}

} // namespace ers
