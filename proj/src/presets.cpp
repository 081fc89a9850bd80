#include "ers/scenario.hpp"

#include "ers/errors.hpp"

namespace ers {

namespace {

using nlohmann::ordered_json;

// Double-peak urban diurnal profile; multipliers sum to 24 so the base rate
// is also the daily mean.
ordered_json delhi_shape() {
  return ordered_json::array({0.3, 0.2, 0.2, 0.2, 0.3, 0.5, 1.0, 1.6,
                              1.9, 1.7, 1.3, 1.1, 1.0, 1.0, 1.1, 1.4,
                              1.7, 1.9, 1.8, 1.5, 1.0, 0.5, 0.5, 0.3});
}

ordered_json baseline_5km() {
  ordered_json j;
  j["sim"] = {{"duration_s", 86400}, {"control_dt_ms", 100}, {"seed", 42},
              {"day_of_year", 80}};
  j["corridor"] = {{"length_m", 5000}};
  j["traffic"] = {{"rate_veh_h", 600},
                  {"mix", {{"bus", 0.05}, {"taxi", 0.40}, {"delivery_van", 0.20},
                           {"private_car", 0.35}}},
                  {"entry_soc_min", 0.30}, {"entry_soc_max", 0.80}};
  j["energy"] = {{"pv_area_m2", 30000},
                 {"pv_efficiency", 0.20},
                 {"grid_capacity_kw", 9000},
                 {"buffer", {{"capacity_kwh", 6000}, {"max_charge_kw", 3000},
                             {"max_discharge_kw", 2500}, {"round_trip_eff", 0.9}}}};
  j["econ"] = {{"capex_per_km", 1.8e6}, {"opex_fraction_per_yr", 0.02},
               {"tariff_per_kwh", 0.118}, {"currency", "USD"}};
  j["v2i"] = {{"zone_m", 500}};
  return j;
}

ordered_json delhi_ring_road() {
  ordered_json j;
  j["sim"] = {{"duration_s", 86400}, {"control_dt_ms", 100}, {"seed", 7},
              {"day_of_year", 80}};
  j["corridor"] = {{"length_m", 18000}, {"ambient_mean_c", 28},
                   {"ambient_amplitude_c", 7}};
  j["traffic"] = {{"rate_veh_h", 416.667},
                  {"hourly_shape", delhi_shape()},
                  {"mix", {{"bus", 0.06}, {"taxi", 0.44}, {"delivery_van", 0.25},
                           {"private_car", 0.25}}},
                  {"entry_soc_min", 0.30}, {"entry_soc_max", 0.75}};
  j["energy"] = {{"pv_area_m2", 112000},
                 {"pv_efficiency", 0.20},
                 {"annual_irradiance_kwh_m2", 2200},
                 {"grid_capacity_kw", 9000},
                 {"v2g_bus_count", 150},
                 {"v2g_per_bus_kw", 50},
                 {"v2g_windows", {ordered_json::array({11, 16}),
                                  ordered_json::array({19, 24})}},
                 {"buffer", {{"capacity_kwh", 45000}, {"max_charge_kw", 12000},
                             {"max_discharge_kw", 8000}, {"round_trip_eff", 0.9}}}};
  j["econ"] = {{"capex_per_km", 1.494e8}, {"opex_fraction_per_yr", 0.02},
               {"tariff_per_kwh", 8.0}, {"currency", "INR"},
               {"cost_solar", 2.5}, {"cost_grid_offpeak", 4.5},
               {"cost_grid_peak", 7.0}, {"cost_v2g", 6.0},
               {"emission_factor_kg_per_km", 0.5023},
               {"energy_savings_kwh_per_km", 0.1492}};
  j["v2i"] = {{"zone_m", 3000}};
  return j;
}

ordered_json phase1() {
  ordered_json j;
  j["sim"] = {{"duration_s", 3600}, {"control_dt_ms", 100}, {"seed", 1}};
  j["corridor"] = {{"length_m", 1000}};
  j["traffic"] = {{"rate_veh_h", 520},
                  {"mix", {{"bus", 0.10}, {"taxi", 0.50}, {"delivery_van", 0.20},
                           {"private_car", 0.20}}}};
  // 50 kW solar microgrid: array sized so peak output is ~50 kW
  j["energy"] = {{"pv_area_m2", 317}, {"pv_efficiency", 0.20},
                 {"grid_capacity_kw", 2000}};
  j["econ"] = {{"capex_per_km", 1.75e8}, {"opex_fraction_per_yr", 0.02},
               {"tariff_per_kwh", 8.0}, {"currency", "INR"},
               {"cost_solar", 2.5}, {"cost_grid_offpeak", 4.5},
               {"cost_grid_peak", 7.0}, {"cost_v2g", 6.0}};
  return j;
}

ordered_json phase2() {
  ordered_json j;
  j["sim"] = {{"duration_s", 7200}, {"control_dt_ms", 100}, {"seed", 2}};
  j["corridor"] = {{"length_m", 7500}};
  j["traffic"] = {{"rate_veh_h", 650},
                  {"mix", {{"bus", 0.08}, {"taxi", 0.42}, {"delivery_van", 0.25},
                           {"private_car", 0.25}}}};
  j["energy"] = {{"pv_area_m2", 45000}, {"pv_efficiency", 0.20},
                 {"grid_capacity_kw", 10000},
                 {"buffer", {{"capacity_kwh", 10000}, {"max_charge_kw", 5000},
                             {"max_discharge_kw", 4000}, {"round_trip_eff", 0.9}}}};
  j["econ"] = {{"capex_per_km", 1.8e6}, {"opex_fraction_per_yr", 0.02},
               {"tariff_per_kwh", 0.118}, {"currency", "USD"}};
  return j;
}

ordered_json phase3() {
  ordered_json j;
  j["sim"] = {{"duration_s", 7200}, {"control_dt_ms", 100}, {"seed", 3}};
  j["corridor"] = {{"length_m", 26000}};
  j["traffic"] = {{"rate_veh_h", 700},
                  {"mix", {{"bus", 0.10}, {"taxi", 0.40}, {"delivery_van", 0.25},
                           {"private_car", 0.25}}}};
  j["energy"] = {{"pv_area_m2", 160000}, {"pv_efficiency", 0.20},
                 {"grid_capacity_kw", 20000},
                 {"v2g_bus_count", 300}, {"v2g_per_bus_kw", 50},
                 {"v2g_windows", {ordered_json::array({11, 16}),
                                  ordered_json::array({19, 24})}},
                 {"buffer", {{"capacity_kwh", 60000}, {"max_charge_kw", 20000},
                             {"max_discharge_kw", 15000}, {"round_trip_eff", 0.9}}}};
  j["econ"] = {{"capex_per_km", 1.8e6}, {"opex_fraction_per_yr", 0.02},
               {"tariff_per_kwh", 0.118}, {"currency", "USD"}};
  return j;
}

ordered_json battery_ref(bool ers_style) {
  ordered_json j;
  j["sim"] = {{"mode", "battery_profile"}};
  if (ers_style) {
    j["battery"] = {{"profile", "ers-dynamic"}};
  } else {
    j["battery"] = {{"profile", "static-fast-charge"}};
  }
  return j;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"baseline-5km", "delhi-ring-road", "phase1",           "phase2",
          "phase3",       "battery-static-ref", "battery-ers-ref"};
}

std::string preset_document(const std::string& name) {
  ordered_json j;
  if (name == "baseline-5km") {
    j = baseline_5km();
  } else if (name == "delhi-ring-road") {
    j = delhi_ring_road();
  } else if (name == "phase1") {
    j = phase1();
  } else if (name == "phase2") {
    j = phase2();
  } else if (name == "phase3") {
    j = phase3();
  } else if (name == "battery-static-ref") {
    j = battery_ref(false);
  } else if (name == "battery-ers-ref") {
    j = battery_ref(true);
  } else {
    throw SimError(ErrorCode::InvalidValue, "unknown preset: " + name);
  }
  return j.dump(2) + "\n";
}

} // namespace ers
