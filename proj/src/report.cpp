#include "ers/report.hpp"

#include "ers/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ers {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw SimError(ErrorCode::InvalidValue, "cannot open " + p.string());
  }
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

ordered_json build_summary(const Scenario& sc, const SimulationResult& r) {
  const auto& a = r.agg;
  ordered_json j;
  j["run"] = {{"seed", r.seed},
              {"mode", sc.sim.mode},
              {"duration_s", sc.sim.duration_s},
              {"control_dt_ms", sc.sim.control_dt_ms},
              {"scenario_digest", r.scenario_digest},
              {"warnings", r.warnings}};

  if (a.battery_mode) {
    j["traffic"] = {
        {"battery_profile", sc.battery.profile},
        {"life_years", a.life.years},
        {"deep_discharges_per_year", a.life.deep_discharges_per_year},
        {"efc_per_year", a.life.efc_per_year},
        {"final_health", a.life.final_health},
        {"calendar_capped", a.life.calendar_capped}};
    return j;
  }

  j["engine"] = {{"steps", a.steps},
                 {"events", a.events},
                 {"energy_balance_max_rel_err", a.max_balance_rel_err}};
  j["corridor"] = {{"segments", a.segment_count},
                   {"activations", a.activations},
                   {"worst_activation_latency_ms", a.worst_activation_latency_ms},
                   {"kwh_transmitted", a.kwh_tx},
                   {"kwh_delivered", a.kwh_delivered},
                   {"standby_kwh", a.standby_kwh},
                   {"peak_temp_c", a.peak_temp_c},
                   {"fault_count", a.fault_count}};
  j["traffic"] = {{"vehicles_entered", a.vehicles_entered},
                  {"vehicles_completed", a.vehicles_completed},
                  {"vehicle_km", a.vehicle_km},
                  {"kwh_received", a.kwh_received},
                  {"battery_overflow_kwh", a.battery_overflow_kwh},
                  {"deep_discharges", a.deep_discharges},
                  {"mean_speed_kmh", a.mean_speed_kmh},
                  {"sessions_denied", a.sessions_denied},
                  {"fleet_consumption_kwh_km", a.fleet_consumption_kwh_km}};
  if (a.instrumented) {
    j["transfer"] = {{"instr_window_m", a.instr_window_m},
                     {"instr_vehicles", a.instr_vehicles},
                     {"instr_kwh_mean", a.instr_kwh_mean},
                     {"e_per_2km_kwh", a.instr_e_per_2km_kwh}};
  }
  j["v2i"] = {{"sessions_opened", a.sessions_opened},
              {"sessions_closed", a.sessions_closed},
              {"sessions_denied", a.sessions_denied},
              {"ledger_entries", a.ledger_entries},
              {"billed_kwh", a.billed_kwh},
              {"alerts",
               {{"unauthorized_draw", a.alerts_unauthorized},
                {"energy_mismatch", a.alerts_mismatch},
                {"maintenance", a.alerts_maintenance}}}};
  ordered_json ems = {{"demand_kwh", a.demand_kwh},
                      {"solar_kwh", a.solar_used_kwh},
                      {"solar_to_buffer_kwh", a.solar_to_buffer_kwh},
                      {"buffer_out_kwh", a.buffer_out_kwh},
                      {"grid_offpeak_kwh", a.grid_offpeak_kwh},
                      {"grid_peak_kwh", a.grid_peak_kwh},
                      {"v2g_kwh", a.v2g_kwh},
                      {"deficit_kwh", a.deficit_kwh},
                      {"curtailed_kwh", a.curtailed_kwh},
                      {"standby_kwh", a.standby_kwh},
                      {"shed_kwh", a.shed_kwh},
                      {"shed_events", a.shed_events},
                      {"shed_alarms", a.shed_alarms},
                      {"solar_share", a.solar_share},
                      {"v2g_share", a.v2g_share},
                      {"max_abs_freq_dev_pct", a.max_abs_freq_dev_pct},
                      {"max_abs_volt_dev_pct", a.max_abs_volt_dev_pct}};
  if (a.forecast_accuracy_pct >= 0.0) {
    ems["forecast_accuracy_pct"] = a.forecast_accuracy_pct;
  } else {
    ems["forecast_accuracy_pct"] = nullptr;
  }
  j["ems"] = ems;

  const auto& f = a.fin;
  ordered_json fin = {{"currency", f.currency},
                      {"capex", f.capex},
                      {"annual_opex", f.annual_opex},
                      {"annual_revenue", f.annual_revenue},
                      {"annual_energy_cost", f.annual_energy_cost},
                      {"annual_kwh_sold", f.annual_kwh_sold},
                      {"annual_vehicle_km", f.annual_vehicle_km},
                      {"blended_cost_per_kwh", f.blended_cost_per_kwh},
                      {"margin_per_kwh", f.margin_per_kwh},
                      {"cost_per_vehicle_km", f.cost_per_vehicle_km},
                      {"cost_per_vehicle_km_inr", f.cost_per_vehicle_km_inr},
                      {"co2_tonnes", f.co2_tonnes},
                      {"energy_savings_gwh", f.energy_savings_gwh}};
  if (f.breakeven_years) {
    fin["breakeven_years"] = *f.breakeven_years;
  } else {
    fin["breakeven_years"] = "NEVER";
  }
  j["econ"] = fin;
  return j;
}

void write_outputs(const Scenario& sc, const SimulationResult& r,
                   const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);

  write_file(dir / "summary.json", build_summary(sc, r).dump(2) + "\n");
  if (r.agg.battery_mode) return;

  {
    std::string csv;
    csv.reserve(r.timeseries.size() * 96 + 128);
    csv += "t_s,demand_kw,solar_kw,buffer_kw,grid_offpeak_kw,grid_peak_kw,"
           "v2g_kw,deficit_kw,freq_dev_pct,volt_dev_pct,shed_kw,curtailed_kw\n";
    for (const auto& p : r.timeseries) {
      csv += fmt_fixed(p.t_s, 3);
      csv += ',';
      csv += fmt_fixed(p.demand_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.solar_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.buffer_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.grid_offpeak_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.grid_peak_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.v2g_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.deficit_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.freq_dev_pct, 4);
      csv += ',';
      csv += fmt_fixed(p.volt_dev_pct, 4);
      csv += ',';
      csv += fmt_fixed(p.shed_kw, 3);
      csv += ',';
      csv += fmt_fixed(p.curtailed_kw, 3);
      csv += '\n';
    }
    write_file(dir / "timeseries.csv", csv);
  }
  {
    std::string csv = "id,class,entry_s,exit_s,mean_speed_kmh,tic_s,"
                      "kwh_received,soc_in,soc_out,deep_discharges\n";
    for (const auto& v : r.vehicles) {
      csv += std::to_string(v.id);
      csv += ',';
      csv += vehicle_class_name(v.cls);
      csv += ',';
      csv += fmt_fixed(v.entry_s, 3);
      csv += ',';
      csv += fmt_fixed(v.exit_s, 3);
      csv += ',';
      csv += fmt_fixed(v.mean_speed_kmh, 2);
      csv += ',';
      csv += fmt_fixed(v.tic_s, 3);
      csv += ',';
      csv += fmt_fixed(v.kwh_received, 6);
      csv += ',';
      csv += fmt_fixed(v.soc_in, 4);
      csv += ',';
      csv += fmt_fixed(v.soc_out, 4);
      csv += ',';
      csv += std::to_string(v.deep_discharges);
      csv += '\n';
    }
    write_file(dir / "vehicles.csv", csv);
  }
  {
    std::string csv = "index,position_m,activations,kwh_tx,kwh_delivered,"
                      "peak_temp_c,fault_count,standby_kwh\n";
    for (const auto& s : r.segments) {
      csv += std::to_string(s.index);
      csv += ',';
      csv += fmt_fixed(s.position_m, 2);
      csv += ',';
      csv += std::to_string(s.activations);
      csv += ',';
      csv += fmt_fixed(s.kwh_tx, 6);
      csv += ',';
      csv += fmt_fixed(s.kwh_delivered, 6);
      csv += ',';
      csv += fmt_fixed(s.peak_temp_c, 2);
      csv += ',';
      csv += std::to_string(s.fault_count);
      csv += ',';
      csv += fmt_fixed(s.standby_kwh, 6);
      csv += '\n';
    }
    write_file(dir / "segments.csv", csv);
  }
  write_file(dir / "ledger.jsonl", r.ledger.to_jsonl());
  {
    std::string csv = "kind,segment,window_start_s,magnitude\n";
    for (const auto& a : r.alerts) {
      csv += alert_kind_name(a.kind);
      csv += ',';
      csv += std::to_string(a.segment_id);
      csv += ',';
      csv += fmt_fixed(a.window_start_s, 3);
      csv += ',';
      csv += fmt_fixed(a.magnitude, 6);
      csv += '\n';
    }
    write_file(dir / "alerts.csv", csv);
  }
}

std::string render_report(const std::string& results_dir) {
  fs::path dir(results_dir);
  std::ifstream f(dir / "summary.json");
  if (!f) {
    throw SimError(ErrorCode::InvalidValue,
                   "no summary.json in " + results_dir);
  }
  nlohmann::json j = nlohmann::json::parse(f);

  std::ostringstream os;
  os << "ERS simulation report\n";
  os << "=====================\n";
  os << "seed " << j["run"]["seed"] << ", mode " << j["run"]["mode"].get<std::string>()
     << ", duration " << j["run"]["duration_s"].get<double>() << " s\n";
  if (j.contains("corridor")) {
    os << "\ncorridor: " << j["corridor"]["segments"] << " segments, "
       << j["corridor"]["activations"] << " activations, worst latency "
       << fmt_fixed(j["corridor"]["worst_activation_latency_ms"].get<double>(), 1)
       << " ms\n";
    os << "energy: transmitted "
       << fmt_fixed(j["corridor"]["kwh_transmitted"].get<double>(), 1)
       << " kWh, delivered "
       << fmt_fixed(j["corridor"]["kwh_delivered"].get<double>(), 1)
       << " kWh, standby "
       << fmt_fixed(j["corridor"]["standby_kwh"].get<double>(), 1) << " kWh\n";
  }
  if (j.contains("traffic")) {
    if (j["traffic"].contains("life_years")) {
      os << "\nbattery profile " << j["traffic"]["battery_profile"].get<std::string>()
         << ": life " << fmt_fixed(j["traffic"]["life_years"].get<double>(), 2)
         << " years, "
         << fmt_fixed(j["traffic"]["deep_discharges_per_year"].get<double>(), 1)
         << " deep discharges/year\n";
      return os.str();
    }
    os << "traffic: " << j["traffic"]["vehicles_entered"] << " entered, "
       << j["traffic"]["vehicles_completed"] << " completed, mean speed "
       << fmt_fixed(j["traffic"]["mean_speed_kmh"].get<double>(), 1)
       << " km/h, received "
       << fmt_fixed(j["traffic"]["kwh_received"].get<double>(), 1) << " kWh\n";
  }
  if (j.contains("ems")) {
    os << "sources: solar " << fmt_fixed(j["ems"]["solar_share"].get<double>() * 100, 1)
       << "%, v2g " << fmt_fixed(j["ems"]["v2g_share"].get<double>() * 100, 1)
       << "%, max |freq dev| "
       << fmt_fixed(j["ems"]["max_abs_freq_dev_pct"].get<double>(), 3) << "%\n";
  }
  if (j.contains("v2i")) {
    os << "v2i: " << j["v2i"]["sessions_opened"] << " sessions, "
       << j["v2i"]["ledger_entries"] << " ledger entries, alerts "
       << j["v2i"]["alerts"]["unauthorized_draw"] << "/"
       << j["v2i"]["alerts"]["energy_mismatch"] << "/"
       << j["v2i"]["alerts"]["maintenance"]
       << " (unauthorized/mismatch/maintenance)\n";
  }
  if (j.contains("econ")) {
    os << "econ (" << j["econ"]["currency"].get<std::string>() << "): breakeven ";
    if (j["econ"]["breakeven_years"].is_number()) {
      os << fmt_fixed(j["econ"]["breakeven_years"].get<double>(), 2) << " years";
    } else {
      os << "NEVER";
    }
    os << ", cost/vehicle-km INR "
       << fmt_fixed(j["econ"]["cost_per_vehicle_km_inr"].get<double>(), 3)
       << ", CO2 " << fmt_fixed(j["econ"]["co2_tonnes"].get<double>(), 0)
       << " t/yr, savings "
       << fmt_fixed(j["econ"]["energy_savings_gwh"].get<double>(), 2)
       << " GWh/yr\n";
  }
  return os.str();
}

} // namespace ers
