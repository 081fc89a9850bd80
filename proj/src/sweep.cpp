#include "ers/sweep.hpp"

#include "ers/errors.hpp"
#include "ers/report.hpp"
#include "ers/transfer.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ers {

namespace {
namespace fs = std::filesystem;

int sweep_thread_cap() {
  int cap = 1;
#if defined(_OPENMP)
  cap = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("ERS_SIM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return cap;
}

void set_dotted(nlohmann::json& doc, const std::string& path, double value) {
  nlohmann::json* cur = &doc;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos
                                             ? std::string::npos
                                             : dot - start);
    if (key.empty()) {
      throw SimError(ErrorCode::InvalidValue, "bad parameter path: " + path);
    }
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

} // namespace

std::vector<double> parse_sweep_values(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, s = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0.0) {
      throw SimError(ErrorCode::InvalidValue, "bad sweep range: " + text);
    }
    for (double v = a; v <= b + 1e-9; v += s) out.push_back(v);
  } else {
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (tok.empty()) continue;
      out.push_back(std::stod(tok));
    }
  }
  if (out.empty()) {
    throw SimError(ErrorCode::InvalidValue, "sweep needs at least one value");
  }
  return out;
}

SweepResult run_sweep(const nlohmann::json& base_doc, const SweepSpec& spec,
                      const std::string& out_dir, ExecMode kernel_mode) {
  if (spec.values.empty()) {
    throw SimError(ErrorCode::InvalidValue, "sweep needs at least one value");
  }
  fs::create_directories(out_dir);

  struct Job {
    std::size_t vi;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    for (int rep = 0; rep < spec.replicates; ++rep) jobs.push_back({vi, rep});
  }
  std::vector<SweepRow> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());

  const int n_jobs = static_cast<int>(jobs.size());
  const int cap = std::min(sweep_thread_cap(), std::max(1, n_jobs));
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(cap)
#endif
  for (int ji = 0; ji < n_jobs; ++ji) {
    const Job& job = jobs[static_cast<std::size_t>(ji)];
    try {
      nlohmann::json doc = base_doc;
      set_dotted(doc, spec.param_path, spec.values[job.vi]);
      Scenario sc = scenario_from_json(doc);
      std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(job.rep);
      std::ostringstream dirname;
      dirname << "point" << job.vi << "_rep" << job.rep;
      fs::path sub = fs::path(out_dir) / dirname.str();

      RunOptions opts;
      opts.kernel_mode = kernel_mode;
      SimulationResult r = run(sc, seed, opts);
      write_outputs(sc, r, sub.string());

      SweepRow row;
      row.value = spec.values[job.vi];
      row.seed = seed;
      row.out_dir = sub.string();
      row.vehicles = r.agg.vehicles_entered;
      row.kwh_received = r.agg.kwh_received;
      row.e_per_2km_kwh = r.agg.instr_e_per_2km_kwh;
      row.solar_share = r.agg.solar_share;
      row.v2g_share = r.agg.v2g_share;
      row.max_abs_freq_dev_pct = r.agg.max_abs_freq_dev_pct;
      rows[static_cast<std::size_t>(ji)] = row;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(ji)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw SimError(ErrorCode::InvalidValue, "sweep point failed: " + e);
  }

  SweepResult result;
  result.rows = std::move(rows);
  fs::path csv_path = fs::path(out_dir) / "sweep.csv";
  {
    std::ofstream f(csv_path, std::ios::binary);
    f << "param,value,seed,out_dir,vehicles,kwh_received,e_per_2km_kwh,"
         "solar_share,v2g_share,max_abs_freq_dev_pct\n";
    for (const auto& r : result.rows) {
      f << spec.param_path << ',' << fmt_fixed(r.value, 6) << ',' << r.seed << ','
        << r.out_dir << ',' << r.vehicles << ',' << fmt_fixed(r.kwh_received, 6)
        << ',' << fmt_fixed(r.e_per_2km_kwh, 6) << ','
        << fmt_fixed(r.solar_share, 6) << ',' << fmt_fixed(r.v2g_share, 6) << ','
        << fmt_fixed(r.max_abs_freq_dev_pct, 4) << '\n';
    }
  }
  result.combined_csv_path = csv_path.string();

  if (spec.param_path == "traffic.speed_kmh") {
    Scenario base = scenario_from_json(base_doc);
    std::ofstream f(fs::path(out_dir) / "efficiency_curve.csv", std::ios::binary);
    f << "speed_kmh,eta,duty,e_per_2km_kwh\n";
    for (double v : spec.values) {
      double eta = coupling_efficiency(base.transfer, v);
      double duty = duty_factor(base.transfer, v);
      double e = v > 0.0 ? energy_per_distance_kwh(base.transfer, v, 2.0) : 0.0;
      f << fmt_fixed(v, 1) << ',' << fmt_fixed(eta, 6) << ',' << fmt_fixed(duty, 6)
        << ',' << fmt_fixed(e, 6) << '\n';
    }
  }
  return result;
}

} // namespace ers
