#include "ers/engine.hpp"
#include "ers/errors.hpp"
#include "ers/report.hpp"
#include "ers/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ers::SimError(ers::ErrorCode::ParseError, "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

ers::ExecMode mode_from(const std::string& s) {
  return s == "serial" ? ers::ExecMode::Serial : ers::ExecMode::OpenMP;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ERS corridor simulator: dynamic wireless charging at desk scale"};
  app.require_subcommand(1);

  // --- run ---
  auto* cmd_run = app.add_subcommand("run", "Run one scenario to a results directory");
  std::string run_scenario, run_out, run_kernels = "omp";
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  cmd_run->add_option("--scenario", run_scenario, "Scenario file (JSON)")->required();
  cmd_run->add_option("--out", run_out, "Output directory")->required();
  cmd_run->add_option("--seed", run_seed, "Root RNG seed (default: scenario's)")
      ->each([&](const std::string&) { run_seed_set = true; });
  cmd_run->add_option("--kernels", run_kernels, "Kernel mode: omp|serial")
      ->check(CLI::IsMember({"omp", "serial"}));

  // --- sweep ---
  auto* cmd_sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
  std::string sw_scenario, sw_param, sw_values, sw_out, sw_kernels = "omp";
  int sw_replicates = 1;
  std::uint64_t sw_seed_base = 42;
  cmd_sweep->add_option("--scenario", sw_scenario, "Base scenario file")->required();
  cmd_sweep->add_option("--param", sw_param, "Dotted parameter path")->required();
  cmd_sweep->add_option("--values", sw_values, "start:stop:step or v1,v2,...")->required();
  cmd_sweep->add_option("--out", sw_out, "Output directory")->required();
  cmd_sweep->add_option("--replicates", sw_replicates, "Replicates per value");
  cmd_sweep->add_option("--seed-base", sw_seed_base, "Base seed for replicates");
  cmd_sweep->add_option("--kernels", sw_kernels, "Kernel mode: omp|serial")
      ->check(CLI::IsMember({"omp", "serial"}));

  // --- report ---
  auto* cmd_report = app.add_subcommand("report", "Render a results directory as text");
  std::string rep_dir;
  cmd_report->add_option("--dir", rep_dir, "Results directory")->required();

  // --- preset ---
  auto* cmd_preset = app.add_subcommand("preset", "Emit a shipped scenario preset");
  std::string pr_name, pr_out;
  bool pr_list = false;
  cmd_preset->add_option("--name", pr_name, "Preset name");
  cmd_preset->add_option("--out", pr_out, "Output scenario file path");
  cmd_preset->add_flag("--list", pr_list, "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e); // --help
      return 0;
    }
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (*cmd_run) {
      ers::Scenario sc = ers::load_scenario(read_file(run_scenario));
      for (const auto& w : sc.warnings) std::cerr << "warning: " << w << "\n";
      std::uint64_t seed = run_seed_set ? run_seed : sc.sim.seed;
      ers::RunOptions opts;
      opts.kernel_mode = mode_from(run_kernels);
      std::cout << "seed " << seed << "\n";
      ers::SimulationResult r = ers::run(sc, seed, opts);
      ers::write_outputs(sc, r, run_out);
      std::cout << "results in " << run_out << "\n";
      return 0;
    }
    if (*cmd_sweep) {
      std::string text = read_file(sw_scenario);
      nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
      if (doc.is_discarded()) {
        throw ers::SimError(ers::ErrorCode::ParseError, "scenario is not valid JSON");
      }
      ers::SweepSpec spec;
      spec.param_path = sw_param;
      spec.values = ers::parse_sweep_values(sw_values);
      spec.replicates = sw_replicates;
      spec.seed_base = sw_seed_base;
      std::cout << "seed base " << sw_seed_base << "\n";
      ers::SweepResult res =
          ers::run_sweep(doc, spec, sw_out, mode_from(sw_kernels));
      std::cout << res.rows.size() << " runs -> " << res.combined_csv_path << "\n";
      return 0;
    }
    if (*cmd_report) {
      std::cout << ers::render_report(rep_dir);
      return 0;
    }
    if (*cmd_preset) {
      if (pr_list) {
        for (const auto& n : ers::preset_names()) std::cout << n << "\n";
        return 0;
      }
      if (pr_name.empty() || pr_out.empty()) {
        std::cerr << "preset requires --name and --out (or --list)\n";
        return 2;
      }
      std::string doc = ers::preset_document(pr_name);
      // emitted presets must round-trip the validator
      ers::load_scenario(doc);
      std::ofstream f(pr_out, std::ios::binary);
      if (!f) {
        throw ers::SimError(ers::ErrorCode::InvalidValue, "cannot write " + pr_out);
      }
      f << doc;
      std::cout << "wrote " << pr_out << "\n";
      return 0;
    }
  } catch (const ers::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
