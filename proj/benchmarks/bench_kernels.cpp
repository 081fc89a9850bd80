// Times the OpenMP kernels against their serial references, plus a full
// engine run in both modes. Numbers vary by machine; the point of the target
// is the speedup table and a quick regression check on the hot loops.

#include "ers/engine.hpp"
#include "ers/kernels.hpp"
#include "ers/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace ers;
using namespace ers::kernels;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_loop(int iters, F&& f) {
  auto t0 = Clock::now();
  for (int i = 0; i < iters; ++i) f();
  return seconds_since(t0);
}

void bench_motion() {
  const int n = 200000, iters = 50;
  RngStream rng(1, RngDomain::Harness, 0);
  std::vector<MotionSlot> slots(n);
  for (auto& s : slots) {
    s.speed_kmh = rng.uniform(0.0, 70.0);
    s.target_kmh = rng.uniform(20.0, 70.0);
    s.gap_m = rng.uniform(2.0, 150.0);
  }
  std::vector<double> out(n);
  MotionParams p;
  double ts = time_loop(iters, [&] { motion_sweep_serial(slots, out, 0.1, p); });
  double to = time_loop(iters, [&] { motion_sweep_omp(slots, out, 0.1, p); });
  std::printf("motion   %8d slots  serial %8.1f ms  omp %8.1f ms  speedup %.2fx\n",
              n, ts * 1e3 / iters, to * 1e3 / iters, ts / to);
}

void bench_thermal() {
  const int n = 100000, iters = 50;
  RngStream rng(2, RngDomain::Harness, 0);
  CorridorParams p;
  std::vector<CoilSegment> segs(n);
  std::vector<double> diss(n);
  for (int i = 0; i < n; ++i) {
    segs[static_cast<std::size_t>(i)].temp_c = rng.uniform(25.0, 95.0);
    diss[static_cast<std::size_t>(i)] = rng.uniform(0.0, 12.0);
  }
  double decay = std::exp(-0.1 / p.tau_s);
  auto segs_a = segs;
  double ts = time_loop(iters, [&] {
    thermal_sweep_serial(segs_a, diss, 25.0, decay, p);
  });
  auto segs_b = segs;
  double to = time_loop(iters, [&] {
    thermal_sweep_omp(segs_b, diss, 25.0, decay, p);
  });
  std::printf("thermal  %8d segs   serial %8.1f ms  omp %8.1f ms  speedup %.2fx\n",
              n, ts * 1e3 / iters, to * 1e3 / iters, ts / to);
}

void bench_battery() {
  const int n = 100000, iters = 50;
  RngStream rng(3, RngDomain::Harness, 0);
  WearParams w;
  std::vector<BatteryState> batts(n);
  std::vector<BatterySlot> slots(n);
  for (int i = 0; i < n; ++i) {
    battery_init(batts[static_cast<std::size_t>(i)], rng.uniform(0.2, 0.9));
    slots[static_cast<std::size_t>(i)] = {&batts[static_cast<std::size_t>(i)],
                                          rng.uniform(0.1, 0.9), 32.0, 50.0};
  }
  double ts = time_loop(iters, [&] { battery_sweep_serial(slots, w); });
  double to = time_loop(iters, [&] { battery_sweep_omp(slots, w); });
  std::printf("battery  %8d packs  serial %8.1f ms  omp %8.1f ms  speedup %.2fx\n",
              n, ts * 1e3 / iters, to * 1e3 / iters, ts / to);
}

void bench_full_run() {
  nlohmann::json j;
  j["sim"] = {{"duration_s", 1800}, {"control_dt_ms", 100}, {"seed", 5}};
  j["corridor"] = {{"length_m", 10000}};
  j["traffic"] = {{"rate_veh_h", 800}};
  j["energy"] = {{"grid_capacity_kw", 20000}, {"pv_area_m2", 20000}};
  Scenario sc = scenario_from_json(j);

  RunOptions serial;
  serial.kernel_mode = ExecMode::Serial;
  auto t0 = Clock::now();
  SimulationResult rs = run(sc, 5, serial);
  double ts = seconds_since(t0);

  RunOptions omp;
  omp.kernel_mode = ExecMode::OpenMP;
  t0 = Clock::now();
  SimulationResult ro = run(sc, 5, omp);
  double to = seconds_since(t0);

  bool identical = rs.agg.kwh_received == ro.agg.kwh_received &&
                   rs.agg.kwh_tx == ro.agg.kwh_tx;
  std::printf("full run 10 km / 30 min   serial %8.1f ms  omp %8.1f ms  "
              "speedup %.2fx  identical %s\n",
              ts * 1e3, to * 1e3, ts / to, identical ? "yes" : "NO");
}

} // namespace

int main() {
#if defined(_OPENMP)
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; omp timings fall back to serial\n");
#endif
  bench_motion();
  bench_thermal();
  bench_battery();
  bench_full_run();
  return 0;
}
