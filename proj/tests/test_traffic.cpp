#include "ers/errors.hpp"
#include "ers/traffic.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ers;

namespace {
ArrivalParams arrival_defaults() {
  ArrivalParams p;
  for (int c = 0; c < kVehicleClassCount; ++c) {
    p.classes[static_cast<std::size_t>(c)] = VehicleClassParams{};
  }
  return p;
}
} // namespace

TEST_CASE("arrival generation") {
  auto p = arrival_defaults();

  SUBCASE("zero rate is a null process") {
    p.rate_veh_h = 0.0;
    CHECK(generate_arrivals(p, 3600.0, 1).empty());
  }
  SUBCASE("count concentrates around the Poisson mean") {
    p.rate_veh_h = 720.0;
    auto a = generate_arrivals(p, 3600.0, 12345);
    CHECK(a.size() >= 720 - 81);
    CHECK(a.size() <= 720 + 81);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].t_s >= a[i - 1].t_s);
  }
  SUBCASE("degenerate mix produces one class only") {
    p.mix = {0.0, 1.0, 0.0, 0.0};
    for (const auto& a : generate_arrivals(p, 1800.0, 7)) {
      CHECK(a.cls == VehicleClassId::Taxi);
    }
  }
  SUBCASE("invalid mix is rejected") {
    p.mix = {0.5, 0.2, 0.1, 0.1};
    CHECK_THROWS_AS(generate_arrivals(p, 3600.0, 7), SimError);
  }
  SUBCASE("draw bounds hold") {
    p.rate_veh_h = 600.0;
    for (const auto& a : generate_arrivals(p, 3600.0, 3)) {
      CHECK(std::abs(a.offset_m) <= 0.3);
      CHECK(a.target_kmh >= 20.0);
      CHECK(a.target_kmh <= 70.0);
      CHECK(a.entry_soc >= 0.30);
      CHECK(a.entry_soc <= 0.90);
    }
  }
  SUBCASE("mean inter-arrival converges to 3600/rate within 2%") {
    p.rate_veh_h = 600.0;
    auto a = generate_arrivals(p, 200.0 * 3600.0, 99);
    REQUIRE(a.size() > 1000);
    double mean_gap = a.back().t_s / static_cast<double>(a.size() - 1);
    CHECK(mean_gap == doctest::Approx(6.0).epsilon(0.02));
  }
  SUBCASE("common random numbers: per-index draws survive a rate change") {
    p.rate_veh_h = 600.0;
    auto lo = generate_arrivals(p, 3600.0, 42);
    p.rate_veh_h = 750.0;
    auto hi = generate_arrivals(p, 3600.0, 42);
    REQUIRE(hi.size() >= lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      CHECK(hi[i].cls == lo[i].cls);
      CHECK(hi[i].target_kmh == doctest::Approx(lo[i].target_kmh));
      CHECK(hi[i].offset_m == doctest::Approx(lo[i].offset_m));
      CHECK(hi[i].t_s <= lo[i].t_s + 1e-9); // times only rescale downward
    }
  }
}

TEST_CASE("longitudinal motion rule") {
  MotionParams mp;
  SUBCASE("steady state on a free road") {
    VehicleMotion v{0.0, 50.0, 50.0};
    advance_vehicle(v, 1.0, 1e9, 0.0, mp);
    CHECK(v.speed_kmh == doctest::Approx(50.0));
    CHECK(v.pos_m == doctest::Approx(13.888888889).epsilon(1e-9));
  }
  SUBCASE("headway rule caps speed under a stationary leader") {
    VehicleMotion v{0.0, 50.0, 50.0};
    advance_vehicle(v, 0.1, 10.0, 0.0, mp);
    CHECK(v.speed_kmh <= doctest::Approx(10.0 / 1.5 * 3.6)); // 24 km/h
  }
  SUBCASE("acceleration is rate limited") {
    VehicleMotion v{0.0, 0.0, 50.0};
    advance_vehicle(v, 1.0, 1e9, 0.0, mp);
    CHECK(v.speed_kmh == doctest::Approx(7.2)); // 2 m/s^2
  }
}

TEST_CASE("charge acceptance taper") {
  WearParams w;
  SUBCASE("plain charge below the knee") {
    BatteryState b;
    battery_init(b, 0.50);
    double acc = apply_charge(b, 50.0, 1.0, 90.0, w);
    CHECK(acc == doctest::Approx(1.0));
    CHECK(b.soc == doctest::Approx(0.52));
  }
  SUBCASE("hard ceiling") {
    BatteryState b;
    battery_init(b, 0.90);
    CHECK(apply_charge(b, 50.0, 1.0, 90.0, w) == doctest::Approx(0.0));
    CHECK(b.soc == doctest::Approx(0.90));
  }
  SUBCASE("taper midpoint halves instantaneous acceptance") {
    CHECK(charge_acceptance(0.875, w) == doctest::Approx(0.5));
    BatteryState b;
    battery_init(b, 0.875);
    double tiny = 1e-7;
    double acc = apply_charge(b, 50.0, tiny, 90.0, w);
    CHECK(acc / tiny == doctest::Approx(0.5).epsilon(1e-4));
  }
  SUBCASE("negative energy throws") {
    BatteryState b;
    battery_init(b, 0.5);
    CHECK_THROWS_AS(apply_charge(b, 50.0, -0.5, 90.0, w), SimError);
  }
  SUBCASE("SoC never exceeds the ceiling under any charge sequence") {
    BatteryState b;
    battery_init(b, 0.40);
    for (int i = 0; i < 200; ++i) {
      apply_charge(b, 50.0, 2.5, 90.0, w);
      CHECK(b.soc <= 0.90 + 1e-12);
      CHECK(b.soc >= 0.0);
    }
    CHECK(b.soc == doctest::Approx(0.90).epsilon(1e-6));
  }
}

TEST_CASE("wear counting over SoC traces") {
  WearParams w;
  SUBCASE("single deep excursion") {
    BatteryState b;
    battery_init(b, 0.90);
    std::vector<double> trace = {0.90, 0.28, 0.90};
    update_battery_wear(b, trace, 50.0, 25.0, w);
    CHECK(b.deep_discharges == 1);
    CHECK(b.efc == doctest::Approx(0.62));
    CHECK(b.throughput_kwh == doctest::Approx(0.62 * 50.0));
    CHECK(b.stress == doctest::Approx(w.f0 * std::pow(0.62, w.alpha)));
  }
  SUBCASE("constant trace leaves counters unchanged") {
    BatteryState b;
    battery_init(b, 0.7);
    std::vector<double> trace(100, 0.7);
    update_battery_wear(b, trace, 50.0, 25.0, w);
    CHECK(b.deep_discharges == 0);
    CHECK(b.efc == doctest::Approx(0.0));
    CHECK(b.stress == doctest::Approx(0.0));
  }
  SUBCASE("temperature factor doubles per 10 C") {
    std::vector<double> trace = {0.8, 0.5, 0.8, 0.45, 0.8};
    BatteryState cool;
    battery_init(cool, 0.8);
    update_battery_wear(cool, trace, 50.0, 25.0, w);
    BatteryState warm;
    battery_init(warm, 0.8);
    update_battery_wear(warm, trace, 50.0, 35.0, w);
    CHECK(warm.stress == doctest::Approx(2.0 * cool.stress).epsilon(1e-12));
  }
  SUBCASE("deeper excursions never reduce stress") {
    for (double extra = 0.0; extra <= 0.3; extra += 0.05) {
      BatteryState a;
      battery_init(a, 0.9);
      std::vector<double> shallow = {0.9, 0.5, 0.9};
      update_battery_wear(a, shallow, 50.0, 25.0, w);
      BatteryState bdeep;
      battery_init(bdeep, 0.9);
      std::vector<double> deep = {0.9, 0.5 - extra, 0.9};
      update_battery_wear(bdeep, deep, 50.0, 25.0, w);
      CHECK(bdeep.stress >= a.stress - 1e-15);
    }
  }
  SUBCASE("streaming across chunks matches one batch for uninterrupted cycles") {
    std::vector<double> day = {0.75, 0.45, 0.75, 0.45, 0.75};
    BatteryState batch;
    battery_init(batch, 0.75);
    std::vector<double> twice = day;
    twice.insert(twice.end(), day.begin() + 1, day.end());
    update_battery_wear(batch, twice, 50.0, 30.0, w);
    BatteryState stream;
    battery_init(stream, 0.75);
    for (double s : twice) wear_observe(stream, s, 50.0, 30.0, w);
    wear_flush(stream, 30.0, w);
    CHECK(stream.stress == doctest::Approx(batch.stress).epsilon(1e-12));
    CHECK(stream.efc == doctest::Approx(batch.efc).epsilon(1e-12));
  }
}

TEST_CASE("reference duty profiles land on the calibrated service lives") {
  WearParams w;
  auto stat = estimate_battery_life("static-fast-charge", w);
  CHECK(stat.years >= 5.5);
  CHECK(stat.years <= 6.5);
  CHECK(stat.deep_discharges_per_year >= 279.0);
  CHECK(stat.deep_discharges_per_year <= 341.0);

  auto ers = estimate_battery_life("ers-dynamic", w);
  CHECK(ers.years >= 8.5);
  CHECK(ers.years <= 9.5);
  CHECK(ers.deep_discharges_per_year >= 112.0);
  CHECK(ers.deep_discharges_per_year <= 138.0);

  // deep-discharge reduction sits between 40% and 60%
  double reduction = 1.0 - ers.deep_discharges_per_year / stat.deep_discharges_per_year;
  CHECK(reduction >= 0.40);
  CHECK(reduction <= 0.60);

  SUBCASE("zero usage hits the calendar cap") {
    auto p = static_fast_charge_profile();
    p.daily_km = 0.0;
    auto idle = estimate_battery_life(p, false, w);
    CHECK(idle.calendar_capped);
    CHECK(idle.years == doctest::Approx(15.0));
    CHECK(idle.deep_discharges_per_year == doctest::Approx(0.0));
  }
  SUBCASE("unknown profile throws") {
    CHECK_THROWS_AS(estimate_battery_life("solar-powered", w), SimError);
  }
  SUBCASE("externally simulated daily traces plug into the same estimator") {
    // one 0.70-deep cycle per day at the static pack temperature behaves
    // like a slightly busier static profile
    std::vector<double> day = {0.90, 0.20, 0.90};
    auto est = estimate_battery_life_from_daily_trace(day, 50.0, 47.5, w);
    CHECK(est.deep_discharges_per_year == doctest::Approx(365.0).epsilon(0.01));
    double per_day = w.f0 * std::pow(0.70, w.alpha) * std::exp2(2.25);
    CHECK(est.years == doctest::Approx(0.2 / per_day / 365.0).epsilon(0.01));
  }
}
