#include "ers/ems.hpp"
#include "ers/errors.hpp"
#include "ers/rng.hpp"
#include "ers/traffic.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ers;

TEST_CASE("solar model") {
  SolarParams p;
  SUBCASE("no sun at midnight") {
    CHECK(solar_available_kw(p, 0.0, 80, 10000.0, 0.2) == doctest::Approx(0.0));
    CHECK(solar_available_kw(p, 86399.0, 200, 10000.0, 0.2) == doctest::Approx(0.0));
  }
  SUBCASE("annual plane-of-array integral hits the target within 2%") {
    double kwh_m2 = 0.0;
    for (int day = 0; day < 365; ++day) {
      for (int step = 0; step < 24 * 12; ++step) { // 5-minute quadrature
        double tod = (step + 0.5) * 300.0;
        kwh_m2 += solar_irradiance_kw_m2(p, tod, day) * (300.0 / 3600.0);
      }
    }
    CHECK(kwh_m2 == doctest::Approx(2200.0).epsilon(0.02));
  }
  SUBCASE("array energy scales with area and efficiency") {
    double gwh = 0.0;
    for (int day = 0; day < 365; ++day) {
      for (int h = 0; h < 24; ++h) {
        double tod = (h + 0.5) * 3600.0;
        gwh += solar_available_kw(p, tod, day, 10000.0, 0.20) / 1e6;
      }
    }
    CHECK(gwh == doctest::Approx(4.4).epsilon(0.02));
  }
  SUBCASE("daylength varies with season around a 12 h mean") {
    CHECK(solar_daylength_h(p, 80) == doctest::Approx(12.0));
    CHECK(solar_daylength_h(p, 171) == doctest::Approx(13.9).epsilon(0.01));
    CHECK(solar_daylength_h(p, 355) == doctest::Approx(10.1).epsilon(0.01));
  }
}

TEST_CASE("demand forecaster") {
  ForecastParams fp;
  SUBCASE("constant history forecasts itself at 100% accuracy") {
    std::vector<double> hist(72, 400.0);
    Forecast f = forecast_demand(hist, 24, fp);
    for (double v : f.values_kw) CHECK(v == doctest::Approx(400.0));
    std::vector<double> realized(24, 400.0);
    CHECK(forecast_accuracy(f, realized, fp) == doctest::Approx(100.0));
  }
  SUBCASE("noiseless daily cycle is reproduced") {
    std::vector<double> hist;
    auto demand = [](int h) {
      return 500.0 + 300.0 * std::sin(2.0 * 3.14159265358979 * h / 24.0);
    };
    for (int h = 0; h < 14 * 24; ++h) hist.push_back(demand(h));
    Forecast f = forecast_demand(hist, 24, fp);
    std::vector<double> realized;
    for (int h = 14 * 24; h < 15 * 24; ++h) realized.push_back(demand(h));
    CHECK(forecast_accuracy(f, realized, fp) >= 99.0);
  }
  SUBCASE("too little history throws") {
    std::vector<double> hist(47, 100.0);
    CHECK_THROWS_AS(forecast_demand(hist, 24, fp), SimError);
  }
  SUBCASE("accuracy is scale invariant") {
    RngStream rng(5, RngDomain::Forecast, 0);
    std::vector<double> hist;
    for (int h = 0; h < 10 * 24; ++h) {
      double base = 300.0 + 150.0 * std::sin(2.0 * 3.141592653589793 * h / 24.0);
      hist.push_back(base * (1.0 + 0.05 * rng.normal(0.0, 1.0)));
    }
    std::vector<double> realized(hist.end() - 24, hist.end());
    std::vector<double> past(hist.begin(), hist.end() - 24);
    Forecast f1 = forecast_demand(past, 24, fp);
    double a1 = forecast_accuracy(f1, realized, fp);
    std::vector<double> past_scaled;
    std::vector<double> realized_scaled;
    for (double v : past) past_scaled.push_back(v * 37.5);
    for (double v : realized) realized_scaled.push_back(v * 37.5);
    Forecast f2 = forecast_demand(past_scaled, 24, fp);
    double a2 = forecast_accuracy(f2, realized_scaled, fp);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-9));
  }
  SUBCASE("noisy sinusoid stays above 90% on average (30 seeds)") {
    double total = 0.0;
    int n = 0;
    for (int seed = 0; seed < 30; ++seed) {
      RngStream rng(static_cast<std::uint64_t>(seed), RngDomain::Forecast, 0);
      std::vector<double> series;
      for (int h = 0; h < 15 * 24; ++h) {
        double base = 500.0 + 250.0 * std::sin(2.0 * 3.141592653589793 * h / 24.0);
        series.push_back(base * (1.0 + 0.05 * rng.normal(0.0, 1.0)));
      }
      std::vector<double> hist(series.begin(), series.end() - 24);
      std::vector<double> realized(series.end() - 24, series.end());
      Forecast f = forecast_demand(hist, 24, fp);
      total += forecast_accuracy(f, realized, fp);
      ++n;
    }
    CHECK(total / n >= 90.0);
  }
}

TEST_CASE("merit-order dispatch") {
  SUBCASE("renewable first, surplus charges the buffer") {
    BufferState buf{100.0, 0.0, 50.0, 50.0, 0.9};
    SourceMix m = dispatch(50.0, 80.0, buf, 1000.0, 0.0, 0.0, 3600.0);
    CHECK(m.solar == doctest::Approx(50.0));
    CHECK(m.grid_offpeak == doctest::Approx(0.0));
    CHECK(m.solar_to_buffer == doctest::Approx(30.0));
    CHECK(buf.stored_kwh == doctest::Approx(30.0));
    CHECK(m.curtailed == doctest::Approx(0.0));
    CHECK(m.deficit == doctest::Approx(0.0));
  }
  SUBCASE("the reported operating point: 61/35/4") {
    BufferState buf{};
    SourceMix m = dispatch(100.0, 61.0, buf, 35.0, 0.0, 4.0, 0.1);
    CHECK(m.solar == doctest::Approx(61.0));
    CHECK(m.grid_offpeak == doctest::Approx(35.0));
    CHECK(m.v2g == doctest::Approx(4.0));
    CHECK(m.grid_peak == doctest::Approx(0.0));
    CHECK(m.deficit == doctest::Approx(0.0));
  }
  SUBCASE("starvation reports the whole demand as deficit") {
    BufferState buf{};
    SourceMix m = dispatch(100.0, 0.0, buf, 0.0, 0.0, 0.0, 0.1);
    CHECK(m.deficit == doctest::Approx(100.0));
    CHECK(m.supplied() == doctest::Approx(0.0));
  }
  SUBCASE("renewable-first invariant: grid implies solar fully used") {
    RngStream rng(11, RngDomain::Harness, 2);
    BufferState buf{200.0, 50.0, 80.0, 80.0, 0.9};
    for (int i = 0; i < 2000; ++i) {
      double demand = rng.uniform(0.0, 400.0);
      double solar = rng.uniform(0.0, 300.0);
      SourceMix m = dispatch(demand, solar, buf, rng.uniform(0.0, 100.0),
                             rng.uniform(0.0, 100.0), rng.uniform(0.0, 50.0), 60.0);
      if (m.grid_offpeak + m.grid_peak > 1e-12) {
        CHECK(m.solar == doctest::Approx(std::min(demand, solar)));
      }
      CHECK(buf.stored_kwh >= -1e-12);
      CHECK(buf.stored_kwh <= 200.0 + 1e-12);
      CHECK(m.supplied() + m.deficit == doctest::Approx(demand).epsilon(1e-12));
    }
  }
  SUBCASE("round-trip efficiency binds discharge to charge") {
    BufferState buf{1000.0, 0.0, 500.0, 500.0, 0.9};
    dispatch(0.0, 100.0, buf, 0.0, 0.0, 0.0, 3600.0); // charge 100 kWh
    CHECK(buf.stored_kwh == doctest::Approx(100.0));
    double discharged = 0.0;
    for (int i = 0; i < 100 && buf.stored_kwh > 1e-9; ++i) {
      SourceMix m = dispatch(50.0, 0.0, buf, 0.0, 0.0, 0.0, 3600.0);
      discharged += m.buffer;
    }
    CHECK(discharged == doctest::Approx(90.0).epsilon(1e-9));
  }
}

TEST_CASE("droop grid state") {
  GridParams p;
  p.capacity_kw = 2000.0;
  SUBCASE("balance means zero deviation") {
    GridState g = update_grid(p, 500.0, 500.0);
    CHECK(g.freq_dev == doctest::Approx(0.0));
    CHECK(g.volt_dev == doctest::Approx(0.0));
  }
  SUBCASE("10% imbalance gives 0.4% frequency deviation") {
    GridState g = update_grid(p, 0.0, 200.0);
    CHECK(g.freq_dev == doctest::Approx(-0.004));
    CHECK(g.volt_dev == doctest::Approx(-0.003));
  }
  SUBCASE("37.5% imbalance reaches the 1.5% design point") {
    GridState g = update_grid(p, 0.0, 750.0);
    CHECK(std::abs(g.freq_dev) == doctest::Approx(0.015));
  }
}

TEST_CASE("load shedding order and exhaustion") {
  SUBCASE("nothing required, nothing shed") {
    CHECK(shed_load({}, 0.0).segments.empty());
    CHECK(shed_load({{1, 0, 100.0}}, 0.0).segments.empty());
  }
  SUBCASE("private cars shed before buses") {
    std::vector<ShedCandidate> cands = {
        {10, shed_priority(VehicleClassId::PrivateCar), 100.0},
        {11, shed_priority(VehicleClassId::PrivateCar), 100.0},
        {12, shed_priority(VehicleClassId::Bus), 100.0},
    };
    ShedPlan plan = shed_load(cands, 200.0);
    REQUIRE(plan.segments.size() == 2);
    CHECK(plan.segments[0] == 10);
    CHECK(plan.segments[1] == 11);
    CHECK_FALSE(plan.insufficient);
  }
  SUBCASE("exhaustion sets the alarm") {
    std::vector<ShedCandidate> cands = {{1, 0, 100.0}, {2, 1, 100.0}, {3, 3, 100.0}};
    ShedPlan plan = shed_load(cands, 500.0);
    CHECK(plan.segments.size() == 3);
    CHECK(plan.insufficient);
    CHECK(plan.shed_kw == doctest::Approx(300.0));
  }
}
