#include "ers/errors.hpp"
#include "ers/transfer.hpp"

#include <doctest.h>

using namespace ers;

TEST_CASE("coupling efficiency hits the calibrated nodes") {
  TransferParams p;
  CHECK(coupling_efficiency(p, 50.0) == doctest::Approx(0.90));
  CHECK(coupling_efficiency(p, 20.0) == doctest::Approx(0.625));
  CHECK(coupling_efficiency(p, 30.0) == doctest::Approx(0.735)); // 0.625 + 0.275*(10/25)
  CHECK(coupling_efficiency(p, 45.0) == doctest::Approx(0.90));
  CHECK(coupling_efficiency(p, 70.0) == doctest::Approx(0.875));
  // clamped outside the node range
  CHECK(coupling_efficiency(p, 5.0) == doctest::Approx(0.625));
  CHECK(coupling_efficiency(p, 90.0) == doctest::Approx(0.875));
}

TEST_CASE("duty factor limits low-speed dwell") {
  TransferParams p;
  CHECK(duty_factor(p, 50.0) == doctest::Approx(1.0));
  CHECK(duty_factor(p, 25.0) == doctest::Approx(0.5));
  CHECK(duty_factor(p, 70.0) == doctest::Approx(1.0));
  CHECK(duty_factor(p, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("delivered power formula") {
  TransferParams p;
  // taxi-class receiver (100 kW) at the sweet spot
  CHECK(delivered_power_kw(p, 50.0, 0.0, 40.0, 100.0) == doctest::Approx(90.0));
  // misalignment cutoff and thermal cutoff zero it out
  CHECK(delivered_power_kw(p, 50.0, 0.3, 40.0, 100.0) == doctest::Approx(0.0));
  CHECK(delivered_power_kw(p, 50.0, 0.0, 100.0, 100.0) == doctest::Approx(0.0));
  // receiver limit caps the base power
  CHECK(delivered_power_kw(p, 50.0, 0.0, 40.0, 80.0) == doctest::Approx(72.0));
  // derating is linear between 80 and 100 C
  CHECK(delivered_power_kw(p, 50.0, 0.0, 90.0, 100.0) == doctest::Approx(45.0));
}

TEST_CASE("closed-form energy per distance matches the calibration points") {
  TransferParams p;
  CHECK(energy_per_distance_kwh(p, 50.0, 2.0) == doctest::Approx(2.592).epsilon(1e-9));
  CHECK(energy_per_distance_kwh(p, 20.0, 2.0) == doctest::Approx(1.80).epsilon(1e-9));
  CHECK(energy_per_distance_kwh(p, 70.0, 2.0) == doctest::Approx(1.80).epsilon(1e-9));
  CHECK(energy_per_distance_kwh(p, 60.0, 2.0) == doctest::Approx(2.16).epsilon(1e-9));
  CHECK_THROWS_AS(energy_per_distance_kwh(p, 0.0, 2.0), SimError);
}

TEST_CASE("energy envelope, unimodality and peak location over 20-70 km/h") {
  TransferParams p;
  double prev = 0.0;
  double best = 0.0;
  double best_v = 0.0;
  bool decreasing = false;
  for (double v = 20.0; v <= 70.0 + 1e-9; v += 0.5) {
    double e = energy_per_distance_kwh(p, v, 2.0);
    CHECK(e >= 1.79);
    CHECK(e <= 2.60);
    double eta = coupling_efficiency(p, v);
    CHECK(eta >= 0.625);
    CHECK(eta <= 0.90);
    if (v > 20.0) {
      if (e < prev - 1e-12) decreasing = true;
      // once the curve starts falling it must never rise again (unimodal)
      if (decreasing) CHECK(e <= prev + 1e-12);
    }
    if (e > best) {
      best = e;
      best_v = v;
    }
    prev = e;
  }
  CHECK(best_v >= 45.0);
  CHECK(best_v <= 50.0);
  CHECK(best == doctest::Approx(2.592));
}
