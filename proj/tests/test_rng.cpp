#include "ers/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ers;

TEST_CASE("streams are deterministic and keyed") {
  RngStream a(42, RngDomain::ArrivalGap, 7);
  RngStream b(42, RngDomain::ArrivalGap, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, RngDomain::ArrivalGap, 8);
  RngStream d(42, RngDomain::TargetSpeed, 7);
  RngStream e(43, RngDomain::ArrivalGap, 7);
  RngStream base(42, RngDomain::ArrivalGap, 7);
  CHECK(base.next_u64() != c.next_u64());
  RngStream base2(42, RngDomain::ArrivalGap, 7);
  CHECK(base2.next_u64() != d.next_u64());
  RngStream base3(42, RngDomain::ArrivalGap, 7);
  CHECK(base3.next_u64() != e.next_u64());
}

TEST_CASE("distribution sanity") {
  RngStream r(1, RngDomain::Harness, 0);
  SUBCASE("uniforms stay in range with a plausible mean") {
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
      double u = r.next_double();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      sum += u;
    }
    CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("exponential mean") {
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) sum += r.exponential(6.0);
    CHECK(sum / 20000.0 == doctest::Approx(6.0).epsilon(0.05));
  }
  SUBCASE("truncated normal respects bounds") {
    for (int i = 0; i < 5000; ++i) {
      double x = r.truncated_normal(0.0, 0.08, -0.3, 0.3);
      CHECK(x >= -0.3);
      CHECK(x <= 0.3);
    }
  }
  SUBCASE("normal moments") {
    double sum = 0.0, sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      double x = r.normal(10.0, 2.0);
      sum += x;
      sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(10.0).epsilon(0.01));
    CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.05));
  }
}
