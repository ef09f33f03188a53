#include <doctest.h>

#include <cmath>
#include <numbers>

#include <hklab/conductance.hpp>

using namespace hklab;

namespace {

double zeta2() { return std::numbers::pi * std::numbers::pi / 6.0; }

}  // namespace

TEST_SUITE("conductance") {

TEST_CASE("stable-like rate at distance 5 in the plane") {
  const auto m = ConductanceModel::stable_like(2, 1.0);
  CHECK(eval_conductance(m, {0, 0}, {3, 4}) == doctest::Approx(1.0 / 125.0).epsilon(1e-15));
  CHECK(eval_conductance(m, {3, 4}, {0, 0}) == eval_conductance(m, {0, 0}, {3, 4}));
}

TEST_CASE("diagonal vanishes for every model kind") {
  const Point x{2, -1};
  CHECK(eval_conductance(ConductanceModel::stable_like(2, 1.5), x, x) == 0.0);
  CHECK(eval_conductance(ConductanceModel::axis_stable_like(2, 1.0), x, x) == 0.0);
  CHECK(eval_conductance(ConductanceModel::sparse_long_range(3), Point{2, -1, 0}, Point{2, -1, 0}) == 0.0);
  CHECK(eval_conductance(ConductanceModel::nearest_neighbor(2), x, x) == 0.0);
}

TEST_CASE("axis model has no diagonal jumps") {
  const auto m = ConductanceModel::axis_stable_like(2, 1.0);
  CHECK(eval_conductance(m, {0, 0}, {1, 1}) == 0.0);
  CHECK(eval_conductance(m, {0, 0}, {0, 3}) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("oscillating weight stays in [lo, hi] and is symmetric") {
  const auto m = ConductanceModel::stable_like(1, 1.0, WeightFunction::oscillating(0.5, 2.0));
  for (std::int64_t a = -5; a <= 5; ++a)
    for (std::int64_t b = -5; b <= 5; ++b) {
      if (a == b) continue;
      const double c = m.rate({a}, {b});
      const double dist = std::abs(static_cast<double>(a - b));
      CHECK(c * dist * dist >= 0.5 - 1e-15);
      CHECK(c * dist * dist <= 2.0 + 1e-15);
      CHECK(c == m.rate({b}, {a}));
    }
}

TEST_CASE("sparse long-range model has unit vertex rate") {
  for (int d : {3, 4}) {
    const auto m = ConductanceModel::sparse_long_range(d);
    const auto v = vertex_rate(m, Point::origin(d), 64.0);
    CHECK(std::abs(v.value + v.tail_bound - 1.0) <= 1e-12);
    CHECK(std::abs(m.total_rate(Point::unit(d, 0, 5)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("axis model vertex rate against a partial zeta sum") {
  // 4 directions, each contributing sum_k k^{-2}; partial sum to 1e6 plus integral tail.
  double partial = 0.0;
  for (int k = 1000000; k >= 1; --k) partial += 4.0 / (static_cast<double>(k) * k);
  const double oracle = partial + 4.0 / 1e6;
  CHECK(oracle == doctest::Approx(4.0 * zeta2()).epsilon(1e-11));

  const auto m = ConductanceModel::axis_stable_like(2, 1.0);
  const auto v = vertex_rate(m, {0, 0}, 64.0);
  CHECK(v.tail_bound > 0.0);
  CHECK(v.value < oracle);
  CHECK(v.value + v.tail_bound >= oracle - 1e-12);
  CHECK(v.value + v.tail_bound == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(m.total_rate({0, 0}) == doctest::Approx(6.579736267392906).epsilon(1e-10));
}

TEST_CASE("finite table vertex rate is exact") {
  const auto m = ConductanceModel::table(1, 2.0, {{Point{1}, 1.0}, {Point{-1}, 1.0}});
  const auto v = vertex_rate(m, {7}, 4.0);
  CHECK(v.value == 2.0);
  CHECK(v.tail_bound == 0.0);
}

TEST_CASE("asymmetric table is rejected") {
  CHECK_THROWS_AS(ConductanceModel::table(1, 2.0, {{Point{1}, 1.0}}), ConfigError);
  CHECK_THROWS_AS(ConductanceModel::table(1, 2.0, {{Point{1}, 1.0}, {Point{-1}, 2.0}}), ConfigError);
}

TEST_CASE("check_A3 on the plane stable-like model") {
  const auto m = ConductanceModel::stable_like(2, 1.0);
  const auto rep = check_A3(m, {2, 4, 8, 16});
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.constant));
  CHECK(std::isfinite(rep.constant_aux));
  CHECK(rep.spread < 4.0);
  CHECK(rep.spread_aux < 4.0);

  // Independent oracle for S1(8): direct lattice sum over 8 <= |z| <= 1000 plus an integral tail.
  double s = 0.0;
  for (int a = -1000; a <= 1000; ++a)
    for (int b = -1000; b <= 1000; ++b) {
      const double n2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
      if (n2 >= 64.0 && n2 <= 1e6) s += std::pow(n2, -1.5);
    }
  const double tail = 2.0 * std::numbers::pi / 1000.0;  // integral of |u|^{-3} beyond 1000
  CHECK(rep.ratios[2] / 8.0 == doctest::Approx(s + tail).epsilon(2e-3));
}

TEST_CASE("check_A3 for a finite-range table beyond its range") {
  const auto m = ConductanceModel::table(1, 2.0, {{Point{1}, 1.0}, {Point{-1}, 1.0}, {Point{2}, 0.5}, {Point{-2}, 0.5}});
  const auto rep = check_A3(m, {3, 4});
  CHECK(rep.ratios[0] == 0.0);
  CHECK(rep.ratios[1] == 0.0);
}

TEST_CASE("check_A3 axis series at r = 2") {
  const double c_hi = 1.5;
  const auto m = ConductanceModel::axis_stable_like(2, 1.0, WeightFunction::oscillating(0.5, c_hi));
  const auto rep = check_A3(m, {2});
  const double s1 = rep.ratios[0] / 2.0;
  CHECK(s1 == doctest::Approx(4.0 * c_hi * (zeta2() - 1.0)).epsilon(1e-5));
  CHECK(s1 <= 4.0 * c_hi);
}

TEST_CASE("rescaling") {
  const auto m = ConductanceModel::stable_like(2, 1.0);
  const auto r1 = rescale(m, 1);
  CHECK(r1.rate({0, 0}, {3, 4}) == m.rate({0, 0}, {3, 4}));
  const auto r2 = rescale(m, 2);
  CHECK(r2.rate({0, 0}, {3, 4}) == doctest::Approx(0.004).epsilon(1e-15));
  CHECK(r2.site_mass() == 0.25);
  const auto r3 = rescale(ConductanceModel::stable_like(1, 1.5), 3);
  CHECK(r3.rate({4}, {4}) == 0.0);
}

TEST_CASE("check_A1 and check_A2") {
  const auto m = ConductanceModel::stable_like(2, 1.0, WeightFunction::oscillating(0.5, 2.0));
  const auto a1 = check_A1(m, 2000, 100, 11);
  CHECK(a1.pass);
  CHECK(a1.constant == 0.0);
  const auto a2 = check_A2(m, {{0, 0}, {5, -3}});
  CHECK(a2.pass);
  CHECK(a2.constant > 0.0);
}

TEST_CASE("table CSV parsing") {
  const auto entries = parse_table_csv("1,0.5\n-1,0.5\n", 1);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].offset == Point{1});
  CHECK(entries[1].rate == 0.5);
  CHECK_THROWS_AS(parse_table_csv("1,2,3\n", 1), ConfigError);
}

}  // TEST_SUITE
