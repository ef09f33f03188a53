#include <doctest.h>

#include <set>

#include <hklab/lattice.hpp>

using namespace hklab;

TEST_SUITE("lattice") {

TEST_CASE("window sizes and measures") {
  const auto w1 = make_window({-2}, {3});
  CHECK(w1.size() == 5);
  CHECK(w1.measure() == 5.0);
  const auto w2 = make_window({0, 0}, {4, 4}, 2);
  CHECK(w2.size() == 16);
  CHECK(w2.measure() == 4.0);
}

TEST_CASE("indexer round-trips") {
  const auto w = make_window({0, 0, 0}, {2, 2, 2});
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Point p = w.point(i);
    CHECK(w.index(p) == i);
    seen.insert(i);
  }
  CHECK(seen.size() == 8);
  CHECK_FALSE(w.try_index({2, 0, 0}).has_value());
}

TEST_CASE("ball of radius 1.5 in the plane has 9 points") {
  const auto w = make_window({-2, -2}, {3, 3});
  const auto s = make_set(w, SetDescriptor::ball({0, 0}, 1.5));
  std::size_t brute = 0;
  for (std::int64_t a = -2; a <= 2; ++a)
    for (std::int64_t b = -2; b <= 2; ++b)
      if (a * a + b * b < 2.25) ++brute;
  CHECK(brute == 9);
  CHECK(s.count() == brute);
  CHECK_FALSE(s.clipped());
}

TEST_CASE("open unit cube is a single point") {
  const auto w = make_window({-2, -2}, {3, 3});
  const auto s = make_set(w, SetDescriptor::cube({0, 0}, 1.0));
  CHECK(s.count() == 1);
  CHECK(s.contains({0, 0}));
}

TEST_CASE("small ball is its centre") {
  const auto w = make_window({-3}, {4});
  const auto s = make_set(w, SetDescriptor::ball({2}, 0.5));
  CHECK(s.count() == 1);
  CHECK(s.contains({2}));
}

TEST_CASE("clipping is flagged") {
  const auto w = make_window({0}, {4});
  const auto s = make_set(w, SetDescriptor::ball({0}, 3.0));
  CHECK(s.clipped());
  CHECK(s.count() == 3);
  CHECK_FALSE(set_fits(w, SetDescriptor::ball({0}, 3.0)));
}

TEST_CASE("rescaled ball uses rescaled distance") {
  // Ball(0, 1) at scale 2: labels u with |u| / 2 < 1.
  const auto pts = enumerate_set(1, 2, SetDescriptor::ball({0}, 1.0));
  CHECK(pts.size() == 3);
}

TEST_CASE("set algebra") {
  const auto w = make_window({-4}, {5});
  const auto a = make_set(w, SetDescriptor::ball({-1}, 2.0));
  const auto b = make_set(w, SetDescriptor::ball({1}, 2.0));
  CHECK(a.set_union(b).count() == 5);
  CHECK(a.set_intersection(b).count() == 1);
  CHECK(a.set_intersection(b).subset_of(a));
}

TEST_CASE("bad windows are rejected") {
  CHECK_THROWS_AS(make_window({0}, {0}), ConfigError);
  CHECK_THROWS_AS(make_window({0}, {3}, 0), ConfigError);
}

}  // TEST_SUITE
