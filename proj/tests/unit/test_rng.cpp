#include <doctest.h>

#include <cmath>
#include <set>

#include <hklab/rng.hpp>

using namespace hklab;

TEST_SUITE("rng") {

// Known-answer vectors of the Random123 reference distribution for philox4x32-10.
TEST_CASE("philox known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next64();
    CHECK(x == b.next64());
    CHECK(x != c.next64());
    CHECK(x != d.next64());
  }
  CHECK(a.draws() == 100);
}

TEST_CASE("uniform ranges and moments") {
  RandomStream r(1, 0);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_pos();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

}  // TEST_SUITE
