#include <doctest.h>

#include <cmath>
#include <set>

#include "cascade/random.hpp"

using namespace cascade;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                   A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                   A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK(std::abs(normal_quantile(0.5)) < 1e-15);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
  for (int k = 1; k < 1000; ++k) {
    const double p = k / 1000.0;
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-14);
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
}

TEST_CASE("streams are deterministic and keyed") {
  Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_id = false, differs_seed = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_id = differs_id || x != c.next_u64();
    differs_seed = differs_seed || x != d.next_u64();
  }
  CHECK(differs_id);
  CHECK(differs_seed);
}

TEST_CASE("uniform stays in the open unit interval and below respects its bound") {
  Stream s(1, 1);
  double sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / kN - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / kN));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const auto k = s.below(7);
    REQUIRE(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
  CHECK(bits_to_open_unit(0) > 0.0);
  CHECK(bits_to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("keyed normals are addressable in any order") {
  const double x = keyed_normal(5, 1, 42);
  for (int i = 0; i < 100; ++i) (void)keyed_normal(5, 1, static_cast<std::uint64_t>(i));
  CHECK(keyed_normal(5, 1, 42) == x);
  CHECK(keyed_normal(5, 2, 42) != x);
  CHECK(derive(1, 2) != derive(2, 1));
}
