#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlcp/ambiguity.hpp"
#include "support/oracles.hpp"

using namespace drlcp;

TEST_CASE("sample CSV parsing") {
  DisturbanceSpace space = DisturbanceSpace::box(2, 1, 0.0, 10.0);

  SUBCASE("comments and blank lines are skipped") {
    auto rows = parse_samples("# header\n1,2\n\n3.5, 4.5\n", space);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == doctest::Approx(3.5));
    CHECK(rows[1][1] == doctest::Approx(4.5));
  }
  SUBCASE("wrong column count") {
    CHECK_THROWS_AS(parse_samples("1,2,3\n", space), ParseError);
  }
  SUBCASE("non-numeric cell") {
    CHECK_THROWS_AS(parse_samples("1,abc\n", space), ParseError);
  }
  SUBCASE("value outside the support") {
    CHECK_THROWS_AS(parse_samples("1,99\n", space), OutOfSupport);
  }
}

TEST_CASE("set validation") {
  DisturbanceSpace space = DisturbanceSpace::box(1, 1, 0.0, 1.0);

  WassersteinSet w{0.5, {{0.2}, {0.8}}};
  w.validate(space);
  WassersteinSet neg{-0.1, {{0.2}}};
  CHECK_THROWS_AS(neg.validate(space), Error);
  WassersteinSet empty{0.1, {}};
  CHECK_THROWS_AS(empty.validate(space), Error);

  MixedMomentSet mm{w, {0.1}, {0.9}};
  mm.validate(space);
  MixedMomentSet crossed{w, {0.9}, {0.1}};
  CHECK_THROWS_AS(crossed.validate(space), Error);

  EventWiseSet ew{{0.3, 0.7}, {w, w}};
  ew.validate({space, space});
  EventWiseSet bad_prob{{0.3, 0.3}, {w, w}};
  CHECK_THROWS_AS(bad_prob.validate({space, space}), Error);
}

TEST_CASE("exact transportation distance on known cases") {
  CHECK(estimate_radius({{0.0}}, {{3.0}}) == doctest::Approx(3.0));
  CHECK(estimate_radius({{0.0}, {2.0}}, {{1.0}, {3.0}}) == doctest::Approx(1.0));
  // identical sets, different order
  CHECK(estimate_radius({{1.0}, {5.0}}, {{5.0}, {1.0}}) == doctest::Approx(0.0));
  // unequal sizes: mass 1/2 vs 1/3 each
  CHECK(estimate_radius({{0.0}, {6.0}}, {{0.0}, {3.0}, {6.0}}) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // 2-D with 1-norm ground metric
  CHECK(estimate_radius({{0.0, 0.0}}, {{1.0, 2.0}}) == doctest::Approx(3.0));
}

TEST_CASE("transportation LP agrees with sorted pairing in one dimension") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<double>> a, b;
    std::vector<double> av, bv;
    for (int k = 0; k < n; ++k) {
      av.push_back(dist(rng));
      bv.push_back(dist(rng));
      a.push_back({av.back()});
      b.push_back({bv.back()});
    }
    CHECK(estimate_radius(a, b) ==
          doctest::Approx(testsupport::sorted_pairing_distance(av, bv)).epsilon(1e-9));
  }
}
