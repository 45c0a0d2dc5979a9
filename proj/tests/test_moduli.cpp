#include "doctest.h"
#include "flattori/moduli.hpp"

#include <random>

using namespace flattori;

TEST_CASE("integer translation reduces to i") {
  const auto r = reduce_to_fundamental_domain({5, 1});
  CHECK(std::abs(r.tau - Modulus(0, 1)) < 1e-14);
  CHECK(r.map == UnimodularMap{1, -5, 0, 1});
}

TEST_CASE("half-integer point reduces to i") {
  const Modulus z(0.5, 0.5);
  const auto r = reduce_to_fundamental_domain(z);
  CHECK(std::abs(r.tau - Modulus(0, 1)) < 1e-13);
  CHECK(std::abs(apply_mobius(r.map, z) - r.tau) < 1e-13);
  CHECK(r.map.det() == 1);
}

TEST_CASE("reduced moduli and classification") {
  CHECK(reduce_to_fundamental_domain({0.3, 16}).map == UnimodularMap::identity());
  // real part 0.558 exceeds 1/2, so one unit translation is needed
  const auto r = reduce_to_fundamental_domain({0.558, 16});
  CHECK(r.map == UnimodularMap{1, -1, 0, 1});
  CHECK(std::abs(r.tau - Modulus(-0.442, 16)) < 1e-12);
  CHECK(classify(r.tau) == ModulusClass::Short);
  CHECK(classify({0, 40}) == ModulusClass::Long);
  CHECK_THROWS_AS(classify({0.9, 2}), Error);
}

TEST_CASE("g1 fixes the hexagonal point and sends i to (1+i)/2") {
  const Modulus w = std::polar(1.0, kPi / 3);
  CHECK(std::abs(apply_mobius(UnimodularMap::g_delta(1), w) - w) < 1e-14);
  CHECK(std::abs(apply_mobius(UnimodularMap::g_delta(1), {0, 1}) - Modulus(0.5, 0.5)) < 1e-14);
}

TEST_CASE("reduction is invariant under the group action") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ent(-20, 20);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(1.0, 5.0);
  int done = 0;
  while (done < 200) {
    UnimodularMap g{ent(rng), ent(rng), ent(rng), ent(rng)};
    if (g.det() != 1) continue;
    Modulus z(re(rng), im(rng));
    if (std::abs(z) < 1.0 + 1e-6 || std::abs(std::abs(z.real()) - 0.5) < 1e-6) continue;
    const auto r0 = reduce_to_fundamental_domain(z);
    const auto r1 = reduce_to_fundamental_domain(apply_mobius(g, z));
    CHECK(std::abs(r0.tau - r1.tau) < 1e-8);
    ++done;
  }
}

TEST_CASE("g_delta maps horizontal lines onto horocycle circles") {
  for (int delta : {1, 3, 5})
    for (double h : {1.0, 12.0, 25.0, 33.0})
      for (double x = -2; x <= 2; x += 0.25) {
        const Modulus w = apply_mobius(UnimodularMap::g_delta(delta), {x, h});
        CHECK(std::abs(std::abs(w - Modulus(0, 1 / (2 * h))) - 1 / (2 * h)) < 1e-12);
      }
}

TEST_CASE("regions of the 19-families") {
  const auto r2 = region_19d(2);
  const double s2 = std::sin(2 * kPi / 19), ct = 1 / std::tan(kPi / 19);
  const Modulus z2((2 - s2 * ct) / 19, s2 / 19);
  CHECK(std::abs(std::get<VerticalRay>(r2.boundary.front()).base - z2) < 1e-12);
  const auto r13 = region_19d(13);
  CHECK(r13.boundary.size() == 3);
  CHECK(std::holds_alternative<Segment>(r13.boundary[1]));
  CHECK_THROWS_AS(region_19d(5), Error);
  for (int d : {2, 7, 13}) {
    const auto r = region_19d(d);
    const double x = 0.5 * (r.left() + r.right());
    CHECK(r.contains({x, r.lower_at(x) + 0.01}));
    CHECK_FALSE(r.contains({x, r.lower_at(x) - 0.01}));
  }
}

TEST_CASE("realization choices") {
  const auto lng = select_realization({0, 40});
  CHECK(lng.kind == RealizationKind::ZalgallerLong);
  CHECK_FALSE(lng.mirror);
  const auto hex = select_realization(std::polar(1.0, kPi / 3));
  CHECK(hex.kind == RealizationKind::Diplotorus);
  CHECK(hex.gamma == UnimodularMap::g_delta(1));
  const auto mid = select_realization({0.25, 20});
  CHECK(mid.gamma == UnimodularMap::g_delta(3));
  CHECK(select_realization({-0.25, 20}).mirror);
}

TEST_CASE("coverage of the short moduli space") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(0, 0.5), im(0.8, 33);
  int n = 0;
  while (n < 10000) {
    Modulus z(re(rng), im(rng));
    if (std::abs(z) < 1) continue;
    CHECK_NOTHROW(select_realization(z));
    ++n;
  }
}

TEST_CASE("appendix corner values") {
  const auto rep = verify_appendix_inequalities(2000);
  bool found_a1 = false;
  for (const auto& c : rep.checks)
    if (c.name.rfind("corner A1", 0) == 0) {
      found_a1 = true;
      CHECK(c.ok);
    }
  CHECK(found_a1);
  CHECK(appendix_f(4, 1.0) > 0);
}
