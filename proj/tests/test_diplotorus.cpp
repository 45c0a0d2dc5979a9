#include "doctest.h"
#include "flattori/diplotorus.hpp"
#include "flattori/moduli.hpp"
#include "flattori/verify.hpp"

#include <random>

using namespace flattori;

namespace {
bool same_torus(Modulus x, Modulus y, double tol) {
  const Modulus rx = reduce_to_fundamental_domain(x).tau, ry = reduce_to_fundamental_domain(y).tau;
  return std::abs(rx - ry) < tol;
}
}  // namespace

TEST_CASE("the 5,2 diplotorus with a=3.5, h=2") {
  const DiplotorusParams p{5, 2, 3.5, 2};
  const auto m = build_diplotorus(p);
  CHECK(m.base.tris.size() == 20);
  CHECK(m.pos.size() == 10);
  const auto a = euler_audit(m.base);
  CHECK(a.chi == 0);
  CHECK(a.orientable);
  CHECK(self_intersection(m).empty());
  CHECK(check_flatness(induced_metric(m)) < 1e-10);
  CHECK(same_torus(extract_modulus(m), modulus_formula(p), 1e-9));
}

TEST_CASE("diplotorus parameter rejection") {
  CHECK_THROWS_AS(build_diplotorus({5, 2, 3, 1}), Error);
  CHECK_THROWS_AS(build_diplotorus({3, 2, 3.5, 1}), Error);
  CHECK_THROWS_AS(build_diplotorus({5, 2, 3.5, 0}), Error);
}

TEST_CASE("real part does not depend on h and imaginary part grows with h") {
  const auto t1 = modulus_formula({19, 7, 12.3, 0.1}), t2 = modulus_formula({19, 7, 12.3, 1}),
             t3 = modulus_formula({19, 7, 12.3, 10});
  CHECK(t1.real() == t2.real());
  CHECK(t2.real() == t3.real());
  CHECK(t1.imag() < t2.imag());
  CHECK(t2.imag() < t3.imag());
}

TEST_CASE("closed form agrees with development on random families") {
  std::mt19937_64 rng(3);
  int done = 0;
  while (done < 200) {
    const int n = std::uniform_int_distribution<int>(5, 25)(rng);
    int d = std::uniform_int_distribution<int>(2, n - 3)(rng);
    if (rng() % 2) d = -d;
    const double lo = d > 0 ? d + 1 : 1 - n, hi = d > 0 ? n - 1 : d - 1;
    if (hi - lo < 1e-6) continue;
    const double a = lo + (hi - lo) * std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    const double h = std::uniform_real_distribution<double>(0.05, 5)(rng);
    const DiplotorusParams p{n, d, a, h};
    const auto m = build_diplotorus(p);
    CHECK(same_torus(extract_modulus(m), modulus_formula(p), 1e-8));
    ++done;
  }
}

TEST_CASE("random legal diplotori are embedded") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const int n = std::uniform_int_distribution<int>(5, 21)(rng);
    const int d = std::uniform_int_distribution<int>(2, n - 3)(rng);
    const double a = d + 1 + (n - d - 2) * std::uniform_real_distribution<double>(0.02, 0.98)(rng);
    const double h = std::uniform_real_distribution<double>(0.05, 3)(rng);
    CHECK(self_intersection(build_diplotorus({n, d, a, h})).empty());
  }
}

TEST_CASE("solver round trip in the 19 families") {
  std::mt19937_64 rng(9);
  for (int d : {2, 7, 13})
    for (int i = 0; i < 30; ++i) {
      const double a = d + 1 + (18 - d - 1) * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
      const double h = std::uniform_real_distribution<double>(0.01, 3)(rng);
      const auto tau = modulus_formula({19, d, a, h});
      const auto p = solve_params(19, d, tau);
      CHECK(std::abs(p.a - a) < 1e-8);
      CHECK(std::abs(p.h - h) < 1e-8);
      CHECK(std::abs(modulus_formula(p) - tau) < 1e-9);
    }
  const auto floor = diplotorus_floor(19, 2, 10);
  CHECK_THROWS_AS(solve_params(19, 2, {floor.real(), floor.imag() * 0.9}), Error);
}

TEST_CASE("hexagonal modulus is solved in a family containing it") {
  const Modulus w = std::polar(1.0, kPi / 3);
  const auto choice = select_realization(w);
  const auto p = solve_params(19, choice.d, choice.target);
  CHECK(std::abs(modulus_formula(p) - choice.target) < 1e-9);
}

TEST_CASE("interpenetrating triangles are reported") {
  GeometricMesh m;
  m.base.vertex_count = 6;
  m.pos = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.2, 0.2, -1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.3, 1)};
  m.base.tris = {{0, 1, 2}, {3, 4, 5}};
  const auto hits = self_intersection(m);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == std::make_pair(0, 1));
}

TEST_CASE("isometry of a scaled mesh") {
  auto m = build_diplotorus({7, 3, 5, 1});
  const auto ref = induced_metric(m);
  CHECK(check_isometry(m, ref) < 1e-15);
  for (auto& p : m.pos) p *= 0.5;
  CHECK(std::abs(check_isometry(m, ref) - 0.5) < 1e-14);
}

TEST_CASE("cube corner cone angle") {
  MetricTriangulation mt;
  mt.base.vertex_count = 4;
  const double r = std::sqrt(2.0);
  mt.base.tris = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  mt.len = {{1, r, 1}, {1, r, 1}, {1, r, 1}, {r, r, r}};
  const auto sums = angle_sums(mt);
  CHECK(std::abs(sums[0] - 1.5 * kPi) < 1e-12);
}
