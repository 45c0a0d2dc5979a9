#include "doctest.h"
#include "flattori/flat_mesh.hpp"
#include "flattori/moduli.hpp"

#include <numeric>

using namespace flattori;

namespace {
double heron_total(const MetricTriangulation& mt) {
  double s = 0;
  for (const auto& l : mt.len) {
    const double p = 0.5 * (l[0] + l[1] + l[2]);
    s += std::sqrt(p * (p - l[0]) * (p - l[1]) * (p - l[2]));
  }
  return s;
}
Modulus modulus_of(const Development& d) {
  const Modulus a(d.w1.x(), d.w1.y()), b(d.w2.x(), d.w2.y());
  Modulus t = b / a;
  if (t.imag() < 0) t = std::conj(t);
  return reduce_to_fundamental_domain(t).tau;
}
}  // namespace

TEST_CASE("square torus with one vertex") {
  const auto lt = lattice_triangulation({0, 1}, 1);
  const auto a = euler_audit(lt.metric.base);
  CHECK(a.V == 1);
  CHECK(a.E == 3);
  CHECK(a.F == 2);
  CHECK(a.chi == 0);
  CHECK(a.orientable);
  CHECK_FALSE(a.simplicial);
}

TEST_CASE("hexagonal modulus gives equilateral faces") {
  for (int n : {1, 2, 5}) {
    const auto lt = lattice_triangulation(std::polar(1.0, kPi / 3), n);
    for (const auto& l : lt.metric.len)
      for (double x : l) CHECK(std::abs(x - 1.0 / n) < 1e-14);
  }
}

TEST_CASE("lattice point is close to the modulus and metric is flat") {
  for (Modulus tau : {Modulus(0.558, 16), Modulus(0.3, 1.2), Modulus(-0.4, 3.3)})
    for (int n : {1, 3, 8}) {
      const auto lt = lattice_triangulation(tau, n);
      const Modulus p = (double(lt.a) + double(lt.b) * std::polar(1.0, kPi / 3)) / double(n);
      CHECK(std::abs(tau - p) <= 1 / (n * std::sqrt(3.0)) + 1e-12);
      for (double s : angle_sums(lt.metric)) CHECK(std::abs(s - 2 * kPi) < 1e-9);
      const auto d = develop(lt.metric);
      REQUIRE(d.has_lattice);
      CHECK(std::abs(modulus_of(d) - reduce_to_fundamental_domain(tau).tau) < 1e-9);
      CHECK(euler_audit(lt.metric.base).chi == 0);
    }
}

TEST_CASE("development reproduces edge lengths") {
  const auto lt = lattice_triangulation({0.2, 2.1}, 4);
  const auto d = develop(lt.metric);
  for (std::size_t f = 0; f < d.face_xy.size(); ++f)
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs((d.face_xy[f][(i + 1) % 3] - d.face_xy[f][i]).norm() - lt.metric.len[f][i]) < 1e-10);
}

TEST_CASE("subdivision counts, area and flatness") {
  const auto lt = lattice_triangulation({0, 1}, 1);
  CHECK(uniform_subdivide(lt.metric, 1).base.tris.size() == 2);
  const auto s3 = uniform_subdivide(lt.metric, 3);
  CHECK(s3.base.tris.size() == 18);
  const auto a = euler_audit(s3.base);
  CHECK(a.chi == 0);
  CHECK(a.V == 9);
  CHECK(std::abs(heron_total(s3) - heron_total(lt.metric)) < 1e-10);
  for (double s : angle_sums(s3)) CHECK(std::abs(s - 2 * kPi) < 1e-9);
  const auto d = develop(s3);
  CHECK(std::abs(modulus_of(d) - Modulus(0, 1)) < 1e-9);
}

TEST_CASE("midpoint subdivision of an equilateral torus") {
  const auto lt = lattice_triangulation(std::polar(1.0, kPi / 3), 1);
  const auto s2 = uniform_subdivide(lt.metric, 2);
  CHECK(s2.base.tris.size() == 8);
  for (const auto& l : s2.len)
    for (double x : l) CHECK(std::abs(x - 0.5) < 1e-14);
}

TEST_CASE("cone vertices are rejected by develop") {
  auto lt = lattice_triangulation({0, 1}, 2);
  lt.metric.len[0] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(develop(lt.metric), Error);
}
