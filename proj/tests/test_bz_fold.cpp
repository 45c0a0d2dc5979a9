#include "doctest.h"
#include "flattori/bz_fold.hpp"
#include "flattori/flat_mesh.hpp"
#include "flattori/moduli.hpp"
#include "flattori/verify.hpp"

#include <Eigen/Geometry>
#include <set>

using namespace flattori;

namespace {

TrianglePair scaled_pair(const std::array<Vec2, 3>& T, double lambda) {
  TrianglePair p;
  p.T = T;
  const Vec2 c = (T[0] + T[1] + T[2]) / 3;
  for (int i = 0; i < 3; ++i) {
    const Vec2 q = c + lambda * (T[i] - c);
    p.t[i] = Vec3(q.x(), q.y(), 0);
  }
  return p;
}

const std::array<Vec2, 3> kEquilateral{Vec2(0, 0), Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2)};

}  // namespace

TEST_CASE("pair conditions") {
  CHECK(check_pair(scaled_pair(kEquilateral, 0.9)).ok);
  const auto same = check_pair(scaled_pair(kEquilateral, 1.0));
  CHECK_FALSE(same.ok);
  CHECK(same.violated.find("(ii)") != std::string::npos);
  const auto right = check_pair(scaled_pair({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, 0.9));
  CHECK_FALSE(right.ok);
  CHECK(right.violated.find("(i)") != std::string::npos);
  CHECK_THROWS_AS(fold_triangle(scaled_pair(kEquilateral, 1.0)), Error);
}

TEST_CASE("single side fold is an embedded isometric copy") {
  for (double lambda : {0.9, 0.5, 0.2}) {
    const auto p = scaled_pair(kEquilateral, lambda);
    for (int k = 0; k < 3; ++k) {
      const auto r = fold_subtriangle(p, k);
      CHECK(r.residual < 1e-9);
      CHECK(r.mesh.base.tris.size() == static_cast<std::size_t>(2 * (2 * r.pleats[k] + 1)));
      CHECK(check_isometry(r.mesh, chart_metric(r.mesh)) < 1e-12);
      CHECK(self_intersection(r.mesh).empty());
      // apex lies over the circumcenter of the base triangle
      CHECK(std::abs(r.mesh.pos[3].x() - 0.5) < 1e-12);
    }
  }
  CHECK(fold_subtriangle(scaled_pair(kEquilateral, 0.9), 0).pleats[0] == 1);
  CHECK(fold_subtriangle(scaled_pair(kEquilateral, 0.2), 0).pleats[0] > 1);
}

TEST_CASE("folded triangle is a disk") {
  for (double lambda : {0.9, 0.3}) {
    const auto r = fold_triangle(scaled_pair(kEquilateral, lambda));
    int expect = 0;
    for (int k = 0; k < 3; ++k) expect += 2 * (2 * r.pleats[k] + 1);
    CHECK(r.mesh.base.tris.size() == static_cast<std::size_t>(expect));
    std::set<std::pair<int, int>> edges;
    for (const auto& t : r.mesh.base.tris)
      for (int i = 0; i < 3; ++i) edges.insert(std::minmax(t[i], t[(i + 1) % 3]));
    const long chi = r.mesh.base.vertex_count - static_cast<long>(edges.size()) +
                     static_cast<long>(r.mesh.base.tris.size());
    CHECK(chi == 1);
    CHECK(check_isometry(r.mesh, chart_metric(r.mesh)) < 1e-12);
    CHECK(self_intersection(r.mesh).empty());
    double area = 0;
    for (const auto& c : r.mesh.chart) area += 0.5 * std::abs((c[1] - c[0]).x() * (c[2] - c[0]).y() -
                                                             (c[1] - c[0]).y() * (c[2] - c[0]).x());
    CHECK(area == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));
  }
}

TEST_CASE("neighbors across a bent edge share the boundary polyline") {
  const std::array<Vec2, 3> T1{Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 0.8)};
  const std::array<Vec2, 3> T2{Vec2(1, 0), Vec2(0, 0), Vec2(0.5, -0.8)};
  auto p1 = scaled_pair(T1, 1.0), p2 = scaled_pair(T2, 1.0);
  // shrink both about the midpoint of the shared edge, then bend 5 degrees along it
  const Vec3 c(0.5, 0, 0);
  const Eigen::AngleAxisd bend(5 * kPi / 180, Vec3::UnitX());
  for (int i = 0; i < 3; ++i) {
    p1.t[i] = c + 0.9 * (p1.t[i] - c);
    p2.t[i] = c + bend * (0.9 * (p2.t[i] - c));
  }
  p1.normal = Vec3::UnitZ();
  p2.normal = bend * Vec3::UnitZ();
  REQUIRE(check_pair(p1).ok);
  REQUIRE(check_pair(p2).ok);
  const Vec3 u = (p1.normal + p2.normal).normalized();
  auto tilt_for = [&](const TrianglePair& p, int k) {
    // direction u in the side's bisector plane, measured from the inward horizontal
    const Vec3 e = (p.t[(k + 1) % 3] - p.t[k]).normalized();
    const Vec3 n = p.normal;
    Vec3 din = e.cross(n);
    const Vec3 om = (p.t[0] + p.t[1] + p.t[2]) / 3;
    if (din.dot(om - 0.5 * (p.t[k] + p.t[(k + 1) % 3])) < 0) din = -din;
    const double psi = std::atan2(u.dot(n), u.dot(din));
    const auto [lo, hi] = wedge_angle_range(p, k);
    CHECK(psi > lo);
    CHECK(psi < hi);
    return psi - kPi / 2;
  };
  const auto r1 = fold_triangle(p1, {tilt_for(p1, 0), 0, 0});
  const auto r2 = fold_triangle(p2, {tilt_for(p2, 0), 0, 0});
  const auto& b1 = r1.boundary_polylines[0];
  const auto& b2 = r2.boundary_polylines[0];
  CHECK((b1[0] - b2[2]).norm() < 1e-9);
  CHECK((b1[1] - b2[1]).norm() < 1e-9);
  CHECK((b1[2] - b2[0]).norm() < 1e-9);
}

TEST_CASE("BZ torus for the square modulus") {
  BzOptions opt;
  opt.face_budget = 300000;
  const auto r = assemble_bz_torus(Modulus(0, 1), opt);
  CHECK(r.method == BzMethod::Rect);
  CHECK(static_cast<long>(r.mesh.base.tris.size()) <= opt.face_budget);
  const auto v = verify_mesh(r.mesh);
  CHECK(v.isometry_max_rel_error < 1e-8);
  CHECK(v.euler.chi == 0);
  CHECK(v.euler.closed);
  CHECK(v.self_intersections.empty());
  REQUIRE(v.extracted_modulus.has_value());
  CHECK(std::abs(*v.extracted_modulus - Modulus(0, 1)) < 1e-6);

  opt.face_budget = 1000;
  CHECK_THROWS_AS(assemble_bz_torus(Modulus(0, 1), opt), Error);
}
