#include "doctest.h"
#include "flattori/flat_mesh.hpp"
#include "flattori/universal.hpp"
#include "flattori/verify.hpp"

#include <numeric>
#include <set>

using namespace flattori;

namespace {

// Crossings of the B-C band slopes {d, d+1 : d in 2, 7, 13}, counted with plain integer
// fractions: lines x = a + s y, a in Z, meeting at 0 < y < 1, points taken mod 19.
int band_crossings_oracle() {
  std::vector<int> slopes;
  for (int d : {2, 7, 13}) slopes.push_back(d), slopes.push_back(d + 1);
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  std::set<std::tuple<long, long, long>> pts;  // (x numerator mod 19q, y numerator, q)
  for (std::size_t i = 0; i < slopes.size(); ++i)
    for (std::size_t j = i + 1; j < slopes.size(); ++j) {
      const long q = slopes[j] - slopes[i];
      // a1 + s1 y = a2 + s2 y  =>  y = (a1 - a2) / q with a2 = 0
      for (long a1 = 1; a1 < q; ++a1) {
        long yn = a1, yd = q;
        const long g = std::gcd(yn, yd);
        yn /= g, yd /= g;
        const long xn = ((a1 * yd + slopes[i] * yn) % (19 * yd) + 19 * yd) % (19 * yd);
        for (long shift = 0; shift < 19; ++shift)
          pts.insert({(xn + shift * yd) % (19 * yd), yn, yd});
      }
    }
  return static_cast<int>(pts.size()) / 19;
}

}  // namespace

TEST_CASE("strip layouts") {
  for (int d : {2, 7, 13}) {
    const auto s = strip_layout(d);
    CHECK(s.triangles.size() == 76);
    const auto a = euler_audit(strip_quotient(s));
    CHECK(a.V == 38);
    CHECK(a.F == 76);
    CHECK(a.chi == 0);
    CHECK(a.closed);
  }
  CHECK_THROWS_AS(strip_layout(0), Error);
}

TEST_CASE("short overlay census") {
  ShortCensus c;
  const auto ov = overlay_short(&c);
  CHECK(band_crossings_oracle() == 56);
  CHECK(c.intersections_per_period == 56);
  CHECK(c.intersection_vertices == 1064);
  CHECK(c.vertices == 1102);
  CHECK(c.triangles == 2204);
  CHECK(c.chi == 0);
  const auto a = euler_audit(ov.triangulated);
  CHECK(a.chi == 0);
  CHECK(a.closed);
  CHECK(a.orientable);
}

TEST_CASE("merged overlay census") {
  const auto& U = merged_overlay();
  const auto& c = U.census;
  CHECK(euler_audit(U.long_layout).chi == 0);
  CHECK(c.E_c == 45);
  CHECK(c.V_long == 135);
  CHECK(c.V_cap == 1064);
  CHECK(c.central_edges == 35);
  CHECK(c.V_c == 45);
  CHECK(c.V_c_new == 43);
  CHECK(c.short_originals == 36);
  CHECK(c.V_ext[1] == 47);
  CHECK(c.V_ext[2] == 47);
  CHECK(c.V_ext[0] < 41);  // rib 0 passes through short-short crossings
  // every vertex is accounted for by exactly one family
  CHECK(c.vertices == c.V_cap + c.short_originals + c.V_long + c.ext_crossings + c.central_edges * c.V_c_new + c.V_d);
  CHECK(c.chi == 0);
  CHECK(c.triangles == 2 * c.vertices);
  const auto a = euler_audit(U.overlay.triangulated);
  CHECK(a.chi == 0);
  CHECK(a.closed);
  CHECK(a.orientable);
}

TEST_CASE("merged overlay refines every coarse complex") {
  const auto& U = merged_overlay();
  const std::size_t F = U.overlay.triangulated.tris.size();
  std::vector<const CellMap*> maps{&U.long_cells, &U.short_cells[0], &U.short_cells[1], &U.short_cells[2]};
  const std::array<std::size_t, 4> coarse{U.long_layout.tris.size(), 76, 76, 76};
  double worst = 0;
  for (std::size_t m = 0; m < 4; ++m) {
    std::set<int> hit;
    for (std::size_t f = 0; f < F; ++f) {
      hit.insert(maps[m]->face[f]);
      for (const auto& b : maps[m]->bary[f]) {
        CHECK(std::abs(b.sum() - 1) < 1e-14);
        if (m > 0) CHECK(b.minCoeff() > -1e-14);
        else worst = std::min(worst, b.minCoeff());
      }
    }
    // removed rectangle diagonals let one long cell serve a whole planar rectangle
    if (m > 0) CHECK(hit.size() == coarse[m]);
    else CHECK(hit.size() + 4 > coarse[m]);
  }
  CHECK(worst > -1.5);
}

TEST_CASE("one triangulation realizes every modulus") {
  const auto& base = merged_overlay().overlay.triangulated;
  for (Modulus t : {Modulus(0, 1), Modulus(0.5, std::sqrt(3.0) / 2), Modulus(0.3, 2), Modulus(-0.3, 2),
                    Modulus(0, 40), Modulus(0.2, 35)}) {
    const auto r = realize_universal(t);
    CHECK(r.mesh.base.tris == base.tris);
    const auto v = verify_mesh(r.mesh);
    CHECK(v.isometry_max_rel_error < 1e-8);
    CHECK(v.euler.chi == 0);
    CHECK(v.self_intersections.empty());
    REQUIRE(v.extracted_modulus.has_value());
    // mirror images are isometric; the fixed orientation decides which one is reported
    const Modulus want = reduce_to_fundamental_domain(t).tau;
    const Modulus got = reduce_to_fundamental_domain(*v.extracted_modulus).tau;
    const Modulus mirrored = reduce_to_fundamental_domain(-std::conj(want)).tau;
    double err = 1e300;
    for (const Modulus& w : {want, mirrored})
      for (int s : {-1, 0, 1}) err = std::min(err, std::abs(got - w - double(s)));  // Re = 1/2 ties
    CHECK(err < 1e-6);
  }
  CHECK_THROWS_AS(realize_universal(Modulus(0, -1)), Error);
}
