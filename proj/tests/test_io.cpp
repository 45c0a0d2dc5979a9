#include "doctest.h"
#include "flattori/diplotorus.hpp"
#include "flattori/flat_mesh.hpp"
#include "flattori/io.hpp"
#include "flattori/universal.hpp"
#include "flattori/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

using namespace flattori;

namespace {

long count_prefix(const std::string& s, const std::string& p) {
  long n = 0;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, p.size(), p) == 0) ++n;
    i = s.find('\n', i);
    if (i == std::string::npos) break;
    ++i;
  }
  return n;
}

GeometricMesh with_chart(GeometricMesh m) {
  for (const auto& t : m.base.tris) {
    const Vec3 a = m.pos[t[0]], b = m.pos[t[1]], c = m.pos[t[2]];
    const double l = (b - a).norm();
    const Vec3 e = (b - a) / l;
    const double x = (c - a).dot(e);
    m.chart.push_back({Vec2(0, 0), Vec2(l, 0), Vec2(x, ((c - a) - x * e).norm())});
  }
  return m;
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("OBJ line counts and bit-exact round trip") {
  const auto m = with_chart(build_diplotorus({5, 2, 3.5, 2}));
  const std::string obj = to_obj(m);
  CHECK(count_prefix(obj, "v ") == 10);
  CHECK(count_prefix(obj, "f ") == 20);
  CHECK(obj.find('\r') == std::string::npos);
  const auto back = parse_obj(obj);
  CHECK(back.pos == m.pos);
  CHECK(back.base.tris == m.base.tris);
  CHECK(to_obj(back) == obj);
}

TEST_CASE("OFF round trip") {
  const auto m = build_diplotorus({5, 2, 3.5, 2});
  const std::string off = to_off(m);
  CHECK(off.rfind("OFF\n10 20 0\n", 0) == 0);
  const auto back = parse_off(off);
  CHECK(back.pos == m.pos);
  CHECK(back.base.tris == m.base.tris);
  CHECK_THROWS_AS(parse_off("OFF\n1 1 0\n0 0 0\n4 0 0 0 0\n"), Error);
}

TEST_CASE("triangulation JSON keeps explicit twins") {
  const auto& t = merged_overlay().overlay.triangulated;
  const auto back = parse_triangulation_json(triangulation_json(t));
  CHECK(back.vertex_count == t.vertex_count);
  CHECK(back.tris == t.tris);
  CHECK(back.twin == t.twin);
  CHECK_THROWS_AS(parse_triangulation_json("{\"format\": 3}"), Error);
}

TEST_CASE("files with sidecar re-verify") {
  const Modulus tau(0.5, std::sqrt(3.0) / 2);
  const auto r = realize_universal(tau);
  const std::string path = tmp("flattori_io_test.obj");
  export_mesh(r.mesh, path, tau);
  const std::string obj = read_file(path);
  CHECK(count_prefix(obj, "f ") == static_cast<long>(merged_overlay().overlay.triangulated.tris.size()));
  std::optional<Modulus> got;
  const auto m = import_mesh(path, &got);
  REQUIRE(got.has_value());
  CHECK(*got == tau);
  CHECK(m.pos == r.mesh.pos);
  CHECK(m.base.twin == r.mesh.base.twin);
  CHECK(m.chart.size() == r.mesh.chart.size());
  for (std::size_t f = 0; f < m.chart.size(); ++f)
    for (int i = 0; i < 3; ++i) CHECK(m.chart[f][i] == r.mesh.chart[f][i]);
  const auto v = verify_mesh(m);
  CHECK(v.isometry_max_rel_error < 1e-8);
  CHECK(v.euler.chi == 0);
  export_mesh(r.mesh, path, tau);
  CHECK(read_file(path) == obj);  // deterministic bytes
  std::filesystem::remove(path);
  std::filesystem::remove(sidecar_path(path));
  CHECK_THROWS_AS(import_mesh(path), Error);
  CHECK_THROWS_AS(export_mesh(r.mesh, tmp("x.stl")), Error);
}
