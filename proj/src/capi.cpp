#include "flattori.h"

#include "flattori/bz_fold.hpp"
#include "flattori/coverage.hpp"
#include "flattori/diplotorus.hpp"
#include "flattori/flat_mesh.hpp"
#include "flattori/io.hpp"
#include "flattori/moduli.hpp"
#include "flattori/universal.hpp"
#include "flattori/verify.hpp"
#include "flattori/zalgaller.hpp"

#include <memory>
#include <optional>
#include <string>

struct ft_mesh {
  flattori::GeometricMesh mesh;
  std::optional<flattori::Modulus> tau;
  std::string route;
};

namespace {

using namespace flattori;

thread_local std::string g_error;

template <class F>
ft_status guard(F&& f) {
  try {
    g_error.clear();
    f();
    return FT_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<ft_status>(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return FT_E_INTERNAL;
  }
}

ft_status null_arg(const char* what) {
  g_error = std::string("null argument: ") + what;
  return FT_E_NULL_ARGUMENT;
}

void copy_map(const UnimodularMap& g, long long out[4]) {
  out[0] = g.a, out[1] = g.b, out[2] = g.c, out[3] = g.d;
}

GeometricMesh with_unfolded_chart(GeometricMesh m) {
  m.chart.clear();
  for (const auto& t : m.base.tris) {
    const Vec3 a = m.pos[t[0]], b = m.pos[t[1]], c = m.pos[t[2]];
    const double l = (b - a).norm();
    const Vec3 e = (b - a) / l;
    const double x = (c - a).dot(e);
    m.chart.push_back({Vec2(0, 0), Vec2(l, 0), Vec2(x, ((c - a) - x * e).norm())});
  }
  return m;
}

void diplotorus_route(ft_mesh& out, Modulus tau, const ft_embed_options& o) {
  DiplotorusParams p;
  bool mirror = false;
  if (o.n > 0 || o.d != 0) {
    if (o.n <= 0 || o.d == 0) throw Error(ErrorCode::Usage, "--n and --d go together");
    p = solve_params(o.n, o.d, tau);
  } else {
    const RealizationChoice c = select_realization(tau);
    if (c.kind != RealizationKind::Diplotorus) throw Error(ErrorCode::Domain, "long modulus: no 19-family diplotorus");
    p = solve_params(c.n, c.d, c.target);
    mirror = c.mirror;
  }
  out.mesh = with_unfolded_chart(build_diplotorus(p));
  if (mirror)
    for (auto& v : out.mesh.pos) v.x() = -v.x();
  out.route = "diplotorus n=" + std::to_string(p.n) + " d=" + std::to_string(p.d) + " a=" + std::to_string(p.a) +
              " h=" + std::to_string(p.h) + (mirror ? " mirrored" : "");
}

void long_route(ft_mesh& out, Modulus tau, const ft_embed_options& o) {
  LongTorusOptions lo;
  if (o.h > 0) lo.h = o.h;
  LongTorus lt = assemble_long_torus(tau, lo);
  out.mesh = std::move(lt.mesh);
  out.route = std::string("zalgaller-long") + (lt.mirror ? " mirrored" : "");
}

}  // namespace

extern "C" {

const char* ft_status_name(ft_status s) {
  if (s == FT_E_NULL_ARGUMENT) return "NullArgument";
  if (s < FT_OK || s > FT_E_INTERNAL) return "Unknown";
  return error_code_name(static_cast<ErrorCode>(s));
}

const char* ft_last_error(void) { return g_error.c_str(); }

ft_status ft_reduce(double re, double im, double out[2], long long matrix[4]) {
  if (!out) return null_arg("out");
  return guard([&] {
    const Reduction r = reduce_to_fundamental_domain(Modulus(re, im));
    out[0] = r.tau.real(), out[1] = r.tau.imag();
    if (matrix) copy_map(r.map, matrix);
  });
}

ft_status ft_select(double re, double im, ft_choice* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    const RealizationChoice c = select_realization(Modulus(re, im));
    out->long_route = c.kind == RealizationKind::ZalgallerLong;
    out->mirror = c.mirror;
    out->n = c.n, out->d = c.d;
    copy_map(c.gamma, out->gamma);
    copy_map(c.reduction, out->reduction);
    out->reduced[0] = c.reduced.real(), out->reduced[1] = c.reduced.imag();
    out->target[0] = c.target.real(), out->target[1] = c.target.imag();
  });
}

ft_status ft_embed(double re, double im, ft_method method, const ft_embed_options* opt, ft_mesh** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  const ft_embed_options o = opt ? *opt : ft_embed_options{0, 0, 0, 0};
  return guard([&] {
    const Modulus tau(re, im);
    if (!(im > 0)) throw Error(ErrorCode::Domain, "modulus must lie in the upper half-plane");
    auto m = std::make_unique<ft_mesh>();
    m->tau = tau;
    switch (method) {
      case FT_METHOD_AUTO:
        if (select_realization(tau).kind == RealizationKind::ZalgallerLong) long_route(*m, tau, o);
        else diplotorus_route(*m, tau, o);
        break;
      case FT_METHOD_DIPLOTORUS: diplotorus_route(*m, tau, o); break;
      case FT_METHOD_ZALGALLER_LONG: long_route(*m, tau, o); break;
      case FT_METHOD_BZ_CONFORMAL: {
        BzOptions bo;
        if (o.face_budget > 0) bo.face_budget = o.face_budget;
        BzResult r = assemble_bz_torus(tau, bo);
        m->mesh = std::move(r.mesh);
        m->route = std::string("bz-conformal ") + (r.method == BzMethod::Rect ? "rect" : "hopf") +
                   " lattice=" + std::to_string(r.lattice_n);
        break;
      }
      case FT_METHOD_UNIVERSAL: {
        UniversalRealization r = realize_universal(tau);
        m->mesh = std::move(r.mesh);
        m->route = std::string("universal via ") +
                   (r.choice.kind == RealizationKind::ZalgallerLong ? "zalgaller-long" : "diplotorus d=" + std::to_string(r.choice.d));
        break;
      }
      default: throw Error(ErrorCode::Usage, "unknown method");
    }
    *out = m.release();
  });
}

ft_status ft_mesh_load(const char* path, ft_mesh** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    auto m = std::make_unique<ft_mesh>();
    m->mesh = import_mesh(path, &m->tau);
    m->route = "file";
    *out = m.release();
  });
}

ft_status ft_mesh_save(const ft_mesh* m, const char* path) {
  if (!m) return null_arg("mesh");
  if (!path) return null_arg("path");
  return guard([&] { export_mesh(m->mesh, path, m->tau); });
}

void ft_mesh_free(ft_mesh* m) { delete m; }

int ft_mesh_vertex_count(const ft_mesh* m) { return m ? m->mesh.base.vertex_count : 0; }
int ft_mesh_face_count(const ft_mesh* m) { return m ? static_cast<int>(m->mesh.base.tris.size()) : 0; }

ft_status ft_mesh_vertices(const ft_mesh* m, double* xyz) {
  if (!m) return null_arg("mesh");
  if (!xyz) return null_arg("xyz");
  for (std::size_t i = 0; i < m->mesh.pos.size(); ++i)
    for (int k = 0; k < 3; ++k) xyz[3 * i + k] = m->mesh.pos[i][k];
  return FT_OK;
}

ft_status ft_mesh_faces(const ft_mesh* m, int* ijk) {
  if (!m) return null_arg("mesh");
  if (!ijk) return null_arg("ijk");
  for (std::size_t f = 0; f < m->mesh.base.tris.size(); ++f)
    for (int k = 0; k < 3; ++k) ijk[3 * f + k] = m->mesh.base.tris[f][k];
  return FT_OK;
}

ft_status ft_mesh_tau(const ft_mesh* m, double out[2]) {
  if (!m) return null_arg("mesh");
  if (!out) return null_arg("out");
  if (!m->tau) {
    g_error = "mesh carries no modulus";
    return FT_E_DOMAIN;
  }
  out[0] = m->tau->real(), out[1] = m->tau->imag();
  return FT_OK;
}

const char* ft_mesh_route(const ft_mesh* m) { return m ? m->route.c_str() : ""; }

ft_status ft_verify(const ft_mesh* m, ft_report* out) {
  if (!m) return null_arg("mesh");
  if (!out) return null_arg("out");
  return guard([&] {
    const VerificationReport v = verify_mesh(m->mesh);
    out->isometry_max_rel_error = v.isometry_max_rel_error;
    out->flatness_max_defect = v.flatness_max_defect;
    out->self_intersections = static_cast<long>(v.self_intersections.size());
    out->V = v.euler.V, out->E = v.euler.E, out->F = v.euler.F, out->chi = v.euler.chi;
    out->closed = v.euler.closed, out->orientable = v.euler.orientable, out->simplicial = v.euler.simplicial;
    out->has_modulus = v.extracted_modulus.has_value();
    const Modulus t = v.extracted_modulus ? reduce_to_fundamental_domain(*v.extracted_modulus).tau : Modulus();
    out->modulus[0] = t.real(), out->modulus[1] = t.imag();
  });
}

ft_status ft_universal_census(ft_census* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    ShortCensus s;
    overlay_short(&s);
    out->short_per_period = s.intersections_per_period;
    out->short_intersections = s.intersection_vertices;
    out->short_vertices = s.vertices;
    out->short_triangles = s.triangles;
    out->short_chi = s.chi;
    const auto& U = merged_overlay();
    const auto& c = U.census;
    out->E_c = c.E_c;
    for (int i = 0; i < 3; ++i) out->V_ext[i] = c.V_ext[i];
    out->V_long = c.V_long, out->V_c = c.V_c, out->V_c_new = c.V_c_new, out->V_d = c.V_d, out->V_cap = c.V_cap;
    out->central_edges = c.central_edges, out->short_originals = c.short_originals;
    out->merged_vertices = c.vertices, out->merged_triangles = c.triangles, out->merged_chi = c.chi;
    out->long_triangles = static_cast<int>(U.long_layout.tris.size());
    out->long_chi = euler_audit(U.long_layout).chi;
  });
}

ft_status ft_universal_emit(ft_layout which, const char* path) {
  if (!path) return null_arg("path");
  return guard([&] {
    switch (which) {
      case FT_LAYOUT_LONG: write_file(path, triangulation_json(merged_overlay().long_layout)); break;
      case FT_LAYOUT_SHORT: write_file(path, triangulation_json(overlay_short().triangulated)); break;
      case FT_LAYOUT_MERGED: write_file(path, triangulation_json(merged_overlay().overlay.triangulated)); break;
      default: throw Error(ErrorCode::Usage, "unknown layout");
    }
  });
}

ft_status ft_coverage(long samples, unsigned long long seed, ft_coverage_result* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    const CoverageReport r = coverage_audit(samples, seed);
    out->samples = r.samples, out->realized = r.realized;
    out->failures = static_cast<long>(r.failures.size());
    out->max_residual = r.max_residual, out->min_margin = r.min_margin;
  });
}

}  // extern "C"
