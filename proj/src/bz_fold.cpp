#include "flattori/bz_fold.hpp"

#include "flattori/conformal.hpp"
#include "flattori/flat_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace flattori {

namespace {

template <class V>
V circumcenter(const V& a, const V& b, const V& c) {
  // barycentric weights from squared side lengths
  const double A = (b - c).squaredNorm(), B = (c - a).squaredNorm(), C = (a - b).squaredNorm();
  const double wa = A * (B + C - A), wb = B * (C + A - B), wc = C * (A + B - C);
  return (wa * a + wb * b + wc * c) / (wa + wb + wc);
}

template <class V>
double max_angle_slack(const V& a, const V& b, const V& c) {
  // pi/2 minus the largest corner angle
  double worst = kPi;
  const V p[3] = {a, b, c};
  for (int i = 0; i < 3; ++i) {
    const V u = p[(i + 1) % 3] - p[i], v = p[(i + 2) % 3] - p[i];
    const double ang = std::atan2(std::sqrt(std::max(0.0, u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2))),
                                  u.dot(v));
    worst = std::min(worst, kPi / 2 - ang);
  }
  return worst;
}

template <class V>
double dist_to_line(const V& p, const V& a, const V& b) {
  const V e = (b - a).normalized();
  const V d = p - a;
  return (d - e * e.dot(d)).norm();
}

double area2(const std::array<Vec2, 3>& T) {
  const Vec2 u = T[1] - T[0], v = T[2] - T[0];
  return u.x() * v.y() - u.y() * v.x();
}

// Geometry of one side in the bisector plane of the base side: coordinates (along d_in, along normal),
// origin at the midpoint c of a_i a_j.
struct SideFrame {
  Vec3 c, d_in, n, e;
  double s, l, H, w, hT, z;
  Vec2 M, Omega;  // intrinsic
};

SideFrame side_frame(const TrianglePair& p, int k) {
  const int i = k, j = (k + 1) % 3;
  SideFrame f;
  const Vec2 Om = circumcenter(p.T[0], p.T[1], p.T[2]);
  const Vec3 om = circumcenter(p.t[0], p.t[1], p.t[2]);
  f.M = 0.5 * (p.T[i] + p.T[j]);
  f.Omega = Om;
  f.s = 0.5 * (p.T[j] - p.T[i]).norm();
  f.H = (Om - f.M).norm();
  const double RT = (Om - p.T[i]).norm();
  f.c = 0.5 * (p.t[i] + p.t[j]);
  f.l = (p.t[j] - p.t[i]).norm();
  f.e = (p.t[j] - p.t[i]) / f.l;
  f.n = p.normal.normalized();
  Vec3 din = f.e.cross(f.n);
  if (din.dot(om - f.c) < 0) din = -din;
  f.d_in = din;
  f.hT = (om - f.c).dot(din);
  const double rt = (om - p.t[i]).norm();
  f.z = std::sqrt(std::max(0.0, RT * RT - rt * rt));
  f.w = std::sqrt(std::max(0.0, f.s * f.s - 0.25 * f.l * f.l));
  return f;
}

Vec3 lift(const SideFrame& f, const Vec2& q) { return f.c + q.x() * f.d_in + q.y() * f.n; }

Vec2 polar2(double r, double a) { return {r * std::cos(a), r * std::sin(a)}; }

// point of the segment p0 -> p1 on the ray at angle g from the origin
double ray_cut(const Vec2& p0, const Vec2& p1, double g) {
  const Vec2 nrm(-std::sin(g), std::cos(g));
  const double s0 = p0.dot(nrm), s1 = p1.dot(nrm);
  return s0 / (s0 - s1);
}

struct SideFold {
  Vec3 m, apex;
  std::vector<Vec3> creases;  // along the segment from m towards the apex
  std::vector<Vec2> chart;    // same points on the intrinsic altitude M -> Omega
  double residual;
};

SideFold fold_side(const TrianglePair& p, int k, double tilt) {
  const SideFrame f = side_frame(p, k);
  const double psi_m = kPi / 2 + tilt;
  const double psi_om = std::atan2(f.z, f.hT);
  const Vec2 m2 = polar2(f.w, psi_m);
  const Vec2 P2 = m2 + f.H * Vec2(std::sin(psi_m), -std::cos(psi_m));
  const double psi_p = std::atan2(P2.y(), P2.x());
  const double delta = psi_om - psi_p, room = psi_m - psi_om;
  if (!(delta > 0 && room > 0)) {
    std::ostringstream os;
    os << "fold: side " << k << " cannot bring the apex onto its target (rotation " << delta << ", wedge slack "
       << room << ")";
    throw Error(ErrorCode::FoldSearch, os.str());
  }
  // Accordion of 2q reflections in planes through the side axis, alternating between a low and a high
  // angle inside (psi_om, psi_m). Every crease then projects between the side midpoint and the
  // circumcenter and stays below the wedge ray, so the pleats keep to their own sector.
  const int q = std::max(1, static_cast<int>(std::ceil(delta / (2 * 0.8 * room))));
  const double d = delta / (2 * q), lo = psi_om + 0.5 * (room - d), hi = lo + d;
  SideFold out;
  out.m = lift(f, m2);
  const Vec2 up = (f.Omega - f.M) / f.H;
  double theta = psi_m, gamma_prev = psi_m;
  for (int c = 0; c < 2 * q; ++c) {
    const double gamma = c % 2 == 0 ? lo : hi;
    theta -= std::abs(gamma_prev - gamma);
    gamma_prev = gamma;
    const double t = ray_cut(m2, P2, theta);
    out.creases.push_back(lift(f, polar2((m2 + t * (P2 - m2)).norm(), gamma)));
    out.chart.push_back(f.M + t * f.H * up);
  }
  theta -= hi - psi_om;
  const Vec2 target(f.hT, f.z);
  out.apex = lift(f, target);
  out.residual = std::max(std::abs(theta - psi_p) * P2.norm(), std::abs(P2.norm() - target.norm()));
  if (out.residual > 1e-9 * std::max(1.0, f.H))
    throw Error(ErrorCode::FoldSearch, "fold: apex misses its target by " + std::to_string(out.residual));
  return out;
}

// Faces of one side: the chain M, creases..., apex coned from both side ends.
void emit_side(GeometricMesh& m, const std::vector<int>& chain, int vi, int vj, const std::vector<Vec2>& cc,
               const Vec2& Ai, const Vec2& Aj) {
  for (std::size_t u = 0; u + 1 < chain.size(); ++u) {
    m.base.tris.push_back({vi, chain[u], chain[u + 1]});
    m.base.tris.push_back({chain[u], vj, chain[u + 1]});
    m.chart.push_back({Ai, cc[u], cc[u + 1]});
    m.chart.push_back({cc[u], Aj, cc[u + 1]});
  }
}

void validate_pair(const TrianglePair& p) {
  if (std::abs(area2(p.T)) < 1e-300 || ((p.t[1] - p.t[0]).cross(p.t[2] - p.t[0])).norm() < 1e-300)
    throw Error(ErrorCode::Domain, "check_pair: degenerate triangle");
}

}  // namespace

PairCheck check_pair(const TrianglePair& p) {
  validate_pair(p);
  PairCheck r;
  r.margin = std::numeric_limits<double>::infinity();
  auto note = [&](const char* name, double slack) {
    r.margin = std::min(r.margin, slack);
    if (slack <= 0 && r.violated.empty()) r.violated = name;
  };
  note("(i) intrinsic triangle acute", max_angle_slack(p.T[0], p.T[1], p.T[2]));
  note("(i) base triangle acute", max_angle_slack(p.t[0], p.t[1], p.t[2]));
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3;
    const double L = (p.T[j] - p.T[i]).norm(), l = (p.t[j] - p.t[i]).norm();
    note("(ii) base side shorter", (L - l) / L);
  }
  const Vec2 Om = circumcenter(p.T[0], p.T[1], p.T[2]);
  const Vec3 om = circumcenter(p.t[0], p.t[1], p.t[2]);
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3;
    const double H = dist_to_line(Om, p.T[i], p.T[j]), h = dist_to_line(om, p.t[i], p.t[j]);
    note("(iii) circumcenter closer to the base side", (H - h) / H);
  }
  r.ok = r.violated.empty();
  return r;
}

std::pair<double, double> wedge_angle_range(const TrianglePair& p, int k, double margin) {
  const SideFrame f = side_frame(p, k);
  const double psi_om = std::atan2(f.z, f.hT);
  return {psi_om + margin, std::min(kPi - margin, psi_om - margin + std::atan2(f.H, f.w))};
}

FoldResult fold_subtriangle(const TrianglePair& p, int k, double tilt) {
  const auto chk = check_pair(p);
  if (!chk.ok) throw Error(ErrorCode::Domain, "fold: pair violates " + chk.violated);
  const int i = k, j = (k + 1) % 3;
  const SideFold s = fold_side(p, k, tilt);
  const SideFrame f = side_frame(p, k);
  FoldResult r;
  auto& m = r.mesh;
  // local ids: a_i, a_j, m, apex, creases
  m.pos = {p.t[i], p.t[j], s.m, s.apex};
  std::vector<int> chain{2};
  std::vector<Vec2> cc{f.M};
  for (std::size_t c = 0; c < s.creases.size(); ++c) {
    chain.push_back(static_cast<int>(m.pos.size()));
    m.pos.push_back(s.creases[c]);
    cc.push_back(s.chart[c]);
  }
  chain.push_back(3);
  cc.push_back(f.Omega);
  m.base.vertex_count = static_cast<int>(m.pos.size());
  emit_side(m, chain, 0, 1, cc, p.T[i], p.T[j]);
  r.boundary_polylines[k] = {p.t[i], s.m, p.t[j]};
  r.tilt[k] = tilt;
  r.pleats[k] = static_cast<int>(s.creases.size()) / 2;
  r.residual = s.residual;
  return r;
}

FoldResult fold_triangle(const TrianglePair& p, const std::array<double, 3>& tilts) {
  const auto chk = check_pair(p);
  if (!chk.ok) throw Error(ErrorCode::Domain, "fold: pair violates " + chk.violated);
  FoldResult r;
  auto& m = r.mesh;
  m.pos.assign(7, Vec3::Zero());
  for (int i = 0; i < 3; ++i) m.pos[i] = p.t[i];
  std::array<SideFold, 3> sf;
  for (int k = 0; k < 3; ++k) {
    const SideFrame f = side_frame(p, k);
    sf[k] = fold_side(p, k, tilts[k]);
    m.pos[3 + k] = sf[k].m;
    if (k == 0) m.pos[6] = sf[k].apex;
    else if ((m.pos[6] - sf[k].apex).norm() > 1e-9 * std::max(1.0, f.H))
      throw Error(ErrorCode::Internal, "fold: lifted circumcenters of the three sides disagree");
  }
  for (int k = 0; k < 3; ++k) {
    const int i = k, j = (k + 1) % 3;
    const SideFrame f = side_frame(p, k);
    std::vector<int> chain{3 + k};
    std::vector<Vec2> cc{f.M};
    for (std::size_t c = 0; c < sf[k].creases.size(); ++c) {
      chain.push_back(static_cast<int>(m.pos.size()));
      m.pos.push_back(sf[k].creases[c]);
      cc.push_back(sf[k].chart[c]);
    }
    chain.push_back(6);
    cc.push_back(f.Omega);
    emit_side(m, chain, i, j, cc, p.T[i], p.T[j]);
    r.boundary_polylines[k] = {p.t[i], sf[k].m, p.t[j]};
    r.tilt[k] = tilts[k];
    r.pleats[k] = static_cast<int>(sf[k].creases.size()) / 2;
    r.residual = std::max(r.residual, sf[k].residual);
  }
  m.base.vertex_count = static_cast<int>(m.pos.size());
  return r;
}

BzResult assemble_bz_torus(Modulus tau, const BzOptions& opt) {
  if (!(tau.imag() > 0)) throw Error(ErrorCode::Domain, "modulus must lie in the upper half-plane");
  const double frac = tau.real() - std::floor(tau.real());
  const bool rectangular = frac < 1e-12 || 1 - frac < 1e-12;
  BzResult res;
  res.method = opt.method == BzMethod::Auto ? (rectangular ? BzMethod::Rect : BzMethod::Hopf) : opt.method;
  if (res.method == BzMethod::Rect && !rectangular)
    throw Error(ErrorCode::Domain, "rectangular conformal map needs an integer real part");

  // T_tau and T_{tau + k} share the chart lattice, so the map may use any integer shift of tau
  std::function<Vec3(const Vec2&)> f;
  if (res.method == BzMethod::Rect) {
    const auto m = make_rect_map(tau.imag(), opt.shortness);
    f = [m](const Vec2& q) { return rect_map_eval(m, q.x(), q.y()); };
  } else {
    const auto m = solve_hopf_params_auto(Modulus(frac, tau.imag()), opt.shortness);
    res.hopf_n = m.n;
    f = [m](const Vec2& q) { return hopf_torus_eval(m, q.x(), q.y()); };
  }

  for (int n = std::max(1, opt.n_subdiv);; n *= 2) {
    const auto lt = lattice_triangulation(tau, n);
    const auto& tris = lt.metric.base.tris;
    const int F = static_cast<int>(tris.size());
    if (18L * F > opt.face_budget) {
      std::ostringstream os;
      os << "BZ refinement needs " << 18L * F << " faces at lattice resolution " << n << ", over the budget "
         << opt.face_budget;
      throw Error(ErrorCode::Budget, os.str());
    }
    std::vector<Vec3> base(lt.metric.base.vertex_count);
    for (int v = 0; v < lt.metric.base.vertex_count; ++v) base[v] = f(lt.vertex_xy[v]);

    // prisms point to the inside of the base surface
    double vol = 0;
    for (const auto& t : tris) vol += base[t[0]].dot(base[t[1]].cross(base[t[2]]));
    const double sgn = vol > 0 ? -1.0 : 1.0;
    std::vector<TrianglePair> pairs(F);
    bool ok = true;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int g = 0; g < F && ok; ++g) {
      auto& P = pairs[g];
      P.T = lt.chart.face_xy[g];
      for (int i = 0; i < 3; ++i) P.t[i] = base[tris[g][i]];
      P.normal = sgn * (P.t[1] - P.t[0]).cross(P.t[2] - P.t[0]).normalized();
      const auto c = check_pair(P);
      min_margin = std::min(min_margin, c.margin);
      ok = c.ok;
    }
    if (!ok) continue;

    // shared wedge apex direction per edge: bisector of the two wall normals
    const auto& twin = lt.metric.base.twin;
    std::vector<std::array<double, 3>> tilts(F);
    for (int g = 0; g < F && ok; ++g)
      for (int k = 0; k < 3 && ok; ++k) {
        const int h = twin[g][k] / 3;
        Vec3 u = pairs[g].normal + pairs[h].normal;
        if (u.norm() < 1e-6) {
          ok = false;
          break;
        }
        u.normalize();
        const SideFrame fr = side_frame(pairs[g], k);
        const double psi = std::atan2(u.dot(fr.n), u.dot(fr.d_in));
        const auto [lo, hi] = wedge_angle_range(pairs[g], k);
        min_margin = std::min(min_margin, std::min(psi - lo, hi - psi));
        ok = psi > lo && psi < hi;
        tilts[g][k] = psi - kPi / 2;
      }
    if (!ok) continue;

    // fold and paste: base vertices, one wedge apex per edge, then the apex and creases of each face
    const int V = lt.metric.base.vertex_count;
    auto& mesh = res.mesh;
    mesh = GeometricMesh{};
    mesh.pos = base;
    std::vector<int> edge_vertex(3 * F, -1);
    for (int g = 0; g < F; ++g) {
      const FoldResult fr = fold_triangle(pairs[g], tilts[g]);
      std::vector<int> id(fr.mesh.pos.size());
      for (int i = 0; i < 3; ++i) id[i] = tris[g][i];
      for (int k = 0; k < 3; ++k) {
        const int he = 3 * g + k, tw = twin[g][k];
        int& slot = edge_vertex[std::min(he, tw)];
        if (slot < 0) {
          slot = static_cast<int>(mesh.pos.size());
          mesh.pos.push_back(fr.mesh.pos[3 + k]);
        }
        id[3 + k] = slot;
      }
      for (std::size_t q = 6; q < id.size(); ++q) {
        id[q] = static_cast<int>(mesh.pos.size());
        mesh.pos.push_back(fr.mesh.pos[q]);
      }
      for (std::size_t t = 0; t < fr.mesh.base.tris.size(); ++t) {
        const auto& tr = fr.mesh.base.tris[t];
        mesh.base.tris.push_back({id[tr[0]], id[tr[1]], id[tr[2]]});
        mesh.chart.push_back(fr.mesh.chart[t]);
      }
    }
    (void)V;
    if (static_cast<long>(mesh.base.tris.size()) > opt.face_budget)
      throw Error(ErrorCode::Budget, "BZ fold produced " + std::to_string(mesh.base.tris.size()) +
                                         " faces, over the budget " + std::to_string(opt.face_budget));
    mesh.base.vertex_count = static_cast<int>(mesh.pos.size());
    res.lattice_n = n;
    res.base_faces = F;
    res.min_margin = min_margin;
    return res;
  }
}

}  // namespace flattori
