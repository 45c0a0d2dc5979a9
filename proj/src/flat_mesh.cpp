#include "flattori/flat_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace flattori {

namespace {

Vec2 to_vec(std::complex<double> z) { return {z.real(), z.imag()}; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Third vertex C of the counterclockwise triangle (A, B, C) with |BC| = lbc, |CA| = lca.
Vec2 place_third(const Vec2& A, const Vec2& B, double lbc, double lca) {
  const Vec2 e = B - A;
  const double d = e.norm();
  const double x = (lca * lca - lbc * lbc + d * d) / (2 * d);
  const double y = std::sqrt(std::max(0.0, lca * lca - x * x));
  const Vec2 u = e / d;
  return A + x * u + y * Vec2(-u.y(), u.x());
}

}  // namespace

double corner_angle(double opposite, double b, double c) {
  // half-angle form; accurate for needle-like corners where acos is not
  const double s = 0.5 * (opposite + b + c);
  const double num = std::max(0.0, (s - b) * (s - c));
  const double den = std::max(0.0, s * (s - opposite));
  return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den));
}

std::vector<double> angle_sums(const MetricTriangulation& mt) {
  std::vector<double> sum(mt.base.vertex_count, 0.0);
  for (std::size_t f = 0; f < mt.base.tris.size(); ++f)
    for (int i = 0; i < 3; ++i)
      sum[mt.base.tris[f][i]] += corner_angle(mt.len[f][(i + 1) % 3], mt.len[f][i], mt.len[f][(i + 2) % 3]);
  return sum;
}

LatticeTriangulation lattice_triangulation(Modulus tau, int n) {
  if (n < 1) throw Error(ErrorCode::Domain, "lattice_triangulation: n must be >= 1");
  if (!(tau.imag() > 0)) throw Error(ErrorCode::Domain, "lattice_triangulation: modulus must lie in the upper half-plane");
  const Modulus omega = std::polar(1.0, kPi / 3);
  auto p_of = [&](long a, long b) { return (double(a) + double(b) * omega) / double(n); };

  // nearest lattice point with b >= 1 (b = 0 would collapse the quotient)
  const long b0 = std::lround(tau.imag() * 2.0 * n / std::sqrt(3.0));
  long best_a = 0, best_b = 1;
  double best = 1e300;
  for (long b = std::max(1L, b0 - 2); b <= std::max(1L, b0 + 2); ++b) {
    const long a0 = std::lround(n * tau.real() - 0.5 * b);
    for (long a = a0 - 2; a <= a0 + 2; ++a) {
      const double dist = std::abs(tau - p_of(a, b));
      if (dist < best - 1e-15) best = dist, best_a = a, best_b = b;
    }
  }
  const int a = static_cast<int>(best_a), b = static_cast<int>(best_b);
  const Modulus p = p_of(a, b);

  // real-linear map fixing 1 and sending p to tau: z -> alpha z + beta conj(z)
  const Modulus alpha = (tau - std::conj(p)) / (p - std::conj(p));
  const Modulus beta = 1.0 - alpha;
  auto ell = [&](long i, long j) {
    const Modulus z = (double(i) + double(j) * omega) / double(n);
    return to_vec(alpha * z + beta * std::conj(z));
  };

  // vertices: Lambda_n modulo the span of (n,0) and (a,b) in lattice coordinates
  auto vid = [&](long i, long j) {
    const long q = (j >= 0 ? j / b : -((-j + b - 1) / b));
    i -= q * a;
    j -= q * b;
    i = ((i % n) + n) % n;
    return static_cast<int>(j * n + i);
  };

  LatticeTriangulation out;
  out.a = a;
  out.b = b;
  const int V = n * b;
  auto& t = out.metric.base;
  t.vertex_count = V;
  t.tris.resize(2 * V);
  t.twin.resize(2 * V);
  out.metric.len.resize(2 * V);
  out.chart.face_xy.resize(2 * V);
  out.vertex_xy.resize(V);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) {
      const int v = vid(i, j);
      out.vertex_xy[v] = ell(i, j);
      const int U = 2 * v, D = 2 * v + 1;
      t.tris[U] = {v, vid(i + 1, j), vid(i, j + 1)};
      t.tris[D] = {vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      out.chart.face_xy[U] = {ell(i, j), ell(i + 1, j), ell(i, j + 1)};
      out.chart.face_xy[D] = {ell(i + 1, j), ell(i + 1, j + 1), ell(i, j + 1)};
      t.twin[U] = {3 * (2 * vid(i, j - 1) + 1) + 1, 3 * D + 2, 3 * (2 * vid(i - 1, j) + 1) + 0};
      t.twin[D] = {3 * (2 * vid(i + 1, j)) + 2, 3 * (2 * vid(i, j + 1)) + 0, 3 * U + 1};
    }
  for (int f = 0; f < 2 * V; ++f)
    for (int k = 0; k < 3; ++k)
      out.metric.len[f][k] = (out.chart.face_xy[f][(k + 1) % 3] - out.chart.face_xy[f][k]).norm();
  out.chart.w1 = Vec2(1, 0);
  out.chart.w2 = to_vec(tau);
  return out;
}

MetricTriangulation uniform_subdivide(const MetricTriangulation& mt_in, int n) {
  if (n < 1) throw Error(ErrorCode::Domain, "uniform_subdivide: n must be >= 1");
  MetricTriangulation mt = mt_in;
  ensure_twins(mt.base);
  if (n == 1) return mt;
  const auto& T = mt.base;
  const int F = static_cast<int>(T.tris.size());

  // global ids: original vertices, then n-1 points per edge (indexed along the
  // canonical half-edge, the smaller of the pair), then face interiors
  int next = T.vertex_count;
  std::vector<int> edge_base(3 * F, -1);
  for (int h = 0; h < 3 * F; ++h) {
    const int tw = T.twin[h / 3][h % 3];
    if (h < tw) edge_base[h] = next, next += n - 1;
  }
  std::vector<int> face_base(F);
  const int interior = (n - 1) * (n - 2) / 2;
  for (int f = 0; f < F; ++f) face_base[f] = next, next += interior;

  // point on half-edge h at parameter t in (0, n), measured from its tail
  auto edge_point = [&](int h, int t) {
    const int tw = T.twin[h / 3][h % 3];
    return h < tw ? edge_base[h] + t - 1 : edge_base[tw] + (n - t) - 1;
  };
  // grid point (j, k) of face f: v0 + j/n (v1 - v0) + k/n (v2 - v0)
  auto gid = [&](int f, int j, int k) {
    const int i = n - j - k;
    const auto& v = T.tris[f];
    if (j == 0 && k == 0) return v[0];
    if (i == 0 && k == 0) return v[1];
    if (i == 0 && j == 0) return v[2];
    if (k == 0) return edge_point(3 * f + 0, j);
    if (i == 0) return edge_point(3 * f + 1, k);
    if (j == 0) return edge_point(3 * f + 2, n - k);
    // interior: 1 <= k, 1 <= j, j + k <= n - 1
    int idx = 0;
    for (int kk = 1; kk < k; ++kk) idx += n - 1 - kk;
    return face_base[f] + idx + (j - 1);
  };

  MetricTriangulation out;
  out.base.vertex_count = next;
  const int per = n * n;
  out.base.tris.resize(F * per);
  out.base.twin.resize(F * per);
  out.len.resize(F * per);
  // local small-face numbering and a half-edge lookup keyed by grid endpoints
  std::vector<std::map<std::array<int, 4>, int>> local(F);
  for (int f = 0; f < F; ++f) {
    int s = f * per;
    const auto& L = mt.len[f];
    auto emit = [&](std::array<int, 2> p0, std::array<int, 2> p1, std::array<int, 2> p2, std::array<double, 3> l) {
      out.base.tris[s] = {gid(f, p0[0], p0[1]), gid(f, p1[0], p1[1]), gid(f, p2[0], p2[1])};
      out.len[s] = l;
      const std::array<std::array<int, 2>, 3> P{p0, p1, p2};
      for (int c = 0; c < 3; ++c) local[f][{P[c][0], P[c][1], P[(c + 1) % 3][0], P[(c + 1) % 3][1]}] = 3 * s + c;
      ++s;
    };
    for (int k = 0; k < n; ++k)
      for (int j = 0; j + k < n; ++j) {
        emit({j, k}, {j + 1, k}, {j, k + 1}, {L[0] / n, L[1] / n, L[2] / n});
        if (j + k + 2 <= n) emit({j + 1, k}, {j + 1, k + 1}, {j, k + 1}, {L[2] / n, L[0] / n, L[1] / n});
      }
  }
  // segment t -> t+1 along original half-edge c of a face, as grid endpoints
  auto boundary_key = [&](int c, int t) -> std::array<int, 4> {
    switch (c) {
      case 0: return {t, 0, t + 1, 0};
      case 1: return {n - t, t, n - t - 1, t + 1};
      default: return {0, n - t, 0, n - t - 1};
    }
  };
  for (int f = 0; f < F; ++f) {
    for (const auto& [key, h] : local[f]) {
      int tw = -1;
      const auto rev = local[f].find({key[2], key[3], key[0], key[1]});
      if (rev != local[f].end()) {
        tw = rev->second;
      } else {
        // on an original edge: find which one and the parameter
        int c = -1, t = -1;
        for (int cc = 0; cc < 3 && c < 0; ++cc)
          for (int tt = 0; tt < n; ++tt)
            if (boundary_key(cc, tt) == key) {
              c = cc, t = tt;
              break;
            }
        if (c < 0) throw Error(ErrorCode::Internal, "uniform_subdivide: unmatched small half-edge");
        const int g = T.twin[f][c] / 3, cg = T.twin[f][c] % 3;
        tw = local[g].at(boundary_key(cg, n - 1 - t));
      }
      out.base.twin[h / 3][h % 3] = tw;
    }
  }
  return out;
}

bool lattice_basis(const std::vector<Vec2>& gens, Vec2& w1, Vec2& w2, double rel_tol) {
  double scale = 0;
  for (const auto& g : gens) scale = std::max(scale, g.norm());
  if (scale == 0) return false;
  const double tol = rel_tol * scale;
  std::vector<Vec2> pool;
  for (const auto& g : gens)
    if (g.norm() > tol) pool.push_back(g);

  for (int iter = 0; iter < 1000; ++iter) {
    std::sort(pool.begin(), pool.end(), [](const Vec2& x, const Vec2& y) { return x.squaredNorm() < y.squaredNorm(); });
    Vec2 b1 = pool.front(), b2(0, 0);
    bool found = false;
    for (const auto& g : pool)
      if (std::abs(cross(b1, g)) > tol * g.norm()) {
        b2 = g;
        found = true;
        break;
      }
    if (!found) return false;
    // Gauss reduction of (b1, b2)
    for (int k = 0; k < 200; ++k) {
      if (b2.squaredNorm() < b1.squaredNorm()) std::swap(b1, b2);
      const double mu = std::round(b1.dot(b2) / b1.squaredNorm());
      if (mu == 0) break;
      b2 -= mu * b1;
    }
    if (b2.squaredNorm() < b1.squaredNorm()) std::swap(b1, b2);
    const double det = cross(b1, b2);
    std::vector<Vec2> residuals;
    for (const auto& g : pool) {
      const double x = cross(g, b2) / det, y = cross(b1, g) / det;
      const Vec2 r = g - std::round(x) * b1 - std::round(y) * b2;
      if (r.norm() > tol) residuals.push_back(r);
    }
    if (residuals.empty()) {
      if (det < 0) b2 = -b2;
      w1 = b1;
      w2 = b2;
      return true;
    }
    pool = {b1, b2};
    pool.insert(pool.end(), residuals.begin(), residuals.end());
  }
  return false;
}

Development develop(const MetricTriangulation& mt_in, double flat_tol) {
  MetricTriangulation mt = mt_in;
  ensure_twins(mt.base);
  const auto sums = angle_sums(mt);
  std::ostringstream bad;
  int nbad = 0;
  for (int v = 0; v < static_cast<int>(sums.size()); ++v)
    if (std::abs(sums[v] - 2 * kPi) > flat_tol) {
      if (nbad < 10) bad << " v" << v << " (sum " << sums[v] << ")";
      ++nbad;
    }
  if (nbad) throw Error(ErrorCode::ConeAngle, "develop: " + std::to_string(nbad) + " cone vertices:" + bad.str());

  const auto& T = mt.base;
  const int F = static_cast<int>(T.tris.size());
  Development dev;
  dev.face_xy.resize(F);
  std::vector<char> placed(F, 0);
  double scale = 0;
  for (const auto& l : mt.len) scale = std::max({scale, l[0], l[1], l[2]});
  const double tol = 1e-7 * std::max(1.0, scale);

  dev.face_xy[0][0] = Vec2(0, 0);
  dev.face_xy[0][1] = Vec2(mt.len[0][0], 0);
  dev.face_xy[0][2] = place_third(dev.face_xy[0][0], dev.face_xy[0][1], mt.len[0][1], mt.len[0][2]);
  placed[0] = 1;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int i = 0; i < 3; ++i) {
      const int g = T.twin[f][i] / 3, j = T.twin[f][i] % 3;
      const Vec2 P = dev.face_xy[f][i], Q = dev.face_xy[f][(i + 1) % 3];
      if (!placed[g]) {
        // g's edge j runs Q -> P
        auto& G = dev.face_xy[g];
        const Vec2 e = (P - Q).normalized();
        G[j] = Q;
        G[(j + 1) % 3] = Q + e * mt.len[g][j];
        G[(j + 2) % 3] = place_third(G[j], G[(j + 1) % 3], mt.len[g][(j + 1) % 3], mt.len[g][(j + 2) % 3]);
        placed[g] = 1;
        queue.push_back(g);
      } else {
        const Vec2 t1 = dev.face_xy[g][j] - Q, t2 = dev.face_xy[g][(j + 1) % 3] - P;
        if ((t1 - t2).norm() > tol)
          throw Error(ErrorCode::ConeAngle, "develop: gluing across face " + std::to_string(f) + " edge " +
                                                std::to_string(i) + " involves a rotation (holonomy not a translation)");
        if (t1.norm() > tol) dev.translations.push_back(0.5 * (t1 + t2));
      }
    }
  }
  for (int f = 0; f < F; ++f)
    if (!placed[f]) throw Error(ErrorCode::NonManifold, "develop: surface is not connected");
  dev.has_lattice = lattice_basis(dev.translations, dev.w1, dev.w2);
  return dev;
}

EulerAudit euler_audit(const Triangulation& t_in) {
  Triangulation t = t_in;
  ensure_twins(t);
  EulerAudit a;
  a.V = t.vertex_count;
  a.F = static_cast<int>(t.tris.size());
  bool closed = true, orientable = true;
  int half = 0;
  for (int f = 0; f < a.F; ++f)
    for (int i = 0; i < 3; ++i) {
      const int h = t.twin[f][i];
      if (h < 0 || h >= 3 * a.F || t.twin[h / 3][h % 3] != 3 * f + i || h == 3 * f + i) {
        throw Error(ErrorCode::NonManifold, "euler_audit: face " + std::to_string(f) + " edge " + std::to_string(i) +
                                                " is not paired with exactly one other face");
      }
      ++half;
      const int u = t.tris[f][i], v = t.tris[f][(i + 1) % 3];
      const int gu = t.tris[h / 3][h % 3], gv = t.tris[h / 3][(h % 3 + 1) % 3];
      if (!(gu == v && gv == u)) orientable = false;
    }
  a.E = half / 2;
  a.chi = a.V - a.E + a.F;
  a.closed = closed;
  a.orientable = orientable;
  std::set<std::pair<int, int>> edges;
  bool simplicial = true;
  for (int f = 0; f < a.F && simplicial; ++f)
    for (int i = 0; i < 3; ++i) {
      int u = t.tris[f][i], v = t.tris[f][(i + 1) % 3];
      if (u == v) simplicial = false;
      if (u > v) std::swap(u, v);
      edges.insert({u, v});
    }
  if (simplicial && static_cast<int>(edges.size()) != a.E) simplicial = false;
  a.simplicial = simplicial;
  return a;
}

}  // namespace flattori
