#include "flattori/verify.hpp"

#include "flattori/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace flattori {

double check_isometry(const GeometricMesh& mesh, const MetricTriangulation& ref) {
  if (mesh.base.tris != ref.base.tris || ref.len.size() != ref.base.tris.size())
    throw Error(ErrorCode::Domain, "check_isometry: mesh and reference use different complexes");
  double worst = 0;
  for (std::size_t f = 0; f < ref.base.tris.size(); ++f)
    for (int i = 0; i < 3; ++i) {
      const double l = (mesh.pos[ref.base.tris[f][(i + 1) % 3]] - mesh.pos[ref.base.tris[f][i]]).norm();
      worst = std::max(worst, std::abs(l - ref.len[f][i]) / ref.len[f][i]);
    }
  return worst;
}

double check_flatness(const MetricTriangulation& mt) {
  for (std::size_t f = 0; f < mt.len.size(); ++f) {
    const auto& l = mt.len[f];
    if (!(l[0] < l[1] + l[2] && l[1] < l[0] + l[2] && l[2] < l[0] + l[1]))
      throw Error(ErrorCode::Domain, "check_flatness: face " + std::to_string(f) + " violates the triangle inequality");
  }
  double worst = 0;
  for (double s : angle_sums(mt)) worst = std::max(worst, std::abs(s - 2 * kPi));
  return worst;
}

namespace {

using Tri = std::array<Vec3, 3>;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Closed 2D segment-segment intersection with tolerance.
bool seg_seg_2d(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1, double eps) {
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); };
  const double lp = std::max((p1 - p0).norm(), 1e-300), lq = std::max((q1 - q0).norm(), 1e-300);
  const double d1 = orient(q0, q1, p0) / lq, d2 = orient(q0, q1, p1) / lq;
  const double d3 = orient(p0, p1, q0) / lp, d4 = orient(p0, p1, q1) / lp;
  if ((d1 > eps && d2 > eps) || (d1 < -eps && d2 < -eps)) return false;
  if ((d3 > eps && d4 > eps) || (d3 < -eps && d4 < -eps)) return false;
  if (std::abs(d1) <= eps && std::abs(d2) <= eps) {
    // collinear: overlap of projections onto the segment direction
    const Vec2 u = (p1 - p0) / lp;
    const double a0 = 0, a1 = lp, b0 = (q0 - p0).dot(u), b1 = (q1 - p0).dot(u);
    return std::max(a0, std::min(b0, b1)) <= std::min(a1, std::max(b0, b1)) + eps;
  }
  return true;
}

bool point_in_tri_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double eps) {
  const double area = cross2(b - a, c - a);
  const double s = area > 0 ? 1.0 : -1.0;
  const double la = (b - a).norm(), lb = (c - b).norm(), lc = (a - c).norm();
  return s * cross2(b - a, p - a) / la >= -eps && s * cross2(c - b, p - b) / lb >= -eps &&
         s * cross2(a - c, p - c) / lc >= -eps;
}

// Closed segment vs closed triangle in 3D with tolerance eps (absolute length).
bool seg_tri(const Vec3& p0, const Vec3& p1, const Tri& t, double eps) {
  Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
  const double nn = n.norm();
  if (nn == 0) return false;
  n /= nn;
  const double d0 = n.dot(p0 - t[0]), d1 = n.dot(p1 - t[0]);
  if ((d0 > eps && d1 > eps) || (d0 < -eps && d1 < -eps)) return false;
  // project onto the dominant coordinate plane
  int ax = 0;
  n.cwiseAbs().maxCoeff(&ax);
  const int i0 = (ax + 1) % 3, i1 = (ax + 2) % 3;
  auto pr = [&](const Vec3& v) { return Vec2(v[i0], v[i1]); };
  // projection shrinks in-plane lengths by at most |n[ax]| >= 1/sqrt(3)
  const double e2 = eps;
  if (std::abs(d0) <= eps && std::abs(d1) <= eps) {
    const Vec2 a = pr(t[0]), b = pr(t[1]), c = pr(t[2]), q0 = pr(p0), q1 = pr(p1);
    if (point_in_tri_2d(q0, a, b, c, e2) || point_in_tri_2d(q1, a, b, c, e2)) return true;
    return seg_seg_2d(q0, q1, a, b, e2) || seg_seg_2d(q0, q1, b, c, e2) || seg_seg_2d(q0, q1, c, a, e2);
  }
  Vec3 x;
  if (std::abs(d0) <= eps) x = p0;
  else if (std::abs(d1) <= eps) x = p1;
  else x = p0 + (d0 / (d0 - d1)) * (p1 - p0);
  return point_in_tri_2d(pr(x), pr(t[0]), pr(t[1]), pr(t[2]), e2);
}

bool tri_tri(const Tri& a, const Tri& b, double eps) {
  for (int i = 0; i < 3; ++i)
    if (seg_tri(a[i], a[(i + 1) % 3], b, eps) || seg_tri(b[i], b[(i + 1) % 3], a, eps)) return true;
  return false;
}

}  // namespace

std::vector<std::pair<int, int>> self_intersection(const GeometricMesh& mesh, IntersectionOptions opt) {
  const auto& T = mesh.base.tris;
  const int F = static_cast<int>(T.size());
  std::vector<std::pair<int, int>> out;
  if (F == 0) return out;
  Vec3 lo = mesh.pos[T[0][0]], hi = lo;
  for (const auto& p : mesh.pos) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  const double diag = (hi - lo).norm();
  const double eps = opt.rel_tol * std::max(diag, 1e-300);

  std::vector<Vec3> flo(F), fhi(F);
  std::vector<double> ext(F);
  for (int f = 0; f < F; ++f) {
    flo[f] = mesh.pos[T[f][0]].cwiseMin(mesh.pos[T[f][1]]).cwiseMin(mesh.pos[T[f][2]]).array() - eps;
    fhi[f] = mesh.pos[T[f][0]].cwiseMax(mesh.pos[T[f][1]]).cwiseMax(mesh.pos[T[f][2]]).array() + eps;
    ext[f] = (fhi[f] - flo[f]).maxCoeff();
  }
  std::vector<double> sorted_ext = ext;
  std::nth_element(sorted_ext.begin(), sorted_ext.begin() + F / 2, sorted_ext.end());
  double cell = std::max(sorted_ext[F / 2], diag / 256.0);
  if (!(cell > 0)) cell = 1;

  auto key = [](long x, long y, long z) {
    return (static_cast<std::uint64_t>(x & 0x1FFFFF) << 42) | (static_cast<std::uint64_t>(y & 0x1FFFFF) << 21) |
           static_cast<std::uint64_t>(z & 0x1FFFFF);
  };
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  auto cell_range = [&](int f, std::array<long, 3>& c0, std::array<long, 3>& c1) {
    for (int k = 0; k < 3; ++k) {
      c0[k] = static_cast<long>(std::floor((flo[f][k] - lo[k]) / cell));
      c1[k] = static_cast<long>(std::floor((fhi[f][k] - lo[k]) / cell));
    }
  };
  for (int f = 0; f < F; ++f) {
    std::array<long, 3> c0, c1;
    cell_range(f, c0, c1);
    for (long x = c0[0]; x <= c1[0]; ++x)
      for (long y = c0[1]; y <= c1[1]; ++y)
        for (long z = c0[2]; z <= c1[2]; ++z) grid[key(x, y, z)].push_back(f);
  }
  std::vector<std::uint64_t> cand;
  for (const auto& [k, fs] : grid)
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        const int a = std::min(fs[i], fs[j]), b = std::max(fs[i], fs[j]);
        if ((flo[a].array() > fhi[b].array()).any() || (flo[b].array() > fhi[a].array()).any()) continue;
        cand.push_back((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b));
      }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto tri = [&](int f) { return Tri{mesh.pos[T[f][0]], mesh.pos[T[f][1]], mesh.pos[T[f][2]]}; };
  for (const auto c : cand) {
    const int a = static_cast<int>(c >> 32), b = static_cast<int>(c & 0xFFFFFFFFu);
    int shared = 0, ia = -1, ib = -1;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (T[a][i] == T[b][j]) ++shared, ia = i, ib = j;
    const Tri A = tri(a), B = tri(b);
    bool hit = false;
    if (shared == 0) {
      hit = tri_tri(A, B, eps);
    } else if (shared == 1) {
      // meet away from the common vertex iff an opposite side crosses the other face
      hit = seg_tri(A[(ia + 1) % 3], A[(ia + 2) % 3], B, eps) || seg_tri(B[(ib + 1) % 3], B[(ib + 2) % 3], A, eps);
    } else if (shared == 2) {
      int ca = 0, cb = 0;
      for (int i = 0; i < 3; ++i) {
        if (std::find(T[b].begin(), T[b].end(), T[a][i]) == T[b].end()) ca = i;
        if (std::find(T[a].begin(), T[a].end(), T[b][i]) == T[a].end()) cb = i;
      }
      const Vec3 u = A[(ca + 1) % 3], v = A[(ca + 2) % 3];
      Vec3 n = (v - u).cross(A[ca] - u);
      n.normalize();
      const double dist = n.dot(B[cb] - u);
      if (std::abs(dist) <= eps) {
        // coplanar: overlapping iff both apexes lie on the same side of the shared edge
        const Vec3 e = (v - u).normalized();
        const Vec3 pa = A[ca] - u, pb = B[cb] - u;
        const Vec3 ra = pa - e * e.dot(pa), rb = pb - e * e.dot(pb);
        hit = ra.dot(rb) > 0;
      }
    } else {
      hit = true;
    }
    if (hit) out.emplace_back(a, b);
  }
  return out;
}

Modulus extract_modulus(const MetricTriangulation& mt) {
  const auto dev = develop(mt);
  if (!dev.has_lattice) throw Error(ErrorCode::Internal, "extract_modulus: holonomy does not span a lattice");
  const Modulus w1(dev.w1.x(), dev.w1.y()), w2(dev.w2.x(), dev.w2.y());
  Modulus tau = w2 / w1;
  if (tau.imag() < 0) tau = w1 / w2;
  return reduce_to_fundamental_domain(tau).tau;
}

Modulus extract_modulus(const GeometricMesh& mesh) {
  auto mt = induced_metric(mesh);
  return extract_modulus(mt);
}

VerificationReport verify_mesh(const GeometricMesh& mesh, const MetricTriangulation* reference) {
  VerificationReport r;
  const auto induced = induced_metric(mesh);
  if (reference) {
    r.isometry_max_rel_error = check_isometry(mesh, *reference);
  } else if (mesh.chart.size() == mesh.base.tris.size()) {
    r.isometry_max_rel_error = check_isometry(mesh, chart_metric(mesh));
  }
  r.flatness_max_defect = check_flatness(induced);
  r.self_intersections = self_intersection(mesh);
  r.euler = euler_audit(mesh.base);
  try {
    r.extracted_modulus = extract_modulus(induced);
  } catch (const Error&) {
    r.extracted_modulus.reset();
  }
  return r;
}

}  // namespace flattori
