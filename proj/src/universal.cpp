#include "flattori/universal.hpp"

#include "flattori/diplotorus.hpp"
#include "flattori/verify.hpp"
#include "flattori/zalgaller.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

namespace flattori {

namespace {

using Q = mpq_class;

struct PLess {
  bool operator()(const QPoint& a, const QPoint& b) const {
    const int c = cmp(a.x, b.x);
    return c < 0 || (c == 0 && a.y < b.y);
  }
};

QPoint operator+(const QPoint& a, const QPoint& b) { return {a.x + b.x, a.y + b.y}; }
QPoint operator-(const QPoint& a, const QPoint& b) { return {a.x - b.x, a.y - b.y}; }
QPoint operator*(const Q& s, const QPoint& a) { return {s * a.x, s * a.y}; }
bool operator==(const QPoint& a, const QPoint& b) { return a.x == b.x && a.y == b.y; }
Q cross(const QPoint& a, const QPoint& b) { return a.x * b.y - a.y * b.x; }
Q dot(const QPoint& a, const QPoint& b) { return a.x * b.x + a.y * b.y; }

Q qfloor(const Q& a) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  return Q(r);
}

struct Torus {
  Q wx, wy;
  QPoint canon(const QPoint& p) const { return {p.x - wx * qfloor(p.x / wx), p.y - wy * qfloor(p.y / wy)}; }
};

// ccw angular order of direction vectors starting at angle 0
bool angle_less(const QPoint& a, const QPoint& b) {
  auto half = [](const QPoint& d) { return sgn(d.y) > 0 || (sgn(d.y) == 0 && sgn(d.x) > 0) ? 0 : 1; };
  const int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return sgn(cross(a, b)) > 0;
}

using HalfKey = std::tuple<int, int, Q, Q>;

// Planar arrangement of straight segments on a rectangular torus, in exact arithmetic.
class Arrangement {
 public:
  struct Input {
    QPoint a, b;
  };

  Arrangement(Torus T, const std::vector<Input>& in) : T_(T) {
    dedupe(in);
    split_all();
    build_vertices();
    build_edges();
    trace_faces();
  }

  const Torus& torus() const { return T_; }
  int vertex_count() const { return static_cast<int>(vert_.size()); }
  const QPoint& vertex(int v) const { return vert_[v]; }
  int vertex_of(const QPoint& p) const {
    const auto it = vid_.find(T_.canon(p));
    return it == vid_.end() ? -1 : it->second;
  }
  int unique_of_input(int i) const { return in2u_[i]; }
  const std::vector<int>& inputs_of_unique(int u) const { return u2in_[u]; }
  int unique_count() const { return static_cast<int>(seg_.size()); }
  // vertices along a unique segment in order, endpoints included
  const std::vector<int>& chain(int u) const { return chain_[u]; }
  const std::vector<int>& segments_at(int v) const { return vsegs_[v]; }
  int edge_count() const { return static_cast<int>(hfrom_.size() / 2); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  // Triangulates every face: fan from the smallest vertex id that gives no degenerate
  // triangle, ear clipping at strict corners otherwise (faces here are convex).
  void triangulate(Overlay& out) const {
    out.period_x = {T_.wx, 0};
    out.period_y = {0, T_.wy};
    out.faces.clear();
    out.tri_xy.clear();
    auto& tris = out.triangulated.tris;
    tris.clear();
    for (const auto& cyc : faces_) {
      std::vector<int> ids;
      std::vector<QPoint> xy;
      QPoint cur = vert_[hfrom_[cyc[0]]];
      for (int h : cyc) {
        ids.push_back(hfrom_[h]);
        xy.push_back(cur);
        cur = cur + hd_[h];
      }
      out.faces.push_back(ids);
      const int n = static_cast<int>(ids.size());
      auto area2 = [&](int i, int j, int k) { return cross(xy[j] - xy[i], xy[k] - xy[i]); };
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ids[a] < ids[b]; });
      bool done = false;
      for (int s : order) {
        bool ok = true;
        for (int i = 1; i + 1 < n && ok; ++i) ok = sgn(area2(s, (s + i) % n, (s + i + 1) % n)) > 0;
        if (!ok) continue;
        for (int i = 1; i + 1 < n; ++i) {
          const int a = s, b = (s + i) % n, c = (s + i + 1) % n;
          tris.push_back({ids[a], ids[b], ids[c]});
          out.tri_xy.push_back({xy[a], xy[b], xy[c]});
        }
        done = true;
        break;
      }
      if (done) continue;
      std::vector<int> live(n);
      for (int i = 0; i < n; ++i) live[i] = i;
      while (live.size() > 3) {
        const int m = static_cast<int>(live.size());
        int best = -1;
        for (int i = 0; i < m; ++i) {
          if (sgn(area2(live[(i + m - 1) % m], live[i], live[(i + 1) % m])) <= 0) continue;
          if (best < 0 || ids[live[i]] < ids[live[best]]) best = i;
        }
        if (best < 0) throw Error(ErrorCode::Internal, "overlay face has no strictly convex corner");
        const int a = live[(best + m - 1) % m], b = live[best], c = live[(best + 1) % m];
        tris.push_back({ids[a], ids[b], ids[c]});
        out.tri_xy.push_back({xy[a], xy[b], xy[c]});
        live.erase(live.begin() + best);
      }
      if (sgn(area2(live[0], live[1], live[2])) <= 0) throw Error(ErrorCode::Internal, "degenerate overlay face");
      tris.push_back({ids[live[0]], ids[live[1]], ids[live[2]]});
      out.tri_xy.push_back({xy[live[0]], xy[live[1]], xy[live[2]]});
    }
    out.triangulated.vertex_count = vertex_count();
    // twins from lifted half-edge displacements, which separate parallel edges
    std::map<HalfKey, int> key;
    for (std::size_t f = 0; f < tris.size(); ++f)
      for (int i = 0; i < 3; ++i) {
        const QPoint d = out.tri_xy[f][(i + 1) % 3] - out.tri_xy[f][i];
        key[{tris[f][i], tris[f][(i + 1) % 3], d.x, d.y}] = static_cast<int>(3 * f + i);
      }
    auto& twin = out.triangulated.twin;
    twin.assign(tris.size(), {-1, -1, -1});
    for (std::size_t f = 0; f < tris.size(); ++f)
      for (int i = 0; i < 3; ++i) {
        const QPoint d = out.tri_xy[f][(i + 1) % 3] - out.tri_xy[f][i];
        const auto it = key.find({tris[f][(i + 1) % 3], tris[f][i], Q(-d.x), Q(-d.y)});
        if (it == key.end()) throw Error(ErrorCode::Internal, "overlay triangulation is not closed");
        twin[f][i] = it->second;
      }
  }

 private:
  Torus T_;
  std::vector<Input> seg_;
  std::vector<int> in2u_;
  std::vector<std::vector<int>> u2in_;
  std::vector<std::vector<std::pair<Q, QPoint>>> split_;
  std::vector<QPoint> vert_;
  std::map<QPoint, int, PLess> vid_;
  std::vector<std::vector<int>> chain_, vsegs_;
  std::vector<int> hfrom_, hto_;
  std::vector<QPoint> hd_;
  std::vector<int> hnext_;
  std::vector<std::vector<int>> faces_;

  void dedupe(const std::vector<Input>& in) {
    std::map<std::array<Q, 4>, int> seen;
    for (const auto& s : in) {
      QPoint a = s.a, b = s.b;
      QPoint ca = T_.canon(a), d = b - a;
      QPoint cb = T_.canon(b), e = a - b;
      std::array<Q, 4> k1{ca.x, ca.y, d.x, d.y}, k2{cb.x, cb.y, e.x, e.y};
      if (k2 < k1) std::swap(k1, k2), std::swap(ca, cb), std::swap(d, e);
      const auto it = seen.find(k1);
      if (it != seen.end()) {
        in2u_.push_back(it->second);
        u2in_[it->second].push_back(static_cast<int>(in2u_.size()) - 1);
        continue;
      }
      const int id = static_cast<int>(seg_.size());
      seen[k1] = id;
      seg_.push_back({ca, ca + d});
      in2u_.push_back(id);
      u2in_.push_back({static_cast<int>(in2u_.size()) - 1});
    }
  }

  void add_split(int s, const Q& t) { split_[s].push_back({t, seg_[s].a + t * (seg_[s].b - seg_[s].a)}); }

  void intersect(int s, int t, const QPoint& off) {
    const QPoint A = seg_[s].a, d = seg_[s].b - A;
    const QPoint C = seg_[t].a + off, e = seg_[t].b - seg_[t].a;
    const QPoint w = C - A;
    const Q den = cross(d, e);
    if (sgn(den) != 0) {
      const Q u = cross(w, e) / den, v = cross(w, d) / den;
      if (sgn(u) >= 0 && u <= 1 && sgn(v) >= 0 && v <= 1) add_split(s, u), add_split(t, v);
      return;
    }
    if (sgn(cross(w, d)) != 0) return;
    const Q dd = dot(d, d), ee = dot(e, e);
    for (const QPoint& P : {C, C + e}) {
      const Q u = dot(P - A, d) / dd;
      if (sgn(u) >= 0 && u <= 1) add_split(s, u);
    }
    for (const QPoint& P : {A, A + d}) {
      const Q v = dot(P - C, e) / ee;
      if (sgn(v) >= 0 && v <= 1) add_split(t, v);
    }
  }

  void split_all() {
    const int n = static_cast<int>(seg_.size());
    split_.assign(n, {});
    struct Box {
      double x0, x1, y0, y1;
    };
    std::vector<Box> box(n);
    for (int i = 0; i < n; ++i) {
      const double ax = seg_[i].a.x.get_d(), ay = seg_[i].a.y.get_d(), bx = seg_[i].b.x.get_d(),
                   by = seg_[i].b.y.get_d();
      box[i] = {std::min(ax, bx), std::max(ax, bx), std::min(ay, by), std::max(ay, by)};
      add_split(i, 0);
      add_split(i, 1);
    }
    const double wx = T_.wx.get_d(), wy = T_.wy.get_d(), eps = 1e-9;
    for (int s = 0; s < n; ++s)
      for (int t = s; t < n; ++t) {
        const int i0 = static_cast<int>(std::ceil((box[s].x0 - box[t].x1) / wx - eps));
        const int i1 = static_cast<int>(std::floor((box[s].x1 - box[t].x0) / wx + eps));
        const int j0 = static_cast<int>(std::ceil((box[s].y0 - box[t].y1) / wy - eps));
        const int j1 = static_cast<int>(std::floor((box[s].y1 - box[t].y0) / wy + eps));
        for (int i = i0; i <= i1; ++i)
          for (int j = j0; j <= j1; ++j) {
            if (s == t && i == 0 && j == 0) continue;
            intersect(s, t, {Q(i) * T_.wx, Q(j) * T_.wy});
          }
      }
  }

  void build_vertices() {
    for (auto& sp : split_)
      for (auto& [t, p] : sp) vid_.emplace(T_.canon(p), 0);
    for (auto& [p, id] : vid_) {
      id = static_cast<int>(vert_.size());
      vert_.push_back(p);
    }
    vsegs_.assign(vert_.size(), {});
    chain_.assign(seg_.size(), {});
    for (std::size_t s = 0; s < seg_.size(); ++s) {
      auto& sp = split_[s];
      std::sort(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      sp.erase(std::unique(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
               sp.end());
      for (const auto& [t, p] : sp) {
        const int v = vid_.at(T_.canon(p));
        chain_[s].push_back(v);
        vsegs_[v].push_back(static_cast<int>(s));
      }
    }
  }

  void build_edges() {
    std::set<HalfKey> have;
    for (std::size_t s = 0; s < seg_.size(); ++s) {
      const auto& sp = split_[s];
      for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
        const int u = chain_[s][i], v = chain_[s][i + 1];
        const QPoint d = sp[i + 1].second - sp[i].second;
        if (!have.insert({u, v, d.x, d.y}).second) continue;
        have.insert({v, u, Q(-d.x), Q(-d.y)});
        hfrom_.insert(hfrom_.end(), {u, v});
        hto_.insert(hto_.end(), {v, u});
        hd_.push_back(d);
        hd_.push_back({-d.x, -d.y});
      }
    }
    const int H = static_cast<int>(hfrom_.size());
    std::vector<std::vector<int>> out(vert_.size());
    for (int h = 0; h < H; ++h) out[hfrom_[h]].push_back(h);
    std::vector<int> pos(H);
    for (auto& o : out) {
      std::sort(o.begin(), o.end(), [&](int a, int b) { return angle_less(hd_[a], hd_[b]); });
      for (std::size_t i = 0; i < o.size(); ++i) pos[o[i]] = static_cast<int>(i);
    }
    hnext_.assign(H, -1);
    for (int h = 0; h < H; ++h) {
      const int tw = h ^ 1;
      const auto& o = out[hto_[h]];
      const int k = pos[tw];
      hnext_[h] = o[(k + static_cast<int>(o.size()) - 1) % o.size()];
    }
  }

  void trace_faces() {
    const int H = static_cast<int>(hfrom_.size());
    std::vector<char> seen(H, 0);
    Q total = 0;
    for (int h0 = 0; h0 < H; ++h0) {
      if (seen[h0]) continue;
      std::vector<int> cyc;
      QPoint cur{0, 0};
      Q area = 0;
      for (int h = h0; !seen[h]; h = hnext_[h]) {
        seen[h] = 1;
        cyc.push_back(h);
        const QPoint nxt = cur + hd_[h];
        area += cross(cur, nxt);
        cur = nxt;
      }
      if (!(cur == QPoint{0, 0})) throw Error(ErrorCode::Internal, "overlay face does not close in the plane");
      if (sgn(area) <= 0) throw Error(ErrorCode::Internal, "overlay face with non-positive area");
      total += area;
      faces_.push_back(std::move(cyc));
    }
    if (total != 2 * T_.wx * T_.wy) throw Error(ErrorCode::Census, "overlay faces do not tile the torus");
  }
};

QPoint qp(long x, long y) { return {Q(x), Q(y)}; }

int mod19(int k) { return ((k % 19) + 19) % 19; }
std::string lab(char c, int k) { return std::string(1, c) + "_" + std::to_string(mod19(k)); }

// Strip point (k, y) with y in {-1, 0, 1}.
QPoint strip_point(char c, int k) { return qp(k, c == 'A' ? -1 : (c == 'B' ? 0 : 1)); }

// The four triangle families of T_{19,d}, with diplotorus face indices.
struct StripTri {
  std::array<char, 3> c;
  std::array<int, 3> k;
  int face;
};
std::vector<StripTri> strip_tris(int d) {
  std::vector<StripTri> t;
  for (int k = 0; k < 19; ++k) t.push_back({{'A', 'A', 'B'}, {k, k + 1, k}, k});
  for (int k = 0; k < 19; ++k) t.push_back({{'B', 'A', 'B'}, {k, k + 1, k + 1}, 19 + k});
  for (int k = 0; k < 19; ++k) t.push_back({{'C', 'C', 'B'}, {k + 1, k, k - d}, 38 + k});
  for (int k = 0; k < 19; ++k) t.push_back({{'B', 'C', 'B'}, {k + 1 - d, k + 1, k - d}, 57 + k});
  return t;
}

int diplo_id(char c, int k) { return c == 'B' ? 19 + mod19(k) : mod19(k); }

constexpr std::array<int, 3> kFamilies{2, 7, 13};

}  // namespace

StripLayout strip_layout(int d) {
  if (d <= 0 || d >= 17) throw Error(ErrorCode::Domain, "strip layout needs 0 < d < 17");
  StripLayout s;
  s.d = d;
  for (int k = 0; k < 19; ++k)
    for (char c : {'A', 'B', 'C'}) s.points[lab(c, k)] = strip_point(c, k);
  std::set<std::array<Q, 4>> seen;
  Torus T{19, 2};
  for (const auto& t : strip_tris(d)) {
    std::array<QPoint, 3> xy;
    std::array<std::string, 3> l;
    for (int i = 0; i < 3; ++i) xy[i] = strip_point(t.c[i], t.k[i]), l[i] = lab(t.c[i], t.k[i]);
    s.triangles.push_back(xy);
    s.labels.push_back(l);
    for (int i = 0; i < 3; ++i) {
      QPoint a = xy[i], b = xy[(i + 1) % 3];
      QPoint ca = T.canon(a), cb = T.canon(b);
      std::array<Q, 4> k1{ca.x, ca.y, b.x - a.x, b.y - a.y}, k2{cb.x, cb.y, a.x - b.x, a.y - b.y};
      if (k2 < k1) std::swap(k1, k2);
      if (seen.insert(k1).second) s.segments.push_back({a, b});
    }
  }
  return s;
}

Triangulation strip_quotient(const StripLayout& s) {
  Triangulation t;
  t.vertex_count = 38;
  auto id = [](const std::string& l) {
    const int k = std::stoi(l.substr(2));
    return l[0] == 'B' ? 19 + k : k;  // C_k is A_k
  };
  for (const auto& l : s.labels) t.tris.push_back({id(l[0]), id(l[1]), id(l[2])});
  return t;
}

Overlay overlay_short(ShortCensus* census) {
  std::vector<Arrangement::Input> in;
  for (int d : kFamilies)
    for (const auto& [a, b] : strip_layout(d).segments) in.push_back({a, b});
  const Arrangement arr(Torus{19, 2}, in);
  Overlay out;
  arr.triangulate(out);
  int inter = 0;
  for (int v = 0; v < arr.vertex_count(); ++v) {
    OverlayVertex ov;
    ov.p = arr.vertex(v);
    const bool original = ov.p.x == qfloor(ov.p.x) && (ov.p.y == 0 || ov.p.y == 1);
    ov.origin = original ? VertexOrigin::Original : VertexOrigin::Intersection;
    if (original) ov.label = lab(ov.p.y == 0 ? 'B' : 'A', static_cast<int>(ov.p.x.get_d()));
    else ++inter;
    out.vertices.push_back(ov);
  }
  if (census) {
    census->intersection_vertices = inter;
    census->intersections_per_period = inter / 19;
    census->vertices = arr.vertex_count();
    census->triangles = static_cast<int>(out.triangulated.tris.size());
    census->chi = arr.vertex_count() - arr.edge_count() + arr.face_count();
  }
  return out;
}

namespace {

// Merged layout on [0,24) x [0,19): x runs along the tube (ring r at x = r), y around it
// in strip units (short vertex index k at y = k). The long ribs sit at y = 0, kRib1, kRib2,
// so every short vertex other than A_0, B_0 lies inside the central strip.
const Q kRib1(1, 50);
const Q kRib2 = Q(19) - kRib1;
constexpr int kExtSection = 22;  // last right prism, carries the B-C band

QPoint merged_short_point(char c, int k) {
  const Q x = c == 'A' ? Q(kExtSection - 23) : (c == 'B' ? Q(kExtSection) : Q(kExtSection + 1));
  return {x, Q(k)};
}

enum Role { P0, P1, P2, Q0, Q1, Q2, M1, M2, MD, F1, G1, F2, G2 };

struct LongFace {
  std::array<int, 3> id;
  std::array<Role, 3> role;
  int section;
};

std::vector<LongFace> long_faces() {
  const auto pattern = long_torus_pattern();
  const int N = static_cast<int>(pattern.size());
  std::vector<LongFace> out;
  int next = 3 * N;
  for (int k = 0; k < N; ++k) {
    std::array<int, 13> id;
    id[P0] = 3 * k, id[P1] = 3 * k + 1, id[P2] = 3 * k + 2;
    const int q = 3 * ((k + 1) % N);
    id[Q0] = q, id[Q1] = q + 1, id[Q2] = q + 2;
    std::vector<std::array<Role, 3>> fr;
    if (pattern[k] == SectionKind::Gasket) {
      fr = {{P0, P1, Q0}, {Q0, P1, Q1}, {Q1, P1, P2}, {Q1, P2, Q2}, {Q2, P2, P0}, {P0, Q0, Q2}};
    } else {
      for (int j = 0; j < 7; ++j) id[M1 + j] = next + j;
      next += 7;
      fr = {{P0, P1, M1}, {M1, Q1, Q0}, {P0, M1, F1}, {P0, F1, G1}, {P0, G1, MD}, {M1, Q0, F1}, {F1, Q0, G1},
            {G1, Q0, MD}, {P1, P2, M2}, {P1, M2, M1}, {M1, M2, Q2}, {M1, Q2, Q1}, {P2, P0, M2}, {M2, Q0, Q2},
            {M2, P0, F2}, {F2, P0, G2}, {G2, P0, MD}, {Q0, M2, F2}, {Q0, F2, G2}, {Q0, G2, MD}};
    }
    for (const auto& r : fr) out.push_back({{id[r[0]], id[r[1]], id[r[2]]}, r, k});
  }
  return out;
}

QPoint long_point(const LongFace& f, int i) {
  bool top = false;
  for (Role r : f.role) top = top || r == P2 || r == Q2 || r == M2 || r == F2 || r == G2;
  const Q x0(f.section), half(1, 2);
  const Q zero_y = top ? Q(19) : Q(0);
  switch (f.role[i]) {
    case P0: return {x0, zero_y};
    case P1: return {x0, kRib1};
    case P2: return {x0, kRib2};
    case Q0: return {x0 + 1, zero_y};
    case Q1: return {x0 + 1, kRib1};
    case Q2: return {x0 + 1, kRib2};
    case M1: return {x0 + half, kRib1};
    case M2: return {x0 + half, kRib2};
    case MD: return {x0 + half, zero_y};
    case F1: return {x0 + half, 2 * kRib1 / 3};
    case G1: return {x0 + half, kRib1 / 3};
    case F2: return {x0 + half, kRib2 + (19 - kRib2) / 3};
    case G2: return {x0 + half, kRib2 + 2 * (19 - kRib2) / 3};
  }
  return {};
}

// Diagonals of planar rectangles: the two outer rectangles of every bend and the walls of
// the right prisms (the untwisted gaskets of the closing loop).
bool removed_diagonal(const LongFace& f, Role a, Role b, const std::vector<SectionKind>& pattern) {
  auto is = [&](Role x, Role y) { return (a == x && b == y) || (a == y && b == x); };
  if (pattern[f.section] == SectionKind::Bend) return is(P1, M2) || is(M1, Q2);
  if (f.section == 18 || f.section == 20 || f.section == 22) return is(P1, Q0) || is(P2, Q1) || is(P0, Q2);
  return false;
}

struct SegTag {
  enum Kind { Long, Short } kind;
  Role ra{}, rb{};  // long: roles of the endpoints
  int section = -1;
  char ca = 0, cb = 0;  // short: endpoint families and indices
  int ka = 0, kb = 0;
};

bool central_long(const SegTag& t) {
  auto rib = [](Role r) { return r == P1 || r == Q1 || r == M1 ? 1 : (r == P2 || r == Q2 || r == M2 ? 2 : 0); };
  return t.kind == SegTag::Long && rib(t.ra) + rib(t.rb) == 3 && rib(t.ra) * rib(t.rb) == 2;
}

// A_k B_k (1 <= k <= 18) and A_{k+1} B_k (1 <= k <= 17)
bool central_short(const SegTag& t) {
  if (t.kind != SegTag::Short) return false;
  int ka = -1, kb = -1;
  if (t.ca == 'A' && t.cb == 'B') ka = t.ka, kb = t.kb;
  else if (t.ca == 'B' && t.cb == 'A') ka = t.kb, kb = t.ka;
  else return false;
  return (ka == kb && ka >= 1 && ka <= 18) || (ka == kb + 1 && kb >= 1 && kb <= 17);
}

bool exit_diagonal(const SegTag& t) {
  if (t.kind != SegTag::Short) return false;
  int ka = -1, kb = -1;
  if (t.ca == 'A' && t.cb == 'B') ka = t.ka, kb = t.kb;
  else if (t.ca == 'B' && t.cb == 'A') ka = t.kb, kb = t.ka;
  else return false;
  return (ka == 1 && kb == 0) || (ka == 19 && kb == 18);
}

int ext_rib(const SegTag& t) {
  if (t.kind != SegTag::Long || t.section != kExtSection) return -1;
  auto is = [&](Role x, Role y) { return (t.ra == x && t.rb == y) || (t.ra == y && t.rb == x); };
  if (is(P0, Q0)) return 0;
  if (is(P1, Q1)) return 1;
  if (is(P2, Q2)) return 2;
  return -1;
}

bool in_triangle(const std::array<QPoint, 3>& T, const QPoint& p) {
  const Q a = cross(T[1] - T[0], p - T[0]), b = cross(T[2] - T[1], p - T[1]), c = cross(T[0] - T[2], p - T[2]);
  return (sgn(a) >= 0 && sgn(b) >= 0 && sgn(c) >= 0) || (sgn(a) <= 0 && sgn(b) <= 0 && sgn(c) <= 0);
}

Vec3 barycentric(const std::array<QPoint, 3>& T, const QPoint& p) {
  const Q A = cross(T[1] - T[0], T[2] - T[0]);
  const Q b0 = cross(T[1] - p, T[2] - p) / A, b1 = cross(T[2] - p, T[0] - p) / A;
  const Q b2 = 1 - b0 - b1;
  return {b0.get_d(), b1.get_d(), b2.get_d()};
}

// Locates every merged face in a family of coarse triangles (lifted in the plane).
CellMap locate(const Overlay& ov, const std::vector<std::array<QPoint, 3>>& cells,
               const std::vector<std::array<int, 3>>& ids, const std::vector<int>& face_index) {
  const Q wx = ov.period_x.x, wy = ov.period_y.y;
  const double dwx = wx.get_d(), dwy = wy.get_d();
  struct Box {
    double x0, x1, y0, y1;
    std::array<double, 6> xy;  // corners, counterclockwise
  };
  std::vector<Box> box;
  for (const auto& c : cells) {
    Box b{1e300, -1e300, 1e300, -1e300, {}};
    for (int k = 0; k < 3; ++k) {
      const double x = c[k].x.get_d(), y = c[k].y.get_d();
      b.x0 = std::min(b.x0, x), b.x1 = std::max(b.x1, x), b.y0 = std::min(b.y0, y), b.y1 = std::max(b.y1, y);
      b.xy[2 * k] = x, b.xy[2 * k + 1] = y;
    }
    const double o = (b.xy[2] - b.xy[0]) * (b.xy[5] - b.xy[1]) - (b.xy[3] - b.xy[1]) * (b.xy[4] - b.xy[0]);
    if (o < 0) std::swap(b.xy[2], b.xy[4]), std::swap(b.xy[3], b.xy[5]);
    box.push_back(b);
  }
  // -1 clearly outside, 1 clearly inside, 0 too close to call in double
  auto side = [](const Box& b, double x, double y) {
    int r = 1;
    for (int k = 0; k < 3; ++k) {
      const double ax = b.xy[2 * k], ay = b.xy[2 * k + 1], bx = b.xy[(2 * k + 2) % 6], by = b.xy[(2 * k + 3) % 6];
      const double s = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
      if (s < -1e-9) return -1;
      if (s < 1e-9) r = 0;
    }
    return r;
  };
  CellMap m;
  const std::size_t F = ov.tri_xy.size();
  m.face.resize(F);
  m.ids.resize(F);
  m.bary.resize(F);
  for (std::size_t f = 0; f < F; ++f) {
    const auto& t = ov.tri_xy[f];
    double tx[3], ty[3];
    for (int k = 0; k < 3; ++k) tx[k] = t[k].x.get_d(), ty[k] = t[k].y.get_d();
    const double cx = (tx[0] + tx[1] + tx[2]) / 3, cy = (ty[0] + ty[1] + ty[2]) / 3;
    bool found = false;
    for (std::size_t g = 0; g < cells.size() && !found; ++g) {
      const int i0 = static_cast<int>(std::ceil((box[g].x0 - cx) / dwx - 1e-9));
      const int i1 = static_cast<int>(std::floor((box[g].x1 - cx) / dwx + 1e-9));
      const int j0 = static_cast<int>(std::ceil((box[g].y0 - cy) / dwy - 1e-9));
      const int j1 = static_cast<int>(std::floor((box[g].y1 - cy) / dwy + 1e-9));
      for (int i = i0; i <= i1 && !found; ++i)
        for (int j = j0; j <= j1 && !found; ++j) {
          const int sd = side(box[g], cx + i * dwx, cy + j * dwy);
          if (sd < 0) continue;
          if (sd == 0) {
            const QPoint off{Q(i) * wx, Q(j) * wy};
            if (!in_triangle(cells[g], Q(1, 3) * (t[0] + t[1] + t[2]) + off)) continue;
          }
          found = true;
          m.face[f] = face_index[g];
          m.ids[f] = ids[g];
          const QPoint off{Q(i) * wx, Q(j) * wy};
          for (int k = 0; k < 3; ++k) m.bary[f][k] = barycentric(cells[g], t[k] + off);
        }
    }
    if (!found) throw Error(ErrorCode::Internal, "merged face lies in no coarse cell");
  }
  return m;
}

UniversalTriangulation build_merged() {
  UniversalTriangulation U;
  U.long_layout = long_torus_layout();
  const auto pattern = long_torus_pattern();
  const auto lf = long_faces();
  if (lf.size() != U.long_layout.tris.size()) throw Error(ErrorCode::Internal, "long layout size mismatch");
  for (std::size_t f = 0; f < lf.size(); ++f)
    if (lf[f].id != U.long_layout.tris[f]) throw Error(ErrorCode::Internal, "long layout labels mismatch");

  std::vector<Arrangement::Input> in;
  std::vector<SegTag> tags;
  std::vector<std::array<QPoint, 3>> long_xy;
  std::map<QPoint, int, PLess> long_vertex;
  const Torus T{24, 19};
  for (const auto& f : lf) {
    std::array<QPoint, 3> xy;
    for (int i = 0; i < 3; ++i) {
      xy[i] = long_point(f, i);
      long_vertex[T.canon(xy[i])] = f.id[i];
    }
    long_xy.push_back(xy);
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      if (removed_diagonal(f, f.role[i], f.role[j], pattern)) continue;
      in.push_back({xy[i], xy[j]});
      SegTag t{SegTag::Long};
      t.ra = f.role[i], t.rb = f.role[j], t.section = f.section;
      tags.push_back(t);
    }
  }
  if (long_vertex.size() != 135) throw Error(ErrorCode::Census, "long layout positions are not distinct");
  std::array<std::vector<std::array<QPoint, 3>>, 3> short_xy;
  std::array<std::vector<std::array<int, 3>>, 3> short_ids;
  std::array<std::vector<int>, 3> short_face;
  for (int fi = 0; fi < 3; ++fi)
    for (const auto& st : strip_tris(kFamilies[fi])) {
      std::array<QPoint, 3> xy;
      std::array<int, 3> ids;
      for (int i = 0; i < 3; ++i) xy[i] = merged_short_point(st.c[i], st.k[i]), ids[i] = diplo_id(st.c[i], st.k[i]);
      short_xy[fi].push_back(xy);
      short_ids[fi].push_back(ids);
      short_face[fi].push_back(st.face);
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        in.push_back({xy[i], xy[j]});
        SegTag t{SegTag::Short};
        t.ca = st.c[i], t.cb = st.c[j], t.ka = st.k[i], t.kb = st.k[j];
        // C_k in the A-B band is written A_{k}; the lifted index keeps A_19 distinct from A_0
        tags.push_back(t);
      }
    }

  const Arrangement arr(T, in);
  arr.triangulate(U.overlay);

  // vertex provenance
  const int V = arr.vertex_count();
  std::vector<char> is_long(V, 0), is_short(V, 0), on_long(V, 0);
  std::vector<int> short_segs(V, 0);
  std::vector<char> unique_long(arr.unique_count(), 0), unique_short(arr.unique_count(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int u = arr.unique_of_input(static_cast<int>(i));
    (tags[i].kind == SegTag::Long ? unique_long : unique_short)[u] = 1;
  }
  for (int v = 0; v < V; ++v)
    for (int u : arr.segments_at(v)) {
      if (unique_long[u]) on_long[v] = 1;
      if (unique_short[u]) ++short_segs[v];
    }
  for (const auto& [p, id] : long_vertex) is_long[arr.vertex_of(p)] = 1;
  for (int k = 0; k < 19; ++k)
    for (char c : {'A', 'B'}) is_short[arr.vertex_of(merged_short_point(c, k))] = 1;
  U.overlay.vertices.resize(V);
  for (const auto& [p, id] : long_vertex) U.overlay.vertices[arr.vertex_of(p)].label = "L" + std::to_string(id);
  for (int k = 0; k < 19; ++k)
    for (char c : {'A', 'B'}) {
      auto& l = U.overlay.vertices[arr.vertex_of(merged_short_point(c, k))].label;
      l = l.empty() ? lab(c, k) : l + "=" + lab(c, k);
    }
  for (int v = 0; v < V; ++v) {
    U.overlay.vertices[v].p = arr.vertex(v);
    U.overlay.vertices[v].origin = is_long[v] || is_short[v] ? VertexOrigin::Original : VertexOrigin::Intersection;
  }

  auto& C = U.census;
  std::set<int> central_long_u, central_short_u, diag_u;
  std::array<std::set<int>, 3> rib_u;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int u = arr.unique_of_input(static_cast<int>(i));
    if (central_long(tags[i])) central_long_u.insert(u);
    if (central_short(tags[i])) central_short_u.insert(u);
    if (exit_diagonal(tags[i])) diag_u.insert(u);
    if (const int r = ext_rib(tags[i]); r >= 0) rib_u[r].insert(u);
  }
  auto is_new = [&](int v) { return !is_long[v] && !is_short[v]; };
  auto is_cap = [&](int v) { return is_new(v) && short_segs[v] >= 2; };
  C.E_c = static_cast<int>(central_long_u.size());
  C.V_long = static_cast<int>(long_vertex.size());
  for (int v = 0; v < V; ++v) {
    if (is_cap(v)) ++C.V_cap;
    if (is_short[v] && !is_long[v]) ++C.short_originals;
  }
  std::set<int> counted;
  for (int r = 0; r < 3; ++r)
    for (int u : rib_u[r])
      for (int v : arr.chain(u))
        if (is_new(v) && !is_cap(v)) ++C.V_ext[r], counted.insert(v);
  C.ext_crossings = C.V_ext[0] + C.V_ext[1] + C.V_ext[2];
  C.central_edges = static_cast<int>(central_short_u.size());
  C.V_c = C.V_c_new = -2;
  for (int u : central_short_u) {
    int inc = 0, fresh = 0;
    for (int v : arr.chain(u)) {
      if (on_long[v]) ++inc;
      if (is_new(v)) ++fresh, counted.insert(v);
    }
    C.V_c = C.V_c == -2 || C.V_c == inc ? inc : -1;
    C.V_c_new = C.V_c_new == -2 || C.V_c_new == fresh ? fresh : -1;
  }
  for (int u : diag_u)
    for (int v : arr.chain(u))
      if (is_new(v)) ++C.V_d, counted.insert(v);
  int other = 0;
  for (int v = 0; v < V; ++v)
    if (is_new(v) && !is_cap(v) && !counted.count(v)) ++other;
  if (other != 0) {
    std::ostringstream os;
    os << "merged overlay: " << other << " long/short crossings outside the counted families";
    throw Error(ErrorCode::Census, os.str());
  }
  C.vertices = V;
  C.triangles = static_cast<int>(U.overlay.triangulated.tris.size());
  C.chi = V - arr.edge_count() + arr.face_count();

  std::vector<std::array<int, 3>> lids;
  std::vector<int> lidx;
  for (std::size_t f = 0; f < lf.size(); ++f) lids.push_back(lf[f].id), lidx.push_back(static_cast<int>(f));
  U.long_cells = locate(U.overlay, long_xy, lids, lidx);
  for (int fi = 0; fi < 3; ++fi) U.short_cells[fi] = locate(U.overlay, short_xy[fi], short_ids[fi], short_face[fi]);
  return U;
}

}  // namespace

const UniversalTriangulation& merged_overlay() {
  static std::once_flag once;
  static UniversalTriangulation U;
  std::call_once(once, [] { U = build_merged(); });
  return U;
}

namespace {

std::array<Vec2, 3> unfold(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double l = (b - a).norm();
  const Vec3 e = (b - a) / l;
  const double x = (c - a).dot(e);
  const double y = ((c - a) - x * e).norm();
  return {Vec2(0, 0), Vec2(l, 0), Vec2(x, y)};
}

struct Coarse {
  GeometricMesh mesh;
  std::map<std::array<int, 3>, int> face_of;  // sorted vertex ids -> face
};

std::array<int, 3> sorted(std::array<int, 3> a) {
  std::sort(a.begin(), a.end());
  return a;
}

GeometricMesh map_through(const Coarse& c, const CellMap& cells, bool by_ids) {
  const auto& U = merged_overlay();
  GeometricMesh out;
  out.base = U.overlay.triangulated;
  out.pos.assign(out.base.vertex_count, Vec3::Zero());
  out.chart.resize(out.base.tris.size());
  std::vector<char> set(out.base.vertex_count, 0);
  for (std::size_t f = 0; f < out.base.tris.size(); ++f) {
    const auto& ids = cells.ids[f];
    const int g = by_ids ? c.face_of.at(sorted(ids)) : cells.face[f];
    const auto& gt = c.mesh.base.tris[g];
    std::array<Vec3, 3> P;
    std::array<Vec2, 3> X;
    for (int j = 0; j < 3; ++j) {
      const int slot = static_cast<int>(std::find(gt.begin(), gt.end(), ids[j]) - gt.begin());
      if (slot == 3) throw Error(ErrorCode::Internal, "coarse face does not match its cell");
      P[j] = c.mesh.pos[ids[j]];
      X[j] = c.mesh.chart[g][slot];
    }
    for (int i = 0; i < 3; ++i) {
      const Vec3& b = cells.bary[f][i];
      const Vec3 p = b[0] * P[0] + b[1] * P[1] + b[2] * P[2];
      out.chart[f][i] = b[0] * X[0] + b[1] * X[1] + b[2] * X[2];
      const int v = out.base.tris[f][i];
      if (!set[v]) out.pos[v] = p, set[v] = 1;
    }
  }
  return out;
}

UniversalRealization realize_once(Modulus tau) {
  const auto& U = merged_overlay();
  UniversalRealization r;
  r.choice = select_realization(tau);
  Coarse c;
  if (r.choice.kind == RealizationKind::ZalgallerLong) {
    const LongTorus lt = assemble_long_torus(tau);
    c.mesh = lt.mesh;
    for (std::size_t g = 0; g < c.mesh.base.tris.size(); ++g)
      c.face_of[sorted(c.mesh.base.tris[g])] = static_cast<int>(g);
    if (c.face_of.size() != c.mesh.base.tris.size()) throw Error(ErrorCode::Internal, "long torus has repeated faces");
    r.coarse_modulus = extract_modulus(c.mesh);
    r.mesh = map_through(c, U.long_cells, true);
  } else {
    const int fi = static_cast<int>(std::find(kFamilies.begin(), kFamilies.end(), r.choice.d) - kFamilies.begin());
    if (fi == 3) throw Error(ErrorCode::Internal, "unexpected diplotorus family");
    const DiplotorusParams p = solve_params(19, r.choice.d, r.choice.target);
    c.mesh = build_diplotorus(p);
    for (const auto& t : c.mesh.base.tris) c.mesh.chart.push_back(unfold(c.mesh.pos[t[0]], c.mesh.pos[t[1]], c.mesh.pos[t[2]]));
    r.coarse_modulus = extract_modulus(c.mesh);
    r.mesh = map_through(c, U.short_cells[fi], false);
  }
  return r;
}

}  // namespace

// The merged complex carries one fixed orientation, so the extracted modulus matches the
// input up to the reflection tau -> -conj(tau); the surface is isometric to the flat torus
// either way. For tau_1 < 0 the diplotorus route reflects the final mesh in one axis.
UniversalRealization realize_universal(Modulus tau) {
  if (!(tau.imag() > 0)) throw Error(ErrorCode::Domain, "modulus must lie in the upper half-plane");
  UniversalRealization r = realize_once(tau);
  if (r.choice.kind == RealizationKind::Diplotorus && r.choice.mirror)
    for (auto& p : r.mesh.pos) p.x() = -p.x();
  return r;
}

}  // namespace flattori
