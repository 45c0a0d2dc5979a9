// Prints one PASS/FAIL line per acceptance criterion. Exit status is 0 when the set of
// failing criteria equals the --expect-fail list (empty by default).
#include "flattori/bz_fold.hpp"
#include "flattori/conformal.hpp"
#include "flattori/coverage.hpp"
#include "flattori/diplotorus.hpp"
#include "flattori/flat_mesh.hpp"
#include "flattori/moduli.hpp"
#include "flattori/universal.hpp"
#include "flattori/verify.hpp"
#include "flattori/zalgaller.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace flattori;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool same_class(Modulus x, Modulus y, double tol) {
  const Modulus rx = reduce_to_fundamental_domain(x).tau, ry = reduce_to_fundamental_domain(y).tau;
  for (int k = -1; k <= 1; ++k)
    if (std::abs(rx - ry + Modulus(k, 0)) < tol) return true;
  return false;
}

std::string g(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

// Unfolds an open cylinder from its 3D edge lengths, entry edge (0, 1) on the x-axis,
// and returns the largest |y - target| over the given exit vertices and |y| over entry ones.
double developed_height_error(const GeometricMesh& m, const std::vector<int>& entry, const std::vector<int>& exit,
                              double target) {
  const auto& T = m.base.tris;
  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (std::size_t f = 0; f < T.size(); ++f)
    for (int i = 0; i < 3; ++i) by_edge[std::minmax(T[f][i], T[f][(i + 1) % 3])].push_back(static_cast<int>(f));
  std::vector<std::array<Vec2, 3>> place(T.size());
  std::vector<char> done(T.size(), 0);
  auto len = [&](int a, int b) { return (m.pos[a] - m.pos[b]).norm(); };
  // third corner of a triangle over segment p->q, on the side given by sign
  auto apex = [&](Vec2 p, Vec2 q, double lp, double lq, double sign) {
    const double d = (q - p).norm();
    const double x = (lp * lp - lq * lq + d * d) / (2 * d);
    const double y = std::sqrt(std::max(0.0, lp * lp - x * x));
    const Vec2 e = (q - p) / d, nrm(-e.y(), e.x());
    return Vec2(p + x * e + sign * y * nrm);
  };
  int f0 = -1, i0 = 0;
  for (std::size_t f = 0; f < T.size() && f0 < 0; ++f)
    for (int i = 0; i < 3; ++i)
      if (std::minmax(T[f][i], T[f][(i + 1) % 3]) == std::minmax(entry[0], entry[1])) f0 = static_cast<int>(f), i0 = i;
  const int a = T[f0][i0], b = T[f0][(i0 + 1) % 3], c = T[f0][(i0 + 2) % 3];
  std::map<int, Vec2> start{{entry[0], Vec2(0, 0)}, {entry[1], Vec2(len(entry[0], entry[1]), 0)}};
  place[f0][i0] = start[a], place[f0][(i0 + 1) % 3] = start[b];
  place[f0][(i0 + 2) % 3] = apex(start[a], start[b], len(a, c), len(b, c), start[a].x() < start[b].x() ? 1 : -1);
  done[f0] = 1;
  std::queue<int> q;
  q.push(f0);
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    for (int i = 0; i < 3; ++i) {
      const int u = T[f][i], v = T[f][(i + 1) % 3], w = T[f][(i + 2) % 3];
      for (int h : by_edge[std::minmax(u, v)]) {
        if (done[h]) continue;
        int j = 0;
        while (T[h][j] == u || T[h][j] == v) ++j;
        const int x = T[h][j];
        const Vec2 pu = place[f][i], pv = place[f][(i + 1) % 3], pw = place[f][(i + 2) % 3];
        const Vec2 e = pv - pu;
        const double side = e.x() * (pw - pu).y() - e.y() * (pw - pu).x() > 0 ? -1 : 1;
        const Vec2 px = apex(pu, pv, len(u, x), len(v, x), side);
        for (int k = 0; k < 3; ++k) place[h][k] = T[h][k] == u ? pu : (T[h][k] == v ? pv : px);
        done[h] = 1;
        q.push(h);
      }
    }
  }
  double err = 0;
  for (std::size_t f = 0; f < T.size(); ++f)
    for (int k = 0; k < 3; ++k) {
      const int v = T[f][k];
      if (std::find(entry.begin(), entry.end(), v) != entry.end()) err = std::max(err, std::abs(place[f][k].y()));
      if (std::find(exit.begin(), exit.end(), v) != exit.end())
        err = std::max(err, std::abs(std::abs(place[f][k].y()) - target));
    }
  return err;
}

Outcome c1_census() {
  ShortCensus s;
  const auto ov = overlay_short(&s);
  const auto& U = merged_overlay();
  const auto& c = U.census;
  std::vector<std::string> bad;
  auto want = [&](const char* name, long got, long expect) {
    if (got != expect) bad.push_back(std::string(name) + "=" + std::to_string(got) + "(want " + std::to_string(expect) + ")");
  };
  want("short/period", s.intersections_per_period, 56);
  want("short_intersections", s.intersection_vertices, 1064);
  want("short_V", s.vertices, 1102);
  want("short_F", s.triangles, 2204);
  want("E_c", c.E_c, 45);
  for (int r = 0; r < 3; ++r) want(("V_ext" + std::to_string(r)).c_str(), c.V_ext[r], 41);
  want("V_long", c.V_long, 135);
  want("V_c", c.V_c, 45);
  want("V_d", c.V_d, 90);
  want("merged_V", c.vertices, 2987);
  want("merged_F", c.triangles, 5974);
  want("chi_long", euler_audit(U.long_layout).chi, 0);
  want("long_F", static_cast<long>(U.long_layout.tris.size()), 270);
  want("chi_short", euler_audit(ov.triangulated).chi, 0);
  want("chi_merged", euler_audit(U.overlay.triangulated).chi, 0);
  std::string d = "short 56/1064/1102/2204 exact; merged " + std::to_string(c.vertices) + "V/" +
                  std::to_string(c.triangles) + "F chi 0";
  if (!bad.empty()) {
    d += "; mismatches:";
    for (const auto& b : bad) d += " " + b;
  }
  return {bad.empty(), d};
}

Outcome c2_gasket() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> A(-kPi / 3, kPi), H(1e-3, 2);
  double worst = 0, excess = -1;
  for (int i = 0; i < 1000; ++i) {
    double a = A(rng);
    if (a <= -kPi / 3) continue;
    const double h = H(rng);
    const auto s = build_gasket({a, h});
    const double hb = gasket_length(a, h);
    worst = std::max(worst, developed_height_error(s.mesh, {0, 1, 2}, {3, 4, 5}, hb));
    excess = std::max(excess, hb * hb - h * h);
    // literal closed form, evaluated separately
    const double u = std::pow(std::sin(a / 2), 2), v = std::pow(std::sin(kPi / 3 - a / 2), 2);
    const double lit = std::sqrt(h * h + 2.0 / 27 * (u + v) - 4.0 / 81 * (u - v) * (u - v) - 1.0 / 36);
    worst = std::max(worst, std::abs(lit - hb));
  }
  double at0 = 0;
  for (double h : {1e-3, 0.01, 0.1, 0.5, 1.0, 2.0}) at0 = std::max(at0, std::abs(gasket_length(0, h) - h));
  const bool ok = worst < 1e-10 && at0 == 0 && excess < 1.0 / 9;
  return {ok, "max development error " + g(worst) + ", |hbar-h| at alpha=0: " + g(at0) + ", max hbar^2-h^2 " + g(excess)};
}

Outcome c3_bend() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> P(0.01, kPi - 0.01), U(0.01, 0.99);
  double worst = 0;
  long hits = 0;
  for (int i = 0; i < 200; ++i) {
    const double phi = P(rng), l0 = lambda0(phi);
    const double lam = l0 + (kPi / 2 - l0) * U(rng);
    const auto b = build_bend({phi, lam});
    worst = std::max(worst, developed_height_error(b.mesh, {0, 1, 2}, {3, 4, 5}, 2 * kRib * std::tan(lam)) /
                                std::max(1.0, 2 * kRib * std::tan(lam)));
    hits += static_cast<long>(self_intersection(b.mesh).size());
  }
  return {worst < 1e-10 && hits == 0, "max development error (relative to max(1, length)) " + g(worst) +
                                          ", self-intersecting pairs " + std::to_string(hits)};
}

Outcome c4_twist() {
  const double a = kRib, l0 = std::atan(49.0 / 40);
  double rot = 0, len = 0;
  bool bound = true;
  for (double th : {kPi / 4, -kPi / 4, kPi / 2, -kPi / 2, 3 * kPi / 4, -3 * kPi / 4, kPi}) {
    const auto t = build_helical_twist(th, 0.01);
    rot = std::max(rot, std::abs(t.rotation - th));
    // 10 a tan(lambda0) + sum of the gasket lengths (ten of height h, two of height h')
    double formula = 0;
    int bends = 0;
    for (const auto& s : t.plan.sections) {
      if (s.kind == SectionKind::Bend) ++bends, formula += 2 * a * std::tan(s.param);
      else formula += gasket_length(s.angle, s.param);
    }
    bool lam_ok = true;
    for (const auto& s : t.plan.sections)
      if (s.kind == SectionKind::Bend) lam_ok = lam_ok && std::abs(s.param - l0) < 1e-15;
    const int N = static_cast<int>(t.plan.sections.size());
    const double dev = developed_height_error(t.chain.mesh, {0, 1, 2}, {3 * N, 3 * N + 1, 3 * N + 2}, formula);
    len = std::max(len, dev);
    if (bends != 5 || !lam_ok) len = 1;
    bound = bound && t.plan.h_prime <= 2 * std::sqrt(10.0) * (2 * 0.01 + 3 * a * std::tan(l0));
  }
  return {rot < 1e-8 && len < 1e-9 && bound,
          "max rotation error " + g(rot) + ", max length error " + g(len) + ", h' bound " + (bound ? "holds" : "VIOLATED")};
}

Outcome c5_long() {
  std::string d;
  bool ok = true;
  for (Modulus tau : {Modulus(0, 40), Modulus(0.25, 35), Modulus(-0.4, 50)}) {
    const auto L = assemble_long_torus(tau);
    const auto r = verify_mesh(L.mesh);
    const bool this_ok = L.mesh.base.tris.size() == 270 && r.flatness_max_defect < 1e-9 &&
                         r.isometry_max_rel_error < 1e-8 && r.self_intersections.empty() && r.extracted_modulus &&
                         same_class(*r.extracted_modulus, tau, 1e-7);
    ok = ok && this_ok;
    d += (d.empty() ? "" : "; ") + g(tau.real()) + "+" + g(tau.imag()) + "i: flat " + g(r.flatness_max_defect) +
         " iso " + g(r.isometry_max_rel_error) + (this_ok ? " ok" : " FAIL");
  }
  return {ok, d};
}

Outcome c6_diplotorus() {
  std::mt19937_64 rng(6);
  double worst = 0;
  for (int done = 0; done < 200;) {
    const int n = std::uniform_int_distribution<int>(5, 25)(rng);
    int d = std::uniform_int_distribution<int>(2, n - 3)(rng);
    if (rng() % 2) d = -d;
    const double lo = d > 0 ? d + 1 : 1 - n, hi = d > 0 ? n - 1 : d - 1;
    const double a = lo + (hi - lo) * std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    const double h = std::uniform_real_distribution<double>(0.05, 5)(rng);
    const DiplotorusParams p{n, d, a, h};
    const Modulus x = reduce_to_fundamental_domain(extract_modulus(build_diplotorus(p))).tau;
    const Modulus y = reduce_to_fundamental_domain(modulus_formula(p)).tau;
    double e = std::abs(x - y);
    for (int k : {-1, 1}) e = std::min(e, std::abs(x - y + Modulus(k, 0)));
    worst = std::max(worst, e);
    ++done;
  }
  int caught = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = std::uniform_int_distribution<int>(5, 21)(rng);
    const int d = std::uniform_int_distribution<int>(2, n - 3)(rng);
    const double eps = std::uniform_real_distribution<double>(1e-6, 1e-2)(rng);
    DiplotorusParams p{n, d, 0.5 * (d + n), 1};
    switch (i % 3) {
      case 0: p.a = d + 1 - eps; break;
      case 1: p.a = n - 1 + eps; break;
      default: p.h = -eps; break;
    }
    try {
      if (!self_intersection(build_diplotorus(p)).empty()) ++caught;
    } catch (const Error&) {
      ++caught;
    }
  }
  return {worst < 1e-8 && caught == 50,
          "max modulus gap " + g(worst) + ", violating tuples rejected or intersecting " + std::to_string(caught) + "/50"};
}

Outcome c7_coverage() {
  const auto r = coverage_audit(10000, 7);
  return {r.failures.empty() && r.realized == 10000,
          std::to_string(r.realized) + "/" + std::to_string(r.samples) + " realized, max residual " + g(r.max_residual) +
              ", min region margin " + g(r.min_margin)};
}

Outcome c8_appendix() {
  const auto rep = verify_appendix_inequalities(10000);
  std::string failed;
  for (const auto& c : rep.checks)
    if (!c.ok) failed += " " + c.name;
  return {rep.all_ok(), std::to_string(rep.checks.size()) + " checks" + (failed.empty() ? " all hold" : "; failed:" + failed)};
}

Outcome c9_universal() {
  const auto& base = merged_overlay().overlay.triangulated;
  bool ok = true;
  std::string d = std::to_string(base.tris.size()) + "-face complex;";
  for (Modulus tau : {Modulus(0, 1), Modulus(0.5, std::sqrt(3.0) / 2), Modulus(0.3, 2), Modulus(0, 40)}) {
    const auto r = realize_universal(tau);
    const auto v = verify_mesh(r.mesh);
    const bool same = r.mesh.base.tris == base.tris && r.mesh.base.twin == base.twin;
    const bool this_ok = same && v.isometry_max_rel_error < 1e-8 && v.flatness_max_defect < 1e-8 &&
                         v.self_intersections.empty();
    ok = ok && this_ok;
    d += " iso " + g(v.isometry_max_rel_error) + (this_ok ? " ok" : " FAIL");
  }
  return {ok, d};
}

Outcome c10_bz() {
  BzOptions opt;
  opt.face_budget = 300000;
  const auto r = assemble_bz_torus(Modulus(0, 1), opt);
  const auto v = verify_mesh(r.mesh);
  const bool mod_ok = v.extracted_modulus && std::abs(*v.extracted_modulus - Modulus(0, 1)) < 1e-6;
  const bool ok_mesh = v.isometry_max_rel_error < 1e-8 && v.euler.chi == 0 && v.euler.closed && mod_ok;
  // conformality of both map families at 1000 points
  auto ratio = [](const std::function<Vec3(double, double)>& f, double x, double y) {
    const double h = 1e-6;
    Eigen::Matrix<double, 3, 2> J;
    J.col(0) = (f(x + h, y) - f(x - h, y)) / (2 * h);
    J.col(1) = (f(x, y + h) - f(x, y - h)) / (2 * h);
    const auto sv = Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(J).singularValues();
    return sv[0] / sv[1];
  };
  const auto rect = make_rect_map(1.0);
  const auto hopf = solve_hopf_params_auto(Modulus(0.5, std::sqrt(3.0) / 2));
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> U(0, 1);
  double worst = 1;
  for (int i = 0; i < 1000; ++i) {
    const double x = U(rng), y = U(rng);
    worst = std::max(worst, ratio([&](double a, double b) { return rect_map_eval(rect, a, b); }, x, y));
    worst = std::max(worst, ratio([&](double a, double b) { return hopf_torus_eval(hopf, a, b); }, x, y));
  }
  return {ok_mesh && worst < 1 + 1e-4,
          std::to_string(r.mesh.base.tris.size()) + " faces, iso " + g(v.isometry_max_rel_error) + ", genus " +
              (v.euler.chi == 0 ? "1" : "?") + ", modulus " + (mod_ok ? "ok" : "FAIL") + ", self-intersections " +
              std::to_string(v.self_intersections.size()) + " (reported), conformality ratio " + g(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::set<int>* target = a == "--expect-fail" ? &expect_fail : (a == "--only" ? &only : nullptr);
    if (!target || i + 1 >= argc) {
      std::fprintf(stderr, "usage: acceptance [--expect-fail 1,2] [--only 3,4]\n");
      return 2;
    }
    std::stringstream ss(argv[++i]);
    for (std::string t; std::getline(ss, t, ',');) target->insert(std::stoi(t));
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> crit{
      {"exact combinatorial census", c1_census},   {"gasket law", c2_gasket},
      {"bend law", c3_bend},                       {"helical twist", c4_twist},
      {"long torus end to end", c5_long},          {"diplotorus modulus formula", c6_diplotorus},
      {"short moduli coverage", c7_coverage},      {"appendix inequalities", c8_appendix},
      {"one triangulation for all moduli", c9_universal}, {"BZ route and conformal maps", c10_bz}};
  std::set<int> failed;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = crit[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) failed.insert(id);
    std::printf("%s %2d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, crit[i].first, s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::set<int> expected;
  for (int id : expect_fail)
    if (only.empty() || only.count(id)) expected.insert(id);
  return failed == expected ? 0 : 1;
}
