#include "flattori/zalgaller.hpp"

#include "flattori/moduli.hpp"
#include "flattori/verify.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <limits>
#include <sstream>

namespace flattori {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kTwistLambda = std::atan(49.0 / 40.0);
const double kCornerLambda = std::atan(9.0 / 10.0);
const double kTurnMargin = 0.02;  // keep every gasket turn this far inside (-pi/3, pi)

Vec2 v2(double x, double y) { return {x, y}; }

Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

Frame gasket_frame(const Frame& f, double alpha, double h) {
  Frame g;
  g.c = f.c + h * f.e3();
  g.R = f.R * rot_z(alpha);
  return g;
}

Frame bend_frame(const Frame& f, double phi, double lambda, double rib) {
  const double t = rib * std::tan(lambda), rin = rib / (2 * kSqrt3);
  const Vec3 H = f.c + t * f.e3() - rin * f.e1();
  const Mat3 Q = Eigen::AngleAxisd(phi, f.e2()).toRotationMatrix();
  Frame g;
  g.c = H + Q * (f.c + 2 * t * f.e3() - H);
  g.R = Q * f.R;
  return g;
}

// angle about e3 bringing e1 onto the direction n
double turn_needed(const Frame& f, const Vec3& n) { return std::atan2(n.dot(f.e2()), n.dot(f.e1())); }

double wrap_turn(double T) {
  // representative in [-pi/3, 5pi/3)
  const double lo = -kPi / 3;
  double r = std::fmod(T - lo, 2 * kPi);
  if (r < 0) r += 2 * kPi;
  return r + lo;
}

bool legal_pair_turn(double T) { return T / 2 > -kPi / 3 + kTurnMargin && T / 2 < kPi - kTurnMargin; }

}  // namespace

Vec3 Frame::vertex(int j, double rib) const {
  const double rho = rib / kSqrt3, a = 2 * kPi * j / 3;
  return c + rho * (std::cos(a) * e1() + std::sin(a) * e2());
}

double lambda0(double phi) {
  if (!(phi > 0 && phi < kPi)) throw Error(ErrorCode::Domain, "lambda0: bending angle must lie in (0, pi)");
  return std::atan(kSqrt3 / 2 * std::tan(phi / 2));
}

double bend_margin_function(double x) { return 3 * std::asin(x / 2) - std::asin(x); }

double gasket_length(double alpha, double h) {
  if (!(alpha > -kPi / 3 && alpha < kPi)) throw Error(ErrorCode::Domain, "gasket turn must lie in (-pi/3, pi)");
  if (!(h > 0)) throw Error(ErrorCode::Domain, "gasket height must be positive");
  // The excess over h^2 is (cos(alpha - pi/3) - 1/2)^2 / 27; written as a product of sines
  // it vanishes exactly at alpha = 0.
  const double e = 2 * std::sin(alpha / 2) * std::sin(kPi / 3 - alpha / 2) / std::sqrt(27.0);
  return std::hypot(h, e);
}

double gasket_shift(double alpha) { return kSqrt3 / 9 * std::sin(alpha - kPi / 3) + 1.0 / 6; }

double lhuillier_area(double theta0) {
  return 4 * std::atan(std::sqrt(std::tan(0.75 * theta0) * std::pow(std::tan(theta0 / 4), 3)));
}

double lhuillier_theta0(double theta) {
  if (!(theta > -kPi && theta <= kPi)) throw Error(ErrorCode::Domain, "twist angle must lie in (-pi, pi]");
  const double x = std::abs(theta);
  if (x == 0) return 0;
  const double top = 4 * std::atan(std::sqrt(2 - kSqrt3));
  if (x >= kPi) return top;
  double lo = 0, hi = top;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lhuillier_area(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SectionMesh build_gasket(const GasketSpec& s, const Frame& in) {
  const double hbar = gasket_length(s.alpha, s.h);
  const double a = s.rib;
  SectionMesh out;
  out.exit = gasket_frame(in, s.alpha, s.h);
  auto& m = out.mesh;
  m.base.vertex_count = 6;
  for (int j = 0; j < 3; ++j) m.pos.push_back(in.vertex(j, a));
  for (int j = 0; j < 3; ++j) m.pos.push_back(out.exit.vertex(j, a));
  // unrolled: top ring shifted by x0 = projection of A' on AB
  const double lAA = (m.pos[3] - m.pos[0]).norm(), lBA = (m.pos[3] - m.pos[1]).norm();
  const double x0 = (lAA * lAA - lBA * lBA + a * a) / (2 * a);
  const double y0 = std::sqrt(std::max(0.0, lAA * lAA - x0 * x0));
  out.length = y0;
  out.shift = x0;
  const Vec2 A(0, 0), B(a, 0), C(2 * a, 0), A3(3 * a, 0);
  const Vec2 At(x0, y0), Bt(x0 + a, y0), Ct(x0 + 2 * a, y0), At3(x0 + 3 * a, y0);
  m.base.tris = {{0, 1, 3}, {3, 1, 4}, {4, 1, 2}, {4, 2, 5}, {5, 2, 0}, {0, 3, 5}};
  m.chart = {{A, B, At}, {At, B, Bt}, {Bt, B, C}, {Bt, C, Ct}, {Ct, C, A3}, {A3, At3, Ct}};
  (void)hbar;
  return out;
}

SectionMesh build_bend(const BendSpec& s, const Frame& in) {
  const double a = s.rib, phi = s.phi, lam = s.lambda;
  if (!(phi >= 0 && phi < kPi)) throw Error(ErrorCode::Domain, "bend angle must lie in (0, pi)");
  if (!(lam < kPi / 2)) throw Error(ErrorCode::Domain, "cutting angle must be below pi/2");
  if (phi > 0 && !(lam > lambda0(phi)))
    throw Error(ErrorCode::Infeasible, "cutting angle does not exceed lambda0(phi): the bent prism would overlap");
  if (!(lam > 0)) throw Error(ErrorCode::Domain, "cutting angle must be positive");

  const double t = a * std::tan(lam), rin = a / (2 * kSqrt3), rho = a / kSqrt3;
  // local coordinates: x along e1, y along e2, z along e3, origin at the entry center
  const Vec3 V(-rin, 0, t), C(-rin, a / 2, t), Cp(-rin, -a / 2, t);
  const Mat3 Ry = Eigen::AngleAxisd(phi, Vec3::UnitY()).toRotationMatrix();
  auto bent = [&](const Vec3& p) -> Vec3 { return V + Ry * (p - V); };
  const Vec3 A(rho, 0, 0), C0(-rin, a / 2, 0), Cp0(-rin, -a / 2, 0);
  const Vec3 B = bent(Vec3(rho, 0, 2 * t)), C2 = bent(Vec3(-rin, a / 2, 2 * t)), Cp2 = bent(Vec3(-rin, -a / 2, 2 * t));

  Vec3 Dt, D1, E, D1p, Ep;
  double d1, e;
  if (phi == 0) {
    // straight prism: the cut triangles stay flat in their faces
    d1 = a / 3;
    e = 2 * a / 3;
    Dt = Vec3(rho, 0, t);
    D1 = C + (Dt - C) * (d1 / a);
    E = C + (Dt - C) * (e / a);
    D1p = Cp + (Dt - Cp) * (d1 / a);
    Ep = Cp + (Dt - Cp) * (e / a);
  } else {
    const Vec3 M1 = 0.5 * (A + B);
    const Vec3 u = (B - A).normalized();
    const double half = 0.5 * (B - A).norm();
    const double r = std::sqrt(std::max(0.0, t * t - half * half));
    const double rc = (C - M1).norm();
    const Vec3 wc = (C - M1) / rc;
    Vec3 wp = u.cross(wc);
    if ((V - M1).dot(wp) < 0) wp = -wp;
    auto to3 = [&](const Vec2& p) -> Vec3 { return M1 + p.x() * wc + p.y() * wp; };
    const double alpha = std::acos(std::clamp(r / rc, -1.0, 1.0));
    const double beta = std::atan2((V - M1).dot(wp), (V - M1).dot(wc));
    const double delta = alpha - beta;
    if (!(beta > delta / 2))
      throw Error(ErrorCode::Internal, "bend: folded triangle leaves its quadrant (beta <= delta/2)");
    const Vec2 C2d(rc, 0), Dt2 = r * v2(std::cos(alpha), std::sin(alpha));
    // intersection of the segment P0->P1 with the ray at angle g through the origin
    auto cut = [](const Vec2& P0, const Vec2& P1, double g) {
      const Vec2 dir(std::cos(g), std::sin(g));
      const Vec2 nrm(-dir.y(), dir.x());
      const double s0 = P0.dot(nrm), s1 = P1.dot(nrm);
      return Vec2(P0 + (s0 / (s0 - s1)) * (P1 - P0));
    };
    auto reflect = [](const Vec2& p, double g) {
      const Vec2 dir(std::cos(g), std::sin(g));
      return Vec2(2 * p.dot(dir) * dir - p);
    };
    const Vec2 D1_2 = cut(C2d, Dt2, delta / 2);
    const Vec2 Dstar = reflect(Dt2, delta / 2);
    const Vec2 Estar = cut(D1_2, Dstar, 0.0);
    const Vec2 E_flat = reflect(Estar, delta / 2);  // position before the first reflection
    const Vec2 Dfinal = r * v2(std::cos(beta), std::sin(beta));
    d1 = (C2d - D1_2).norm();
    e = (C2d - E_flat).norm();
    Dt = to3(Dfinal);
    D1 = to3(D1_2);
    E = to3(Estar);
    auto mirror = [](Vec3 p) { p.y() = -p.y(); return p; };
    D1p = mirror(D1);
    Ep = mirror(E);
  }

  SectionMesh out;
  auto& m = out.mesh;
  auto world = [&](const Vec3& p) -> Vec3 { return in.c + in.R * p; };
  m.pos = {world(A), world(C0), world(Cp0), world(B), world(C2), world(Cp2), world(C),
           world(Cp), world(Dt), world(D1), world(E), world(D1p), world(Ep)};
  m.base.vertex_count = 13;
  m.base.tris = {
      {0, 1, 6}, {6, 4, 3},                                     // rigid pieces on the C side
      {0, 6, 9}, {0, 9, 10}, {0, 10, 8}, {6, 3, 9}, {9, 3, 10}, {10, 3, 8},  // fold of ACB
      {1, 2, 7}, {1, 7, 6}, {6, 7, 5}, {6, 5, 4},              // face through the hinge
      {2, 0, 7}, {7, 3, 5},                                     // rigid pieces on the C' side
      {7, 0, 11}, {11, 0, 12}, {12, 0, 8}, {3, 7, 11}, {3, 11, 12}, {3, 12, 8},  // fold of AC'B
  };
  const double L = 2 * t;
  const Vec2 cA(0, 0), cC0(a, 0), cCp0(2 * a, 0), cB(0, L), cC2(a, L), cCp2(2 * a, L), cC(a, t), cCp(2 * a, t);
  const Vec2 cD(0, t), cD1(a - d1, t), cE(a - e, t), cD1p(2 * a + d1, t), cEp(2 * a + e, t);
  const Vec2 cA3(3 * a, 0), cB3(3 * a, L), cD3(3 * a, t);
  m.chart = {
      {cA, cC0, cC}, {cC, cC2, cB},
      {cA, cC, cD1}, {cA, cD1, cE}, {cA, cE, cD}, {cC, cB, cD1}, {cD1, cB, cE}, {cE, cB, cD},
      {cC0, cCp0, cCp}, {cC0, cCp, cC}, {cC, cCp, cCp2}, {cC, cCp2, cC2},
      {cCp0, cA3, cCp}, {cCp, cB3, cCp2},
      {cCp, cA3, cD1p}, {cD1p, cA3, cEp}, {cEp, cA3, cD3}, {cB3, cCp, cD1p}, {cB3, cD1p, cEp}, {cB3, cEp, cD3},
  };
  out.exit = bend_frame(in, phi, lam, a);
  out.length = L;
  out.shift = 0;
  return out;
}

namespace {

struct TwistRun {
  Frame end;
  Vec3 c2;
  std::array<double, 6> T{};
  std::vector<SectionSpec> secs;
  std::vector<Frame> frames;
  bool legal = true;
};

struct TwistSetup {
  double theta, t0, h;
  std::array<Vec3, 4> path;
  Frame F0;
  std::array<int, 6> branch;
};

double pick_turn(double T, int flip, bool& legal) {
  T = wrap_turn(T);
  if (flip) {
    const double alt = T > kPi / 3 ? T - 2 * kPi : T + 2 * kPi;
    if (!legal_pair_turn(alt)) legal = false;
    return alt;
  }
  return T;
}

TwistRun run_twist(const TwistSetup& s, double phi, double hp) {
  TwistRun r;
  Frame F = s.F0;
  auto push_g = [&](double T, double h) {
    for (int k = 0; k < 2; ++k) {
      r.frames.push_back(F);
      r.secs.push_back({SectionKind::Gasket, T / 2, h});
      F = gasket_frame(F, T / 2, h);
    }
  };
  auto push_b = [&](double ang, double lam) {
    r.frames.push_back(F);
    r.secs.push_back({SectionKind::Bend, ang, lam});
    F = bend_frame(F, ang, lam, kRib);
  };
  auto dir_perp = [&](const Vec3& v) -> Vec3 {
    Vec3 n = v - v.dot(F.e3()) * F.e3();
    const double nn = n.norm();
    return nn > 1e-14 ? Vec3(n / nn) : Vec3(F.e1());
  };
  for (int k = 0; k < 3; ++k) {
    const double T = s.t0 == 0 ? 0.0 : pick_turn(turn_needed(F, dir_perp(s.path[k + 1])), s.branch[k], r.legal);
    r.T[k] = T;
    push_g(T, s.h);
    push_b(s.t0, kTwistLambda);
  }
  Vec3 dl = F.c - F.c.dot(F.e3()) * F.e3();
  const Vec3 wv = dl.norm() > 1e-14 ? Vec3(-dl.normalized()) : Vec3(F.e1());
  r.T[3] = pick_turn(turn_needed(F, wv), s.branch[3], r.legal);
  push_g(r.T[3], s.h);
  push_b(phi, kTwistLambda);
  r.T[4] = pick_turn(turn_needed(F, dir_perp(-wv)), s.branch[4], r.legal);
  push_g(r.T[4], hp);
  r.c2 = F.c;
  push_b(phi, kTwistLambda);
  r.T[5] = pick_turn(turn_needed(F, s.F0.e1()), s.branch[5], r.legal);
  push_g(r.T[5], s.h);
  r.frames.push_back(F);
  r.end = F;
  (void)wv;
  return r;
}

Frame initial_frame() {
  Frame F0;
  F0.R.col(0) = Vec3(0, 0, 1);
  F0.R.col(1) = Vec3(0, -1, 0);
  F0.R.col(2) = Vec3(1, 0, 0);
  return F0;
}

}  // namespace

TwistResult plan_helical_twist(double theta, double h, std::array<int, 6> branch) {
  if (!(h > 0)) throw Error(ErrorCode::Domain, "twist gasket height must be positive");
  TwistSetup s;
  s.theta = theta;
  s.h = h;
  s.t0 = lhuillier_theta0(theta);
  s.branch = branch;
  s.F0 = initial_frame();
  const double sg = theta >= 0 ? 1.0 : -1.0;
  const Vec3 P(1, 0, 0), Q(std::cos(s.t0), 0, std::sin(s.t0));
  Vec3 R = P;
  if (s.t0 > 0) {
    const Vec3 m = (P + Q).normalized(), w = P.cross(Q).normalized();
    const double x = std::acos(std::clamp(std::cos(s.t0) / P.dot(m), -1.0, 1.0));
    R = std::cos(x) * m + sg * std::sin(x) * w;
  }
  s.path = {P, Q, R, P};

  const double e_tw = 16 * (h + kRib * std::tan(kTwistLambda));
  // lateral offset is affine in the special gasket height; along-axis reach fixes phi
  auto axis_dir = [&](const TwistRun& run0) {
    const Frame& F = run0.frames[9];  // frame after the third bend
    Vec3 dl = F.c - F.c.dot(F.e3()) * F.e3();
    return dl.norm() > 1e-14 ? Vec3(-dl.normalized()) : Vec3(F.e1());
  };
  auto solve_hp = [&](double phi) {
    const TwistRun r0 = run_twist(s, phi, 0.0), r1 = run_twist(s, phi, 1.0);
    const Vec3 wv = axis_dir(r0);
    const double l0 = r0.end.c.dot(-wv), l1 = r1.end.c.dot(-wv);
    return -l0 / (l1 - l0);
  };
  double phi = 0, hp = 0;
  if (s.t0 == 0) {
    const TwistRun r0 = run_twist(s, 0.0, 0.0);
    hp = (e_tw - r0.c2.x()) / 2;
  } else {
    auto g = [&](double ph) {
      const double hpp = solve_hp(ph);
      return run_twist(s, ph, hpp).c2.x() - e_tw;
    };
    double lo = 1e-6, hi = kPi / 2 - 1e-6;
    double glo = g(lo), ghi = g(hi);
    if (!(glo > 0 && ghi < 0)) throw Error(ErrorCode::Infeasible, "helical twist: return bends cannot reach the extent");
    for (int i = 0; i < 100 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (gm > 0) lo = mid, glo = gm;
      else hi = mid, ghi = gm;
    }
    phi = 0.5 * (lo + hi);
    hp = solve_hp(phi);
  }
  if (!(hp > 0)) throw Error(ErrorCode::Infeasible, "helical twist: special gasket height not positive");
  const TwistRun run = run_twist(s, phi, hp);
  if (!run.legal) throw Error(ErrorCode::Infeasible, "helical twist: requested branch needs an illegal gasket turn");

  TwistResult res;
  auto& p = res.plan;
  p.theta = theta;
  p.theta0 = s.t0;
  p.h = h;
  p.h_prime = hp;
  p.phi = phi;
  p.e_twist = e_tw;
  p.branch = branch;
  p.pair_turns = run.T;
  p.sections = run.secs;
  for (const auto& sec : p.sections) {
    if (sec.kind == SectionKind::Gasket) {
      p.intrinsic_length += gasket_length(sec.angle, sec.param);
      p.shift += gasket_shift(sec.angle);
    } else {
      p.intrinsic_length += 2 * kRib * std::tan(sec.param);
    }
  }
  res.frames = run.frames;
  const Frame& E = run.end;
  const Vec3 lateral = E.c - E.c.x() * Vec3::UnitX();
  res.closure_residual = std::max(lateral.norm(), (E.R - s.F0.R).cwiseAbs().maxCoeff());
  if (res.closure_residual > 1e-8) {
    std::ostringstream os;
    os << "helical twist: closure residual " << res.closure_residual;
    throw Error(ErrorCode::Internal, os.str());
  }
  return res;
}

ChainMesh build_chain(const std::vector<SectionSpec>& sections, const Frame& entry, bool close_loop) {
  const int N = static_cast<int>(sections.size());
  const int rings = close_loop ? N : N + 1;
  int interior = 3 * rings;
  ChainMesh out;
  auto& m = out.mesh;
  m.pos.assign(3 * rings, Vec3::Zero());
  Frame F = entry;
  for (int j = 0; j < 3; ++j) m.pos[j] = F.vertex(j);
  double sx = 0, sy = 0;
  for (int k = 0; k < N; ++k) {
    out.frames.push_back(F);
    const auto& sec = sections[k];
    const SectionMesh sm = sec.kind == SectionKind::Gasket ? build_gasket({sec.angle, sec.param}, F)
                                                           : build_bend({sec.angle, sec.param}, F);
    const int ring_in = 3 * k, ring_out = 3 * ((k + 1) % rings);
    std::vector<int> id(sm.mesh.base.vertex_count);
    for (int j = 0; j < 3; ++j) id[j] = ring_in + j, id[3 + j] = ring_out + j;
    for (int j = 6; j < sm.mesh.base.vertex_count; ++j) {
      id[j] = interior++;
      m.pos.push_back(sm.mesh.pos[j]);
    }
    if (!(close_loop && k == N - 1))
      for (int j = 0; j < 3; ++j) m.pos[ring_out + j] = sm.mesh.pos[3 + j];
    for (std::size_t f = 0; f < sm.mesh.base.tris.size(); ++f) {
      const auto& t = sm.mesh.base.tris[f];
      m.base.tris.push_back({id[t[0]], id[t[1]], id[t[2]]});
      std::array<Vec2, 3> c;
      for (int i = 0; i < 3; ++i) c[i] = sm.mesh.chart[f][i] + Vec2(sx, sy);
      m.chart.push_back(c);
    }
    sx += sm.shift;
    sy += sm.length;
    F = sm.exit;
  }
  out.frames.push_back(F);
  m.base.vertex_count = interior;
  out.length = sy;
  out.shift = sx;
  return out;
}

TwistMesh build_helical_twist(double theta, double h, std::array<int, 6> branch) {
  TwistMesh out;
  const auto res = plan_helical_twist(theta, h, branch);
  out.plan = res.plan;
  out.chain = build_chain(res.plan.sections, initial_frame(), false);
  // parallel transport of the section: total frame rotation minus the gasket turns, before the last pair
  const Frame& before = out.chain.frames[out.chain.frames.size() - 3];
  const Frame F0 = initial_frame();
  double turned = 0;
  for (int k = 0; k < 5; ++k) turned += res.plan.pair_turns[k];
  const double total = std::atan2(before.e1().dot(F0.e2()), before.e1().dot(F0.e1()));
  double rot = std::remainder(total - turned, 2 * kPi);
  if (rot < -kPi + 1e-9) rot += 2 * kPi;
  out.rotation = rot;
  return out;
}

std::vector<SectionKind> long_torus_pattern() {
  std::vector<SectionKind> p;
  for (int k = 0; k < 5; ++k) p.insert(p.end(), {SectionKind::Gasket, SectionKind::Gasket, SectionKind::Bend});
  p.insert(p.end(), {SectionKind::Gasket, SectionKind::Gasket});
  for (int k = 0; k < 3; ++k) p.insert(p.end(), {SectionKind::Bend, SectionKind::Gasket});
  p.push_back(SectionKind::Bend);
  return p;
}

Triangulation long_torus_layout() {
  // Unrolled tube: ring k is the cross section before section k; in every section the
  // entry ring is (p0, p1, p2), the exit ring (q0, q1, q2), counterclockwise around the axis.
  const auto pattern = long_torus_pattern();
  const int N = static_cast<int>(pattern.size());
  Triangulation t;
  int next = 3 * N;
  for (int k = 0; k < N; ++k) {
    const int p0 = 3 * k, p1 = p0 + 1, p2 = p0 + 2;
    const int q0 = 3 * ((k + 1) % N), q1 = q0 + 1, q2 = q0 + 2;
    if (pattern[k] == SectionKind::Gasket) {
      // three quads p_j p_{j+1} q_{j+1} q_j, split along p_{j+1} q_j
      const int p[3] = {p0, p1, p2}, q[3] = {q0, q1, q2};
      t.tris.push_back({p[0], p[1], q[0]});
      t.tris.push_back({q[0], p[1], q[1]});
      t.tris.push_back({q[1], p[1], p[2]});
      t.tris.push_back({q[1], p[2], q[2]});
      t.tris.push_back({q[2], p[2], p[0]});
      t.tris.push_back({p[0], q[0], q[2]});
    } else {
      // mid ring: hinge vertices m1, m2, crease point md on the p0-q0 generatrix,
      // and two fold points on each altitude (f1 nearer the hinge, g1 nearer md)
      const int m1 = next, m2 = next + 1, md = next + 2, f1 = next + 3, g1 = next + 4, f2 = next + 5, g2 = next + 6;
      next += 7;
      t.tris.push_back({p0, p1, m1});
      t.tris.push_back({m1, q1, q0});
      t.tris.push_back({p0, m1, f1});
      t.tris.push_back({p0, f1, g1});
      t.tris.push_back({p0, g1, md});
      t.tris.push_back({m1, q0, f1});
      t.tris.push_back({f1, q0, g1});
      t.tris.push_back({g1, q0, md});
      t.tris.push_back({p1, p2, m2});
      t.tris.push_back({p1, m2, m1});
      t.tris.push_back({m1, m2, q2});
      t.tris.push_back({m1, q2, q1});
      t.tris.push_back({p2, p0, m2});
      t.tris.push_back({m2, q0, q2});
      t.tris.push_back({m2, p0, f2});
      t.tris.push_back({f2, p0, g2});
      t.tris.push_back({g2, p0, md});
      t.tris.push_back({q0, m2, f2});
      t.tris.push_back({q0, f2, g2});
      t.tris.push_back({q0, g2, md});
    }
  }
  t.vertex_count = next;
  return t;
}

double long_torus_length_bound(double h) {
  return 253.0 / 18 + 18 * h + 10 * std::sqrt(h * h + 1.0 / 9) +
         2 * std::sqrt(40 * std::pow(2 * h + 49.0 / 40, 2) + 1.0 / 9);
}

namespace {

struct TwistCandidate {
  double theta = 0;
  std::array<int, 6> branch{};
  double score = -1;  // smallest distance of a gasket turn to its limits
};

double turn_score(const TwistPlan& p) {
  double sc = std::numeric_limits<double>::infinity();
  for (double T : p.pair_turns) sc = std::min({sc, T / 2 + kPi / 3, kPi - T / 2});
  return sc;
}

// Finds theta and branches with total shift = target (mod 1).
std::optional<TwistCandidate> search_twist(double target, double h) {
  auto wrapped = [&](const TwistPlan& p) { return std::remainder(p.shift - target, 1.0); };
  std::optional<TwistCandidate> best;
  const int grid = 48;
  for (int b = 0; b < 64; ++b) {
    std::array<int, 6> br;
    for (int k = 0; k < 6; ++k) br[k] = (b >> k) & 1;
    std::vector<double> th, val;
    for (int i = 0; i <= grid; ++i) {
      double x = -kPi + 2 * kPi * i / grid;
      if (i == 0) x = -kPi + 1e-9;
      if (std::abs(x) < 1e-9) x = 1e-6;
      try {
        const auto r = plan_helical_twist(x, h, br);
        th.push_back(x);
        val.push_back(wrapped(r.plan));
      } catch (const Error&) {
        th.push_back(x);
        val.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    for (int i = 0; i < grid; ++i) {
      const double v0 = val[i], v1 = val[i + 1];
      if (std::isnan(v0) || std::isnan(v1)) continue;
      if (std::abs(v0) > 0.25 || std::abs(v1) > 0.25) continue;  // skip wrap jumps
      if (!((v0 <= 0 && v1 >= 0) || (v0 >= 0 && v1 <= 0))) continue;
      double lo = th[i], hi = th[i + 1], flo = v0;
      bool ok = true;
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        double fm;
        try {
          fm = wrapped(plan_helical_twist(mid, h, br).plan);
        } catch (const Error&) {
          ok = false;
          break;
        }
        if ((fm <= 0) == (flo <= 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      if (!ok) continue;
      const double x = 0.5 * (lo + hi);
      try {
        const auto r = plan_helical_twist(x, h, br);
        if (std::abs(wrapped(r.plan)) > 1e-11) continue;
        const double sc = turn_score(r.plan);
        if (!best || sc > best->score + 1e-12) best = TwistCandidate{x, br, sc};
      } catch (const Error&) {
      }
    }
  }
  return best;
}

}  // namespace

LongTorus assemble_long_torus(Modulus tau_in, const LongTorusOptions& opt) {
  if (!(tau_in.imag() > 0)) throw Error(ErrorCode::Domain, "modulus must lie in the upper half-plane");
  const Modulus tau = reduce_to_fundamental_domain(tau_in).tau;
  if (tau.imag() < kLongThreshold && !opt.override_length_check) {
    std::ostringstream os;
    os << "long torus route needs Im tau >= 33 (got " << tau.imag() << "); use the diplotorus route";
    throw Error(ErrorCode::Domain, os.str());
  }
  LongTorus out;
  out.mirror = tau.real() < 0;
  double target = std::abs(tau.real());
  auto cand = search_twist(target, opt.h);
  if (!cand) {
    // the mirror image realizes the opposite shift
    cand = search_twist(1.0 - target, opt.h);
    if (!cand) throw Error(ErrorCode::Infeasible, "no helical twist realizes the required circular shift");
    out.mirror = !out.mirror;
    target = 1.0 - target;
  }
  auto tw = build_helical_twist(cand->theta, opt.h, cand->branch);
  const double tc = kRib * std::tan(kCornerLambda), rin = kRib / (2 * kSqrt3), rho = kRib / kSqrt3;
  const double clearance = 0.05;
  {
    // large turns swing the twist behind its end cross sections, where the vertical
    // prisms stand; lengthen the first and last gasket (both run along x) to clear them
    double xmin = 1e300, xmax = -1e300;
    for (const auto& p : tw.chain.mesh.pos) xmin = std::min(xmin, p.x()), xmax = std::max(xmax, p.x());
    const double X0 = tw.chain.frames.back().c.x();
    const double pad_s = xmin < -1e-9 ? -xmin + 2 * clearance : 0.0;
    const double pad_e = xmax > X0 + 1e-9 ? xmax - X0 + 2 * clearance : 0.0;
    if (pad_s > 0 || pad_e > 0) {
      auto& secs = tw.plan.sections;
      secs.front().param += pad_s;
      secs.back().param += pad_e;
      tw.plan.intrinsic_length = 0;
      for (const auto& sec : secs)
        tw.plan.intrinsic_length +=
            sec.kind == SectionKind::Gasket ? gasket_length(sec.angle, sec.param) : 2 * kRib * std::tan(sec.param);
      tw.chain = build_chain(secs, initial_frame(), false);
    }
  }
  out.twist = tw.plan;

  const Frame F0 = initial_frame();
  const double X = tw.chain.frames.back().c.x();
  double zmax = -1e300;
  for (const auto& p : tw.chain.mesh.pos) zmax = std::max(zmax, p.z());
  // the horizontal prism, at height 2(tc - rin) + V, must pass above the twist
  const double v_min = std::max(kRib / 3, zmax + rho + clearance - 2 * (tc - rin));
  const double P = X;
  const double fixed = tw.plan.intrinsic_length + 8 * tc + P;
  const double V = (tau.imag() - fixed) / 2;
  if (V < v_min) {
    std::ostringstream os;
    os << "long torus: length " << tau.imag() << " too short for this twist (needs at least " << fixed + 2 * v_min
       << ")";
    throw Error(ErrorCode::Budget, os.str());
  }
  out.vertical_prism = V;
  out.horizontal_prism = P;

  out.sections = tw.plan.sections;
  const SectionSpec corner{SectionKind::Bend, kPi / 2, kCornerLambda};
  out.sections.insert(out.sections.end(), {corner, {SectionKind::Gasket, 0, V}, corner, {SectionKind::Gasket, 0, P},
                                           corner, {SectionKind::Gasket, 0, V}, corner});
  const ChainMesh chain = build_chain(out.sections, F0, true);
  const Frame& last = chain.frames.back();
  const double res = std::max((last.c - F0.c).norm(), (last.R - F0.R).cwiseAbs().maxCoeff());
  if (res > 1e-8) {
    std::ostringstream os;
    os << "long torus: loop closure residual " << res;
    throw Error(ErrorCode::Internal, os.str());
  }
  out.mesh = chain.mesh;
  if (!self_intersection(out.mesh).empty())
    throw Error(ErrorCode::Internal, "long torus: assembled surface is not embedded");
  out.intrinsic_length = chain.length;
  out.realized = Modulus(chain.shift, chain.length);
  if (out.mirror) {
    for (auto& p : out.mesh.pos) p.y() = -p.y();
    for (std::size_t f = 0; f < out.mesh.base.tris.size(); ++f) {
      std::swap(out.mesh.base.tris[f][1], out.mesh.base.tris[f][2]);
      auto& c = out.mesh.chart[f];
      std::swap(c[1], c[2]);
      for (auto& q : c) q.x() = -q.x();
    }
  }
  return out;
}

}  // namespace flattori
