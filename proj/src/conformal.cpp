#include "flattori/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flattori {

struct HopfTables {
  int panels = 0;
  double step = 0;
  std::vector<double> L, A;  // cumulative values at panel ends, size panels + 1
};

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double phi_of(const HopfBanchoffMap& m, double t) { return m.a + m.b * std::sin(m.n * t); }

double speed(double a, double b, int n, double t) {
  const double c = n * b * std::cos(n * t), s = std::sin(a + b * std::sin(n * t));
  return std::sqrt(c * c + s * s);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

double bessel_j0(double b) {
  // split in eight panels so the first Simpson estimate cannot vanish by aliasing
  double s = 0;
  for (int k = 0; k < 8; ++k)
    s += adaptive_simpson([b](double t) { return std::cos(b * std::sin(t)); }, kPi * k / 8, kPi * (k + 1) / 8, 1e-14);
  return s / kPi;
}

RectConformalMap make_rect_map(double tau_i, double shortness, int k) {
  if (!(tau_i > 0)) throw Error(ErrorCode::Domain, "rectangular map needs tau_i > 0");
  if (k < 1) throw Error(ErrorCode::Domain, "winding k must be positive");
  RectConformalMap m;
  m.tau_i = tau_i;
  m.k = k;
  m.r = 1;
  m.R = m.r * std::sqrt(tau_i * tau_i * k * k + 1);
  m.scale = 1;
  m.scale = shortness / rect_max_stretch(m);
  return m;
}

double rect_alpha(const RectConformalMap& m, double u) {
  const double s = std::sqrt((m.R + m.r) / (m.R - m.r));
  const double x = m.k * kPi * u;
  return (std::atan(s * std::tan(x)) + kPi * std::floor(x / kPi + 0.5)) / kPi;
}

Vec3 rect_map_eval(const RectConformalMap& m, double u, double v) {
  if (!(m.tau_i > 0)) throw Error(ErrorCode::Domain, "rectangular map needs tau_i > 0");
  const double al = 2 * kPi * rect_alpha(m, u), be = 2 * kPi * v / m.tau_i;
  const double rad = m.R + m.r * std::cos(al);
  return m.scale * Vec3(rad * std::cos(be), rad * std::sin(be), m.r * std::sin(al));
}

double rect_max_stretch(const RectConformalMap& m) { return 2 * kPi * (m.R + m.r) / m.tau_i; }

double hopf_total_length(double a, double b, int n) {
  const int panels = 8 * std::max(n, 1);
  double s = 0;
  for (int k = 0; k < panels; ++k)
    s += adaptive_simpson([&](double t) { return speed(a, b, n, t); }, 2 * kPi * k / panels,
                          2 * kPi * (k + 1) / panels, 1e-13);
  return s;
}

double hopf_total_area(double a, double b) { return 2 * kPi * (1 - bessel_j0(b) * std::cos(a)); }

HopfBanchoffMap make_hopf_map(Modulus tau, double a, double b, int n, double shortness) {
  if (!(a - b > 0 && a + b < kPi && b >= 0))
    throw Error(ErrorCode::Domain, "Hopf curve polar angle must stay in (0, pi)");
  if (n < 1) throw Error(ErrorCode::Domain, "Hopf frequency n must be positive");
  HopfBanchoffMap m;
  m.tau = tau;
  m.a = a;
  m.b = b;
  m.n = n;
  auto t = std::make_shared<HopfTables>();
  t->panels = 64 * n;
  t->step = 2 * kPi / t->panels;
  t->L.assign(t->panels + 1, 0);
  t->A.assign(t->panels + 1, 0);
  for (int k = 0; k < t->panels; ++k) {
    const double lo = k * t->step, hi = lo + t->step;
    t->L[k + 1] = t->L[k] + adaptive_simpson([&](double x) { return speed(a, b, n, x); }, lo, hi, 1e-15);
    t->A[k + 1] =
        t->A[k] + adaptive_simpson([&](double x) { return 1 - std::cos(a + b * std::sin(n * x)); }, lo, hi, 1e-15);
  }
  m.tables = t;
  m.scale = 1;
  m.scale = shortness / hopf_max_stretch(m);
  return m;
}

CurveGeometry hopf_curve(const HopfBanchoffMap& m, double theta) {
  const auto& t = *m.tables;
  const double turns = std::floor(theta / (2 * kPi));
  const double th = theta - 2 * kPi * turns;
  const int k = std::clamp(static_cast<int>(th / t.step), 0, t.panels - 1);
  const double lo = k * t.step;
  CurveGeometry g;
  g.theta = theta;
  g.L_of_theta = turns * t.L.back() + t.L[k] +
                 adaptive_simpson([&](double x) { return speed(m.a, m.b, m.n, x); }, lo, th, 1e-15);
  g.A_of_theta = turns * t.A.back() + t.A[k] +
                 adaptive_simpson([&](double x) { return 1 - std::cos(phi_of(m, x)); }, lo, th, 1e-15);
  return g;
}

double hopf_theta_of_length(const HopfBanchoffMap& m, double L) {
  const auto& t = *m.tables;
  const double total = t.L.back();
  const double turns = std::floor(L / total);
  const double r = L - turns * total;
  const int k = std::clamp(static_cast<int>(std::upper_bound(t.L.begin(), t.L.end(), r) - t.L.begin()) - 1, 0,
                           t.panels - 1);
  double lo = k * t.step, hi = lo + t.step;
  // safeguarded Newton inside the panel; the speed is positive since 0 < phi < pi
  double x = lo + t.step * (r - t.L[k]) / (t.L[k + 1] - t.L[k]);
  for (int it = 0; it < 60; ++it) {
    const double f = hopf_curve(m, x).L_of_theta - r;
    if (std::abs(f) < 1e-15 * std::max(1.0, total)) break;
    if (f > 0) hi = x;
    else lo = x;
    double nx = x - f / speed(m.a, m.b, m.n, x);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) < 1e-16) break;
    x = nx;
  }
  return x + 2 * kPi * turns;
}

HopfBanchoffMap solve_hopf_params(Modulus tau, int n, double shortness) {
  const double t1 = tau.real(), ti = tau.imag();
  if (!(t1 >= 0 && t1 <= 1)) throw Error(ErrorCode::Domain, "Hopf route needs 0 <= tau_1 <= 1");
  if (!(ti > 0)) throw Error(ErrorCode::Domain, "modulus must lie in the upper half-plane");
  if (n < 1) throw Error(ErrorCode::Domain, "Hopf frequency n must be positive");
  const double c = 1 - 2 * t1, target = 4 * kPi * ti;
  // area constraint fixes a given b; then bisect the length constraint in b
  auto a_of = [&](double b, bool& ok) {
    const double J = bessel_j0(b);
    ok = false;
    if (!(std::abs(c) < J)) return 0.0;
    const double a = std::acos(c / J);
    ok = a - b > 0 && a + b < kPi;
    return a;
  };
  const int grid = 400;
  double lmin = 1e300, lmax = -1e300;
  double prev_b = -1, prev_f = 0;
  for (int i = 0; i <= grid; ++i) {
    const double b = (kPi / 2) * i / grid;
    bool ok;
    const double a = a_of(b, ok);
    if (!ok) {
      prev_b = -1;
      continue;
    }
    const double L = hopf_total_length(a, b, n);
    lmin = std::min(lmin, L), lmax = std::max(lmax, L);
    const double f = L - target;
    if (prev_b >= 0 && ((prev_f <= 0 && f >= 0) || (prev_f >= 0 && f <= 0))) {
      double lo = prev_b, hi = b, flo = prev_f;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        bool okm;
        const double am = a_of(mid, okm);
        if (!okm) break;
        const double fm = hopf_total_length(am, mid, n) - target;
        if ((fm <= 0) == (flo <= 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      const double bs = 0.5 * (lo + hi);
      bool oks;
      const double as = a_of(bs, oks);
      if (oks && std::abs(hopf_total_length(as, bs, n) - target) < 1e-9 &&
          std::abs(hopf_total_area(as, bs) - 4 * kPi * t1) < 1e-9)
        return make_hopf_map(tau, as, bs, n, shortness);
    }
    prev_b = b, prev_f = f;
  }
  std::ostringstream os;
  os << "no Hopf curve with n = " << n << " for this modulus";
  if (lmax > lmin) os << "; achievable tau_i in [" << lmin / (4 * kPi) << ", " << lmax / (4 * kPi) << "]";
  throw Error(ErrorCode::Infeasible, os.str());
}

HopfBanchoffMap solve_hopf_params_auto(Modulus tau, double shortness, int n_max) {
  for (int n = 1; n <= n_max; ++n) {
    try {
      return solve_hopf_params(tau, n, shortness);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible) throw;
    }
  }
  throw Error(ErrorCode::Infeasible, "no Hopf curve found up to the maximal frequency");
}

Eigen::Vector4d hopf_preimage(const HopfBanchoffMap& m, double u, double v) {
  const double th = hopf_theta_of_length(m, 2 * u);
  const double A = hopf_curve(m, th).A_of_theta;
  const double psi = v - A / 2, ph = phi_of(m, th);
  const double s = std::sin(ph / 2), c = std::cos(ph / 2);
  return {s * std::cos(th + psi), s * std::sin(th + psi), c * std::cos(psi), c * std::sin(psi)};
}

Vec3 hopf_map_eval(const HopfBanchoffMap& m, double u, double v) {
  const auto p = hopf_preimage(m, u, v);
  if (1 + p[3] < 1e-12) throw Error(ErrorCode::Domain, "point maps to the stereographic pole");
  return m.scale * Vec3(p[0], p[1], p[2]) / (1 + p[3]);
}

Vec3 hopf_torus_eval(const HopfBanchoffMap& m, double x, double y) {
  return hopf_map_eval(m, 2 * kPi * y, 2 * kPi * x);
}

double hopf_max_stretch(const HopfBanchoffMap& m) {
  // conformal factor 1/(1 + t) with t >= -cos(phi_min / 2)
  return 2 * kPi / (1 - std::cos((m.a - m.b) / 2));
}

Eigen::Vector3d hopf_projection(const Eigen::Vector4d& p) {
  const double x = p[0], y = p[1], z = p[2], t = p[3];
  return {2 * x * z + 2 * y * t, 2 * x * t - 2 * y * z, x * x + y * y - z * z - t * t};
}

}  // namespace flattori
