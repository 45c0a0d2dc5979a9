#include "flattori/diplotorus.hpp"

#include <cmath>
#include <sstream>

namespace flattori {

void validate_diplotorus(const DiplotorusParams& p) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::Domain, "diplotorus parameters: " + m); };
  if (!(p.h > 0)) fail("h > 0 violated");
  if (!(p.n > 4)) fail("n > 4 violated");
  if (!(2 <= std::abs(p.d) && std::abs(p.d) < p.n - 2)) fail("2 <= |d| < n-2 violated");
  if (p.d > 0 && !(p.d + 1 < p.a && p.a < p.n - 1)) fail("d+1 < a < n-1 violated");
  if (p.d < 0 && !(1 - p.n < p.a && p.a < p.d - 1)) fail("1-n < a < d-1 violated");
}

GeometricMesh build_diplotorus(const DiplotorusParams& p) {
  validate_diplotorus(p);
  const int n = p.n;
  GeometricMesh m;
  m.base.vertex_count = 2 * n;
  m.pos.resize(2 * n);
  for (int k = 0; k < n; ++k) {
    const double ta = 2 * kPi * k / n, tb = kPi * (p.a + 1 + 2 * k) / n;
    m.pos[k] = Vec3(std::cos(ta), std::sin(ta), 0);
    m.pos[n + k] = Vec3(std::cos(tb), std::sin(tb), p.h);
  }
  auto A = [n](int k) { return ((k % n) + n) % n; };
  auto B = [n](int k) { return n + ((k % n) + n) % n; };
  for (int k = 0; k < n; ++k) m.base.tris.push_back({A(k), A(k + 1), B(k)});
  for (int k = 0; k < n; ++k) m.base.tris.push_back({B(k), A(k + 1), B(k + 1)});
  for (int k = 0; k < n; ++k) m.base.tris.push_back({A(k + 1), A(k), B(k - p.d)});
  for (int k = 0; k < n; ++k) m.base.tris.push_back({B(k + 1 - p.d), A(k + 1), B(k - p.d)});
  // orientation whose counterclockwise charts reproduce the sign of tau_1 in the closed form
  for (auto& t : m.base.tris) std::swap(t[1], t[2]);
  return m;
}

namespace {
double tau1(int n, int d, double a) {
  return double(d) / n - std::cos((a - d) * kPi / n) * std::sin(d * kPi / n) / (n * std::sin(kPi / n));
}
double taui(int n, int d, double a, double h) {
  const double s = kPi / n;
  const double u = std::sin((a + 1) / 2 * s) * std::sin((a - 1) / 2 * s);
  const double v = std::sin((a - 2 * d + 1) / 2 * s) * std::sin((a - 2 * d - 1) / 2 * s);
  return (std::sqrt(h * h + 4 * u * u) + std::sqrt(h * h + 4 * v * v)) / (2 * n * std::sin(s));
}
}  // namespace

Modulus modulus_formula(const DiplotorusParams& p) {
  validate_diplotorus(p);
  return {tau1(p.n, p.d, p.a), taui(p.n, p.d, p.a, p.h)};
}

Modulus diplotorus_floor(int n, int d, double a) { return {tau1(n, d, a), taui(n, d, a, 0)}; }

DiplotorusParams solve_params(int n, int d, Modulus tau) {
  validate_diplotorus({n, d, d > 0 ? d + 1.5 : d - 1.5, 1});
  double lo = d > 0 ? d + 1 : 1 - n, hi = d > 0 ? n - 1 : d - 1;
  // tau_1 is increasing in a on the legal interval (cos of an angle in (0, pi) times a
  // fixed-sign factor); confirm on a grid before trusting bisection
  {
    double prev = tau1(n, d, lo);
    for (int i = 1; i <= 256; ++i) {
      const double cur = tau1(n, d, lo + (hi - lo) * i / 256);
      if (cur < prev) throw Error(ErrorCode::Internal, "solve_params: tau_1 not monotone in a");
      prev = cur;
    }
  }
  const double t_lo = tau1(n, d, lo), t_hi = tau1(n, d, hi);
  if (!(tau.real() > t_lo && tau.real() < t_hi)) {
    std::ostringstream os;
    os << "solve_params: Re tau = " << tau.real() << " outside (" << t_lo << ", " << t_hi << ") for n=" << n
       << ", d=" << d;
    throw Error(ErrorCode::Infeasible, os.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (tau1(n, d, mid) < tau.real() ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  const double floor_im = taui(n, d, a, 0);
  if (!(tau.imag() > floor_im)) {
    std::ostringstream os;
    os << "solve_params: Im tau = " << tau.imag() << " not above the family floor " << floor_im << " at a=" << a;
    throw Error(ErrorCode::Infeasible, os.str());
  }
  double hlo = 0, hhi = 1;
  while (taui(n, d, a, hhi) < tau.imag()) hhi *= 2;
  for (int it = 0; it < 200 && hhi - hlo > 1e-16 * hhi; ++it) {
    const double mid = 0.5 * (hlo + hhi);
    (taui(n, d, a, mid) < tau.imag() ? hlo : hhi) = mid;
  }
  DiplotorusParams p{n, d, a, 0.5 * (hlo + hhi)};
  validate_diplotorus(p);
  return p;
}

}  // namespace flattori
