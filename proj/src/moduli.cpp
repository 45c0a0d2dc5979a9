#include "flattori/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace flattori {

UnimodularMap UnimodularMap::operator*(const UnimodularMap& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Modulus apply_mobius(const UnimodularMap& g, Modulus tau) {
  if (!(tau.imag() > 0)) throw Error(ErrorCode::Domain, "apply_mobius: modulus must lie in the upper half-plane");
  const Modulus num = double(g.a) * tau + double(g.b);
  const Modulus den = double(g.c) * tau + double(g.d);
  return num / den;
}

namespace {

constexpr double kTieTol = 1e-13;

}  // namespace

Reduction reduce_to_fundamental_domain(Modulus tau) {
  if (!(tau.imag() > 0)) throw Error(ErrorCode::Domain, "reduce: modulus must lie in the upper half-plane");
  UnimodularMap g;
  Modulus z = tau;
  for (int iter = 0; iter < 10000; ++iter) {
    const double shift = std::floor(z.real() + 0.5);
    if (shift != 0) {
      z -= shift;
      g = UnimodularMap{1, -static_cast<long long>(shift), 0, 1} * g;
    }
    if (std::norm(z) < 1.0 - kTieTol) {
      z = -1.0 / z;
      g = UnimodularMap{0, -1, 1, 0} * g;
      continue;
    }
    break;
  }
  // Boundary ties: prefer the representative with nonnegative real part.
  if (z.real() < -0.5 + kTieTol) {
    z += 1.0;
    g = UnimodularMap{1, 1, 0, 1} * g;
  } else if (z.real() < 0 && std::abs(std::norm(z) - 1.0) <= kTieTol) {
    z = -1.0 / z;
    g = UnimodularMap{0, -1, 1, 0} * g;
  }
  // Recompute from the integer map to avoid accumulated drift.
  return {apply_mobius(g, tau), g};
}

ModulusClass classify(Modulus tau) {
  const double tol = 1e-9;
  if (!(tau.imag() > 0) || std::abs(tau.real()) > 0.5 + tol || std::norm(tau) < 1.0 - tol)
    throw Error(ErrorCode::Domain, "classify: modulus is not reduced");
  return tau.imag() >= kLongThreshold ? ModulusClass::Long : ModulusClass::Short;
}

// ---------------------------------------------------------------------------
// Regions M_{19,d}

namespace {

const double s19 = std::sin(kPi / 19);
const double cot19 = std::cos(kPi / 19) / s19;

Modulus line_point(int d, Modulus dir, double t) {
  return Modulus(d, cot19) / 19.0 - dir * t / (19.0 * s19);
}

Modulus piece_left(const CurvePiece& p) {
  if (auto r = std::get_if<VerticalRay>(&p)) return r->base;
  if (auto s = std::get_if<Segment>(&p)) return s->p0;
  const auto& a = std::get<Arc>(p);
  return a.center + a.radius * std::polar(1.0, a.theta0);
}

Modulus piece_right(const CurvePiece& p) {
  if (auto r = std::get_if<VerticalRay>(&p)) return r->base;
  if (auto s = std::get_if<Segment>(&p)) return s->p1;
  const auto& a = std::get<Arc>(p);
  return a.center + a.radius * std::polar(1.0, a.theta1);
}

}  // namespace

double Region::left() const { return piece_left(boundary.front()).real(); }
double Region::right() const { return piece_right(boundary.back()).real(); }

double Region::lower_at(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < boundary.size(); ++i) {
    const auto& p = boundary[i];
    const double x0 = piece_left(p).real(), x1 = piece_right(p).real();
    if (x < std::min(x0, x1) - 1e-15 || x > std::max(x0, x1) + 1e-15) continue;
    double y;
    if (auto s = std::get_if<Segment>(&p)) {
      const double u = (x1 == x0) ? 0.0 : (x - x0) / (x1 - x0);
      y = s->p0.imag() + u * (s->p1.imag() - s->p0.imag());
    } else {
      const auto& a = std::get<Arc>(p);
      const double c = std::clamp((x - a.center.real()) / a.radius, -1.0, 1.0);
      const double mid = 0.5 * (a.theta0 + a.theta1);
      const double sgn = std::sin(mid) >= 0 ? 1.0 : -1.0;
      y = a.center.imag() + sgn * a.radius * std::sqrt(1 - c * c);
    }
    best = std::min(best, y);
  }
  return best;
}

bool Region::contains(Modulus z, double tol) const {
  if (z.real() < left() - tol || z.real() > right() + tol) return false;
  const double x = std::clamp(z.real(), left(), right());
  return z.imag() >= lower_at(x) - tol;
}

double Region::margin(Modulus z) const {
  const double x = std::clamp(z.real(), left(), right());
  return std::min({z.real() - left(), right() - z.real(), z.imag() - lower_at(x)});
}

Region region_19d(int d) {
  Region r;
  r.d = d;
  if (d == 2) {
    const Modulus z2 = Modulus(2 - std::sin(2 * kPi / 19) * cot19, std::sin(2 * kPi / 19)) / 19.0;
    const double R = std::sin(2 * kPi / 19) / (19 * s19);
    const Modulus dir = std::polar(1.0, 15 * kPi / 38);
    const Modulus w2 = line_point(2, dir, std::cos(16 * kPi / 19));
    r.boundary.push_back(VerticalRay{z2});
    // 2/19 - R e^{-it} = 2/19 + R e^{i(pi - t)}, t from pi/19 to 3pi/19.
    r.boundary.push_back(Arc{Modulus(2.0 / 19, 0), R, kPi - kPi / 19, kPi - 3 * kPi / 19});
    r.boundary.push_back(Segment{line_point(2, dir, std::cos(3 * kPi / 19)), w2});
    r.boundary.push_back(VerticalRay{w2});
  } else if (d == 7) {
    const Modulus z7 = Modulus(7 - std::sin(7 * kPi / 19) * cot19, cot19 * (1 - std::cos(7 * kPi / 19))) / 19.0;
    const double R = std::sin(7 * kPi / 19) / (19 * s19);
    const Modulus dir = std::polar(1.0, 5 * kPi / 38);
    // The right endpoint parameter is cos(11 pi/19), the end of the segment's domain.
    const Modulus w7 = line_point(7, dir, std::cos(11 * kPi / 19));
    r.boundary.push_back(VerticalRay{z7});
    r.boundary.push_back(Segment{line_point(7, dir, std::cos(kPi / 19)), line_point(7, dir, std::cos(6 * kPi / 19))});
    r.boundary.push_back(Arc{Modulus(7.0 / 19, 0), R, kPi - 6 * kPi / 19, kPi - 8 * kPi / 19});
    r.boundary.push_back(Segment{line_point(7, dir, std::cos(8 * kPi / 19)), w7});
    r.boundary.push_back(VerticalRay{w7});
  } else if (d == 13) {
    const Modulus z13 = Modulus(13 - std::sin(13 * kPi / 19) * cot19, cot19 * (1 - std::cos(13 * kPi / 19))) / 19.0;
    const Modulus dir = std::polar(1.0, -7 * kPi / 38);
    const Modulus w13 = line_point(13, dir, std::cos(5 * kPi / 19));
    r.boundary.push_back(VerticalRay{z13});
    r.boundary.push_back(Segment{line_point(13, dir, std::cos(kPi / 19)), w13});
    r.boundary.push_back(VerticalRay{w13});
  } else {
    throw Error(ErrorCode::Domain, "region_19d: unsupported family d=" + std::to_string(d));
  }
  return r;
}

RealizationChoice select_realization(Modulus tau) {
  RealizationChoice ch;
  const Reduction red = reduce_to_fundamental_domain(tau);
  ch.reduction = red.map;
  Modulus z = red.tau;
  if (z.real() < 0) {
    ch.mirror = true;
    z = -std::conj(z);
  }
  ch.reduced = z;
  if (z.imag() >= kLongThreshold) {
    ch.kind = RealizationKind::ZalgallerLong;
    ch.target = z;
    return ch;
  }
  ch.kind = RealizationKind::Diplotorus;
  ch.n = 19;
  const long long delta = z.imag() >= 25 ? 5 : (z.imag() >= 12 ? 3 : 1);
  ch.gamma = UnimodularMap::g_delta(delta);
  ch.target = apply_mobius(ch.gamma, z);
  double best = -std::numeric_limits<double>::infinity();
  for (int d : {2, 7, 13}) {
    const Region reg = region_19d(d);
    if (!reg.contains(ch.target)) continue;
    const double m = reg.margin(ch.target);
    if (m > best) {
      best = m;
      ch.d = d;
    }
  }
  if (ch.d == 0) {
    std::ostringstream os;
    os.precision(17);
    os << "select_realization: g_" << delta << "(" << z << ") = " << ch.target << " lies in no region M_{19,d}";
    throw Error(ErrorCode::Coverage, os.str());
  }
  return ch;
}

// ---------------------------------------------------------------------------
// Certification of the region inequalities

namespace {

const double c19 = std::cos(kPi / 19);
const double c2_19 = std::cos(2 * kPi / 19);
const double s2_19 = std::sin(2 * kPi / 19);
const double c5_38 = std::cos(5 * kPi / 38);
const double sn5_38 = std::sin(5 * kPi / 38);
const double k21 = s2_19 / s19;  // sin(2pi/19)/sin(pi/19)

double sqrt1m(double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }

// Quadratic in t obtained by expanding |beta_{7,1}(t) - 1/2|^2 <= 1/4 directly.
double f7_expanded(double t) {
  return t * t / (361 * s19 * s19) + (5 * c5_38 / (361 * s19) - 2 * c19 * sn5_38 / (361 * s19 * s19)) * t - 84.0 / 361 +
         c19 * c19 / (361 * s19 * s19);
}

Modulus beta21(double t) { return 2.0 / 19 - k21 / 19 * std::polar(1.0, -t); }
Modulus beta22(double t) { return line_point(2, std::polar(1.0, 15 * kPi / 38), t); }
Modulus beta71(double t) { return line_point(7, std::polar(1.0, 5 * kPi / 38), t); }
Modulus beta72(double t) { return 7.0 / 19 - std::sin(7 * kPi / 19) / (19 * s19) * std::polar(1.0, -t); }

struct Frac {
  long long num, den;
};

// g_delta(x + i y) with x = xn/2, y integer, as an exact pair of fractions.
std::pair<Frac, Frac> g_exact(long long delta, long long xn, long long y) {
  // 1/(delta - x - iy) = (delta - x + iy) / ((delta - x)^2 + y^2); scale by 2.
  const long long re2 = 2 * delta - xn;     // 2 (delta - x)
  const long long den4 = re2 * re2 + 4 * y * y;  // 4 ((delta-x)^2 + y^2)
  Frac re{2 * re2, den4}, im{4 * y, den4};
  auto norm = [](Frac f) {
    const long long g = std::gcd(f.num, f.den);
    return Frac{f.num / g, f.den / g};
  };
  return {norm(re), norm(im)};
}

}  // namespace

double appendix_f(int which, double x) {
  switch (which) {
    case 1: return 8 * x / 361 * c19 + 2 * sqrt1m(x) / 627 * c19 - (6 + 2 * c2_19) / 361;
    case 2: return k21 * x / 1805 + 18.0 / 1805 - k21 * k21 / 361;
    case 3: return 4 * k21 / 361 * x + k21 / 475 * sqrt1m(x) - 4.0 / 361 - k21 * k21 / 361;
    case 4: return -7 * k21 / 1083 * x + 26.0 / 1083 - k21 * k21 / 361;
    case 5: return 8 * c19 / 361 * x + c19 / 114 * sqrt1m(x) - (6 + 2 * c2_19) / 361;
    case 6: return 15 * k21 / 361 * x + k21 * k21 / 361 - 34.0 / 361;
    case 7:
      return c5_38 * c5_38 / (361 * s19 * s19) * x * x + 5 * c5_38 / (361 * s19) * x - 84.0 / 361 +
             (c19 * c19 + c19 * sn5_38 + sn5_38 * sn5_38) / (361 * s19 * s19);
    case 8: return 5 * c5_38 / (361 * s19) * x - 84.0 / 361 + c5_38 * c5_38 / (361 * s19 * s19);
    default: throw Error(ErrorCode::Domain, "appendix_f: index out of range");
  }
}

bool AppendixReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AppendixCheck& c) { return c.ok; });
}

AppendixReport verify_appendix_inequalities(int grid_size) {
  if (grid_size < 100) throw Error(ErrorCode::Domain, "verify_appendix_inequalities: grid_size must be >= 100");
  AppendixReport rep;

  // Every function below is linear, concave (nonnegative multiple of sqrt(1-x^2)
  // plus a linear part) or a convex quadratic, so on each grid cell the relevant
  // extremum sits at a cell endpoint: the grid values bound the whole interval.
  auto sign_check = [&](const std::string& label, auto&& f, double lo, double hi, int sign) {
    AppendixCheck c;
    c.name = label;
    double worst = sign > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    double arg = lo;
    for (int i = 0; i <= grid_size; ++i) {
      const double x = (i == grid_size) ? hi : lo + (hi - lo) * i / grid_size;
      const double v = f(x);
      if ((sign > 0 && v < worst) || (sign < 0 && v > worst)) {
        worst = v;
        arg = x;
      }
    }
    c.value = worst;
    c.ok = sign > 0 ? worst >= 0 : worst <= 0;
    std::ostringstream os;
    os.precision(6);
    os << (sign > 0 ? "min " : "max ") << worst << " at " << arg << " on [" << lo << ", " << hi << "]";
    c.detail = os.str();
    rep.checks.push_back(c);
  };

  struct Stated {
    int which;
    double lo, hi;
    int sign;
    double need_lo, need_hi;  // sub-interval the coverage argument actually uses
  };
  const Stated stated[] = {
      {1, 0.96, 1, +1, std::cos(0.283), std::cos(kPi / 19)},
      {2, 0.55, 1, +1, std::cos(3 * kPi / 19), std::cos(kPi / 19)},
      {3, 0.94, 1, +1, std::cos(0.3), std::cos(kPi / 19)},
      {4, -1, 1, +1, -1, 1},
      {5, 0.8, 1, +1, std::cos(3 * kPi / 19), std::cos(kPi / 19)},
      {6, -1, 1, -1, -1, 1},
      {7, -1, 1, -1, -1, 1},
      {8, -1, 1, -1, -1, 1},
  };
  for (const auto& s : stated) {
    auto f = [&](double x) { return appendix_f(s.which, x); };
    const std::string rel = s.sign > 0 ? ">=0" : "<=0";
    std::ostringstream lab;
    lab << "stated: f" << s.which << rel << " on [" << s.lo << "," << s.hi << "]";
    sign_check(lab.str(), f, s.lo, s.hi, s.sign);
    if (s.which == 7) {
      sign_check("needed: f7 (direct expansion) <=0 on [-1,1]", f7_expanded, -1, 1, -1);
    } else {
      std::ostringstream lab2;
      lab2.precision(5);
      lab2 << "needed: f" << s.which << rel << " on [" << s.need_lo << "," << s.need_hi << "]";
      sign_check(lab2.str(), f, s.need_lo, s.need_hi, s.sign);
    }
  }

  auto point = [&](const std::string& name, bool ok, double value) {
    std::ostringstream os;
    os.precision(10);
    os << value;
    rep.checks.push_back({name, ok, value, os.str()});
  };
  // |x - y| < 10^k with k the position of the leading digit of y.
  auto approx = [](double x, double y, int k) { return std::abs(x - y) < std::pow(10.0, k); };

  // Quadrilateral corners: images of the slice corners (1/2 + i y, i y).
  struct Corner {
    const char* name;
    long long delta, xn, y;  // x = xn / 2
    long long re_num, im_num, den;
  };
  const Corner corners[] = {
      {"A1", 5, 1, 33, 6, 44, 1479},  {"A2", 5, 0, 33, 5, 33, 1114},  {"A3", 5, 0, 25, 1, 5, 130},
      {"A4", 5, 1, 25, 18, 100, 2581}, {"B1", 3, 1, 25, 2, 20, 505},   {"B2", 3, 0, 25, 3, 25, 634},
      {"B3", 3, 0, 12, 1, 4, 51},      {"B4", 3, 1, 12, 10, 48, 601},  {"C1", 1, 1, 12, 2, 48, 577},
      {"C2", 1, 0, 12, 1, 12, 145},    {"C3", 1, 0, 1, 1, 1, 2},
  };
  for (const auto& c : corners) {
    const auto [re, im] = g_exact(c.delta, c.xn, c.y);
    const bool ok = re.num * c.den == c.re_num * re.den && im.num * c.den == c.im_num * im.den;
    point(std::string("corner ") + c.name + " exact", ok, double(re.num) / re.den);
  }
  {
    const Modulus c4 = apply_mobius(UnimodularMap::g_delta(1), std::polar(1.0, kPi / 3));
    point("corner C4 = e^{i pi/3}", std::abs(c4 - std::polar(1.0, kPi / 3)) < 1e-14, std::abs(c4));
  }

  const Region r2 = region_19d(2), r7 = region_19d(7), r13 = region_19d(13);
  const Modulus z2 = std::get<VerticalRay>(r2.boundary.front()).base;
  const Modulus z7 = std::get<VerticalRay>(r7.boundary.front()).base;
  const Modulus z13 = std::get<VerticalRay>(r13.boundary.front()).base;
  const Modulus w13 = std::get<VerticalRay>(r13.boundary.back()).base;
  const double tred = 0.283, tblue = 0.3;

  point("z2 = beta21(pi/19)", std::abs(z2 - beta21(kPi / 19)) < 1e-14, z2.real());
  point("Re z2 ~ 0.002", approx(z2.real(), 0.002, -3), z2.real());
  point("Re z2 < Re A1", z2.real() < 6.0 / 1479, z2.real());
  point("0 < pi/19 < t_red < 3pi/19", 0 < kPi / 19 && kPi / 19 < tred && tred < 3 * kPi / 19, tred);
  point("Re beta21(t_red) ~ 0.0055 > Re A2", approx(beta21(tred).real(), 0.0055, -4) && beta21(tred).real() > 5.0 / 1114,
        beta21(tred).real());
  point("Re beta21(3pi/19) ~ 0.014 > Re A3",
        approx(beta21(3 * kPi / 19).real(), 0.014, -3) && beta21(3 * kPi / 19).real() > 1.0 / 130,
        beta21(3 * kPi / 19).real());
  point("Re z2 < Re B1", z2.real() < 2.0 / 505, z2.real());
  point("0 < pi/19 < t_blue < 3pi/19", 0 < kPi / 19 && kPi / 19 < tblue && tblue < 3 * kPi / 19, tblue);
  point("Re beta21(t_blue) ~ 0.008 > Re B2", approx(beta21(tblue).real(), 0.008, -3) && beta21(tblue).real() > 3.0 / 634,
        beta21(tblue).real());
  {
    const double c1538 = std::cos(15 * kPi / 38);
    const Modulus q3 = beta22(1211 * s19 / (634 * c1538));
    const double t2 = 83 * s19 / (51 * c1538);
    const Modulus q4 = beta22(t2);
    point("Re Q3 = Re B2", std::abs(q3.real() - 3.0 / 634) < 1e-14, q3.real());
    point("Im Q3 ~ 0.02 < Im B2", approx(q3.imag(), 0.02, -2) && q3.imag() < 25.0 / 634, q3.imag());
    point("Re Q4 = Re B3", std::abs(q4.real() - 1.0 / 51) < 1e-14, q4.real());
    point("t_blue2 in [cos 16pi/19, cos 3pi/19]", t2 >= std::cos(16 * kPi / 19) && t2 <= std::cos(3 * kPi / 19), t2);
    point("Im Q4 ~ 0.06 < Im B3", approx(q4.imag(), 0.06, -2) && q4.imag() < 4.0 / 51, q4.imag());
  }
  point("Re z2 < Re C1", z2.real() < 2.0 / 577, z2.real());
  point("Re beta21(3pi/19) ~ 0.02 > Re C2",
        approx(beta21(3 * kPi / 19).real(), 0.02, -2) && beta21(3 * kPi / 19).real() > 1.0 / 145,
        beta21(3 * kPi / 19).real());
  {
    const double t27 = (-5 + c5_38 * cot19) * s19 / s2_19;
    const Modulus r27 = beta22(t27);
    point("Re R27 = Re z7", std::abs(r27.real() - z7.real()) < 1e-14, r27.real());
    point("tau27 in [cos 16pi/19, cos 3pi/19]", t27 >= std::cos(16 * kPi / 19) && t27 <= std::cos(3 * kPi / 19), t27);
    point("Im R27 ~ 0.24 > Im z7 ~ 0.18",
          approx(r27.imag(), 0.24, -2) && approx(z7.imag(), 0.18, -2) && r27.imag() > z7.imag(), r27.imag());
    const double e1 = std::norm(beta22(std::cos(3 * kPi / 19)) - 0.5);
    point("|beta22(cos 3pi/19) - 1/2|^2 ~ 0.23 < 1/4", approx(e1, 0.23, -2) && e1 < 0.25, e1);
    const double e2 = std::norm(r27 - 0.5);
    point("|R27 - 1/2|^2 ~ 0.23 < 1/4", approx(e2, 0.23, -2) && e2 < 0.25, e2);
  }
  {
    const double e = std::norm(z13 - 0.5);
    point("|z13 - 1/2|^2 ~ 0.244 < 1/4", approx(e, 0.244, -3) && e < 0.25, e);
    const double ew = std::abs(w13 - 0.5);
    point("|w13 - 1/2| ~ 0.1 < 1/4", approx(ew, 0.1, -1) && ew < 0.25, ew);
    point("Re w13 ~ 0.502 > 1/2", approx(w13.real(), 0.502, -3) && w13.real() > 0.5, w13.real());
  }
  // The closed forms must agree with the curves they were derived from.
  {
    double worst = 0;
    for (int i = 0; i <= 200; ++i) {
      const double t = std::cos(6 * kPi / 19) + (std::cos(kPi / 19) - std::cos(6 * kPi / 19)) * i / 200;
      worst = std::max(worst, std::abs(f7_expanded(t) - (std::norm(beta71(t) - 0.5) - 0.25) / 1.0));
    }
    point("f7 direct expansion matches |beta71 - 1/2|^2 - 1/4", worst < 1e-14, worst);
    double worst8 = 0;
    for (int i = 0; i <= 200; ++i) {
      const double t = 6 * kPi / 19 + 2 * kPi / 19 * i / 200;
      worst8 = std::max(worst8, std::abs(appendix_f(8, std::cos(t)) - (std::norm(beta72(t) - 0.5) - 0.25)));
    }
    point("f8 matches |beta72 - 1/2|^2 - 1/4", worst8 < 1e-14, worst8);
  }
  return rep;
}

}  // namespace flattori
