#include "doctest.h"
#include "flattori/conformal.hpp"

#include <random>

using namespace flattori;

namespace {
// singular value ratio and largest singular value of a finite-difference Jacobian
template <class F>
std::pair<double, double> jacobian_shape(F f, double x, double y) {
  const double h = 1e-6;
  Eigen::Matrix<double, 3, 2> J;
  J.col(0) = (f(x + h, y) - f(x - h, y)) / (2 * h);
  J.col(1) = (f(x, y + h) - f(x, y - h)) / (2 * h);
  const auto sv = Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(J).singularValues();
  return {sv[0] / sv[1], sv[0]};
}
}  // namespace

TEST_CASE("Bessel J0 by quadrature") {
  CHECK(bessel_j0(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-9);
  CHECK(bessel_j0(-1.3) == bessel_j0(1.3));
  CHECK(bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
}

TEST_CASE("rectangular conformal map") {
  RectConformalMap raw = make_rect_map(2.0);
  raw.scale = 1;
  const Vec3 p = rect_map_eval(raw, 0, 0);
  CHECK(p.x() == doctest::Approx(std::sqrt(5.0) + 1));
  CHECK(std::abs(p.y()) < 1e-15);
  CHECK(std::abs(p.z()) < 1e-15);
  CHECK(raw.R == doctest::Approx(std::sqrt(5.0)));
  CHECK(rect_alpha(raw, 0.7 + 1) == doctest::Approx(rect_alpha(raw, 0.7) + 1));
  CHECK_THROWS_AS(make_rect_map(0.0), Error);

  const auto m = make_rect_map(2.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double u = U(rng), v = 2 * U(rng);
    const auto [ratio, stretch] = jacobian_shape([&](double x, double y) { return rect_map_eval(m, x, y); }, u, v);
    CHECK(ratio < 1 + 1e-4);
    CHECK(stretch < 1);
    CHECK((rect_map_eval(m, u, v + 2) - rect_map_eval(m, u, v)).norm() < 1e-9);
    CHECK((rect_map_eval(m, u + 1, v) - rect_map_eval(m, u, v)).norm() < 1e-9);
  }
  // alpha is increasing
  for (double u = 0; u < 1; u += 0.01) CHECK(rect_alpha(m, u + 0.01) > rect_alpha(m, u));
}

TEST_CASE("Hopf curve special case b = 0") {
  const auto m = make_hopf_map(Modulus(0.2, 0.3), 0.9, 0.0, 3);
  const auto g = hopf_curve(m, 2 * kPi);
  CHECK(g.L_of_theta == doctest::Approx(2 * kPi * std::sin(0.9)).epsilon(1e-12));
  CHECK(g.A_of_theta == doctest::Approx(2 * kPi * (1 - std::cos(0.9))).epsilon(1e-12));
  CHECK(hopf_total_length(0.9, 0.0, 3) == doctest::Approx(2 * kPi * std::sin(0.9)).epsilon(1e-12));
}

TEST_CASE("Hopf parameters for the hexagonal torus") {
  const Modulus tau(0.5, std::sqrt(3.0) / 2);
  const auto m = solve_hopf_params_auto(tau);
  const auto g = hopf_curve(m, 2 * kPi);
  CHECK(std::abs(g.L_of_theta - 4 * kPi * tau.imag()) < 1e-9);
  CHECK(std::abs(g.A_of_theta - 4 * kPi * tau.real()) < 1e-9);
  // tau_1 = 1/2 forces J0(b) cos(a) = 0
  CHECK(std::abs(bessel_j0(m.b) * std::cos(m.a)) < 1e-9);
  CHECK(m.a - m.b > 0);
  CHECK(m.a + m.b < kPi);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const double x = U(rng), y = U(rng);
    auto f = [&](double a, double b) { return hopf_torus_eval(m, a, b); };
    const auto [ratio, stretch] = jacobian_shape(f, x, y);
    CHECK(ratio < 1 + 1e-4);
    CHECK(stretch < 1);
    CHECK((f(x + 1, y) - f(x, y)).norm() < 1e-9);
    CHECK((f(x + tau.real(), y + tau.imag()) - f(x, y)).norm() < 1e-9);
    const auto pre = hopf_preimage(m, 2 * kPi * y, 2 * kPi * x);
    CHECK(std::abs(pre.norm() - 1) < 1e-10);
    CHECK(std::abs(hopf_projection(pre).norm() - 1) < 1e-10);
  }
}

TEST_CASE("length is inverted along the Hopf curve") {
  const auto m = solve_hopf_params(Modulus(0.3, 1.2), 4);
  for (double th = 0; th < 6; th += 0.37) {
    const double L = hopf_curve(m, th).L_of_theta;
    CHECK(hopf_theta_of_length(m, L) == doctest::Approx(th).epsilon(1e-12));
  }
}

TEST_CASE("Hopf route cannot reach tau_1 in {0, 1}") {
  CHECK_THROWS_AS(solve_hopf_params(Modulus(0, 1), 9), Error);
  CHECK_THROWS_AS(solve_hopf_params(Modulus(-0.1, 1), 9), Error);
}
