#pragma once

#include "flattori/common.hpp"

#include <functional>
#include <memory>

namespace flattori {

// Conformal torus of revolution for T_{i tau_i}: (u, v) in R/Z x R/tau_i Z.
struct RectConformalMap {
  double tau_i = 1;
  double scale = 1;  // applied to the raw map
  int k = 1;
  double r = 1;
  double R = 0;  // r * sqrt(tau_i^2 k^2 + 1)
};

RectConformalMap make_rect_map(double tau_i, double shortness = 0.9, int k = 1);
double rect_alpha(const RectConformalMap& m, double u);  // continuous, alpha(u + 1) = alpha(u) + k
Vec3 rect_map_eval(const RectConformalMap& m, double u, double v);
// Largest conformal factor of the raw map (before scale).
double rect_max_stretch(const RectConformalMap& m);

double bessel_j0(double b);

// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

struct CurveGeometry {
  double theta = 0, L_of_theta = 0, A_of_theta = 0;
};

// Hopf torus over the spherical curve with polar angle phi(theta) = a + b sin(n theta).
struct HopfBanchoffMap {
  Modulus tau;
  double a = 0, b = 0;
  int n = 1;
  double scale = 1;
  std::shared_ptr<const struct HopfTables> tables;  // cumulative L and A on a fine grid
};

HopfBanchoffMap make_hopf_map(Modulus tau, double a, double b, int n, double shortness = 0.9);
double hopf_total_length(double a, double b, int n);  // L(2 pi)
double hopf_total_area(double a, double b);           // A(2 pi)
CurveGeometry hopf_curve(const HopfBanchoffMap& m, double theta);
double hopf_theta_of_length(const HopfBanchoffMap& m, double L);

// Requires 0 <= tau_1 <= 1. Infeasible when no (a, b) exists for this n.
HopfBanchoffMap solve_hopf_params(Modulus tau, int n, double shortness = 0.9);
// Smallest n in [1, n_max] for which the solver succeeds.
HopfBanchoffMap solve_hopf_params_auto(Modulus tau, double shortness = 0.9, int n_max = 200);

// Point of S^3 before stereographic projection, Banchoff coordinates (u, v).
Eigen::Vector4d hopf_preimage(const HopfBanchoffMap& m, double u, double v);
// Banchoff coordinates; lattice 2 pi i (Z + Z conj(tau)). Includes scale.
Vec3 hopf_map_eval(const HopfBanchoffMap& m, double u, double v);
// Chart of T_tau (lattice Z + Z tau): (u, v) = 2 pi (y, x).
Vec3 hopf_torus_eval(const HopfBanchoffMap& m, double x, double y);
// Bound on the conformal factor of hopf_torus_eval before scale.
double hopf_max_stretch(const HopfBanchoffMap& m);

Eigen::Vector3d hopf_projection(const Eigen::Vector4d& p);

}  // namespace flattori
