#pragma once

#include "flattori/common.hpp"

namespace flattori {

struct DiplotorusParams {
  int n = 0, d = 0;
  double a = 0, h = 0;
};

// Throws Domain naming the first violated embeddability inequality.
void validate_diplotorus(const DiplotorusParams& p);

// Vertices A_0..A_{n-1} then B_0..B_{n-1}; interior ploid faces first (2n), then exterior (2n).
// Exterior faces run opposite to interior ones so the torus is coherently oriented;
// all faces are then flipped so developed charts match the sign of modulus_formula.
GeometricMesh build_diplotorus(const DiplotorusParams& p);

Modulus modulus_formula(const DiplotorusParams& p);

// h = 0 boundary point of the family's moduli region.
Modulus diplotorus_floor(int n, int d, double a);

// Inverse of modulus_formula: bisection on a (tau_1 is monotone in a on the legal
// interval), then on h. Throws Infeasible when tau is outside the family's region.
DiplotorusParams solve_params(int n, int d, Modulus tau);

}  // namespace flattori
