#pragma once

#include "flattori/common.hpp"

#include <array>

namespace flattori {

inline constexpr double kRib = 1.0 / 3.0;

// Threshold cutting angle of a bend at angle phi.
double lambda0(double phi);

// 3 arcsin(x/2) - arcsin(x); positive on (0, 1) iff the folded bend triangles stay in their quadrant.
double bend_margin_function(double x);

// Prism cross section: center c, columns e1 (towards vertex 0), e2, e3 (axis), right-handed.
struct Frame {
  Vec3 c = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 e1() const { return R.col(0); }
  Vec3 e2() const { return R.col(1); }
  Vec3 e3() const { return R.col(2); }
  Vec3 vertex(int j, double rib = kRib) const;
};

struct BendSpec {
  double phi = 0, lambda = 0, rib = kRib;
};
struct GasketSpec {
  double alpha = 0, h = 0, rib = kRib;
};

// A section between two orthogonal cross sections. Local vertex ids: 0..2 entry ring,
// 3..5 exit ring, then interior vertices. chart holds every face in the unrolled
// prism (x around the perimeter, vertex 0 of the entry ring at the origin, y along the axis).
struct SectionMesh {
  GeometricMesh mesh;
  Frame exit;
  double length = 0;  // intrinsic length
  double shift = 0;   // x offset of exit vertex 0 in the unrolled chart
};

// The bend turns the axis by phi towards vertex 0 of the entry ring.
SectionMesh build_bend(const BendSpec& spec, const Frame& entry = {});
SectionMesh build_gasket(const GasketSpec& spec, const Frame& entry = {});

double gasket_length(double alpha, double h);
double gasket_shift(double alpha);  // for rib 1/3

double lhuillier_theta0(double theta);
// Area of the equilateral spherical triangle with side theta0.
double lhuillier_area(double theta0);

enum class SectionKind { Gasket, Bend };
struct SectionSpec {
  SectionKind kind = SectionKind::Gasket;
  double angle = 0;   // gasket turn or bend angle
  double param = 0;   // gasket height or bend cutting angle
};

struct TwistPlan {
  double theta = 0, theta0 = 0, h = 0, h_prime = 0, phi = 0, e_twist = 0;
  std::array<int, 6> branch{};         // 1 = gasket pair turned the other way round
  std::array<double, 6> pair_turns{};  // total turn of each gasket pair
  std::vector<SectionSpec> sections;   // (g^2 b)^5 g^2
  double intrinsic_length = 0;
  double shift = 0;  // total chart shift, circumference 1
};

struct TwistResult {
  TwistPlan plan;
  std::vector<Frame> frames;  // frame before every section, plus the exit frame
  double closure_residual = 0;
};

// Solves the two return bends and the special gasket height. Throws Infeasible if a
// required pair turn is illegal under the chosen branches.
TwistResult plan_helical_twist(double theta, double h, std::array<int, 6> branch = {});

// Chains section meshes starting from an initial frame; the chain is open.
struct ChainMesh {
  GeometricMesh mesh;
  std::vector<Frame> frames;
  double length = 0, shift = 0;
};
ChainMesh build_chain(const std::vector<SectionSpec>& sections, const Frame& entry, bool close_loop);

struct TwistMesh {
  ChainMesh chain;
  TwistPlan plan;
  double rotation = 0;  // measured rotation of the final section before the last gasket pair
};
TwistMesh build_helical_twist(double theta, double h, std::array<int, 6> branch = {});

struct LongTorusOptions {
  double h = 0.01;
  bool override_length_check = false;
};

struct LongTorus {
  GeometricMesh mesh;  // closed, 135 vertices, 270 faces, chart = intrinsic layout
  TwistPlan twist;
  bool mirror = false;
  double vertical_prism = 0, horizontal_prism = 0;
  double intrinsic_length = 0;
  Modulus realized;  // shift + i * length of the built (pre-mirror) torus
  std::vector<SectionSpec> sections;
};

LongTorus assemble_long_torus(Modulus tau, const LongTorusOptions& opt = {});

// Independent combinatorial description: sections (g^2 b)^5 g^2 (b g)^3 b as a closed
// tube; ring k uses vertices 3k..3k+2, bend interiors follow in section order.
Triangulation long_torus_layout();
std::vector<SectionKind> long_torus_pattern();

// Upper bound on the rigid length for gasket height h.
double long_torus_length_bound(double h);

}  // namespace flattori
