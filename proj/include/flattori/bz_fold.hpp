#pragma once

#include "flattori/common.hpp"

#include <string>

namespace flattori {

// T: intrinsic triangle (planar chart), t: base triangle in space, normal: prism direction.
struct TrianglePair {
  std::array<Vec2, 3> T;
  std::array<Vec3, 3> t;
  Vec3 normal = Vec3::UnitZ();
};

struct PairCheck {
  bool ok = false;
  std::string violated;  // first failing condition, empty when ok
  double margin = 0;     // smallest slack over all conditions (negative when failing)
};

PairCheck check_pair(const TrianglePair& pair);

// Local vertex ids of a folded triangle: 0..2 base corners a_i, 3..5 wedge apexes m_01, m_12, m_20,
// 6 the lifted circumcenter, then the 2 * pleats[k] crease points of side 0, side 1, side 2 in order.
// Each side has 2 (2 pleats + 1) faces.
struct FoldResult {
  GeometricMesh mesh;  // chart = the intrinsic triangle cut along the creases
  std::array<std::array<Vec3, 3>, 3> boundary_polylines;  // a_i, m_ij, a_j per side
  std::array<double, 3> tilt{};
  std::array<int, 3> pleats{};
  double residual = 0;  // distance from the twice reflected apex to its target
};

// Angle (about the side axis, measured from the inward horizontal) range of the wedge apex for
// which side k folds with the given margin: (lo, hi); empty when lo >= hi.
std::pair<double, double> wedge_angle_range(const TrianglePair& pair, int side, double margin = 1e-3);

FoldResult fold_subtriangle(const TrianglePair& pair, int side, double tilt = 0);
FoldResult fold_triangle(const TrianglePair& pair, const std::array<double, 3>& tilts = {0, 0, 0});

enum class BzMethod { Auto, Rect, Hopf };

struct BzOptions {
  int n_subdiv = 8;                 // initial lattice resolution, doubled until every pair folds
  long face_budget = 10'000'000;    // on the output face count
  double shortness = 0.9;
  BzMethod method = BzMethod::Auto;
};

struct BzResult {
  GeometricMesh mesh;
  int lattice_n = 0;
  int base_faces = 0;
  BzMethod method = BzMethod::Auto;
  int hopf_n = 0;
  double min_margin = 0;
};

BzResult assemble_bz_torus(Modulus tau, const BzOptions& opt = {});

}  // namespace flattori
