#pragma once

#include "flattori/common.hpp"
#include "flattori/moduli.hpp"

#include <gmpxx.h>

#include <map>
#include <string>

namespace flattori {

struct QPoint {
  mpq_class x, y;
};

// One period of the strip triangulation T_{19,d} on R x [-1, 1].
struct StripLayout {
  int d = 0;
  std::map<std::string, QPoint> points;             // A_k, B_k, C_k for k = 0..18
  std::vector<std::array<std::string, 3>> labels;   // canonical labels (index mod 19)
  std::vector<std::array<QPoint, 3>> triangles;     // lifted corners, same order as labels
  std::vector<std::pair<QPoint, QPoint>> segments;  // distinct edges, lifted
  QPoint period{19, 0}, height_identification{0, 2};
};

StripLayout strip_layout(int d);

// Abstract quotient of a strip layout (C_k glued to A_k, index mod 19).
Triangulation strip_quotient(const StripLayout& s);

enum class VertexOrigin { Original, Intersection };

struct OverlayVertex {
  QPoint p;  // representative in the fundamental domain
  VertexOrigin origin = VertexOrigin::Original;
  std::string label;  // short label (A_k / B_k), long id as "L<id>", both joined by '='
};

struct Overlay {
  QPoint period_x, period_y;
  std::vector<OverlayVertex> vertices;
  std::vector<std::vector<int>> faces;  // polygonal faces of the arrangement, counterclockwise
  Triangulation triangulated;           // explicit twins
  std::vector<std::array<QPoint, 3>> tri_xy;  // lifted corners of every triangle
};

struct ShortCensus {
  int intersections_per_period = 0;
  int intersection_vertices = 0;
  int vertices = 0;
  int triangles = 0;
  int chi = 0;
};

Overlay overlay_short(ShortCensus* census = nullptr);

// Counts of the merged overlay. The first five are the terms of the vertex sum
// V_cap + 3 V_ext + V_long + 35 V_c + V_d; the remaining fields are what the
// layout actually produces, so the difference can be accounted for.
struct MergedCensus {
  int E_c = 0;                  // long edges crossing the central strip, one period
  std::array<int, 3> V_ext{};   // new vertices on each rib inside the prism carrying the B-C band
  int V_long = 0;
  int V_c = 0;                  // long-edge incidences of each central short edge (all equal, else -1)
  int V_d = 0;                  // new vertices on the two diagonals leaving the central strip
  int V_cap = 0;                // short-short crossing vertices
  int central_edges = 0;        // short edges strictly inside the central strip
  int V_c_new = 0;              // new vertices per central short edge (all equal, else -1)
  int short_originals = 0;      // A_k, B_k not coinciding with a long vertex
  int ext_crossings = 0;        // sum of V_ext
  int vertices = 0, triangles = 0, chi = 0;
  int reference_sum() const { return V_cap + 3 * 41 + V_long + 35 * V_c + V_d; }
};

// Per merged face: the coarse face containing it and the barycentric coordinates of
// its corners with respect to the coarse face's vertices (ids in the coarse complex).
struct CellMap {
  std::vector<int> face;
  std::vector<std::array<int, 3>> ids;
  std::vector<std::array<Vec3, 3>> bary;  // bary[f][corner] weights of ids[f]
};

struct UniversalTriangulation {
  Overlay overlay;
  MergedCensus census;
  CellMap long_cells;                // into long_torus_layout()
  std::array<CellMap, 3> short_cells;  // into build_diplotorus({19, d}) for d = 2, 7, 13
  Triangulation long_layout;
};

// Built once and cached; every realization uses this exact complex.
const UniversalTriangulation& merged_overlay();

struct UniversalRealization {
  GeometricMesh mesh;  // base is merged_overlay().overlay.triangulated
  RealizationChoice choice;
  Modulus coarse_modulus;  // modulus of the coarse torus that was mapped through
};

UniversalRealization realize_universal(Modulus tau);

}  // namespace flattori
