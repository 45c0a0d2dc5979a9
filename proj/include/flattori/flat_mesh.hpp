#pragma once

#include "flattori/common.hpp"

namespace flattori {

// Planar lift of every face: the intrinsic chart of a flat torus.
struct FlatChart {
  std::vector<std::array<Vec2, 3>> face_xy;
  Vec2 w1, w2;  // lattice translations identifying the chart
};

struct LatticeTriangulation {
  MetricTriangulation metric;
  FlatChart chart;
  std::vector<Vec2> vertex_xy;  // representative lift of every vertex
  int a = 0, b = 0;             // lattice point p_{a,b} matched to tau
};

LatticeTriangulation lattice_triangulation(Modulus tau, int n);

MetricTriangulation uniform_subdivide(const MetricTriangulation& mt, int n);

struct Development {
  std::vector<std::array<Vec2, 3>> face_xy;  // isometric planar copy of every face
  std::vector<Vec2> translations;            // all nonzero gluing translations found
  Vec2 w1{0, 0}, w2{0, 0};                   // reduced basis of the holonomy lattice
  bool has_lattice = false;
};

// Lays out faces breadth-first from face 0 and reads off the gluing translations.
Development develop(const MetricTriangulation& mt, double flat_tol = 1e-8);

struct EulerAudit {
  int V = 0, E = 0, F = 0, chi = 0;
  bool closed = false, orientable = false, simplicial = false;
};

EulerAudit euler_audit(const Triangulation& t);

double corner_angle(double opposite, double b, double c);
std::vector<double> angle_sums(const MetricTriangulation& mt);

// Reduced basis of the lattice generated by a set of planar vectors.
bool lattice_basis(const std::vector<Vec2>& gens, Vec2& w1, Vec2& w2, double rel_tol = 1e-7);

}  // namespace flattori
