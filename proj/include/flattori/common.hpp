#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace flattori {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Modulus = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorCode {
  Ok = 0,
  Domain,
  Infeasible,
  Census,
  NonManifold,
  ConeAngle,
  Budget,
  FoldSearch,
  Coverage,
  Io,
  Usage,
  Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Closed torus triangulation; loops and parallel edges are allowed.
struct Triangulation {
  int vertex_count = 0;
  std::vector<std::array<int, 3>> tris;
  // twin[f][i] = 3*g + j pairs half-edge i of face f with half-edge j of face g.
  // Empty means "derive from vertex pairs" (fails if parallel edges make that ambiguous).
  std::vector<std::array<int, 3>> twin;
};

// Fills t.twin from vertex pairs when it is empty; throws NonManifold on ambiguity.
void ensure_twins(Triangulation& t);

// Per-face edge lengths: len[f][i] is the length of edge (tris[f][i], tris[f][(i+1)%3]).
struct MetricTriangulation {
  Triangulation base;
  std::vector<std::array<double, 3>> len;
};

// Positions in E^3 plus, optionally, the intrinsic chart triangle of every face
// (the reference flat metric the realization must reproduce).
struct GeometricMesh {
  Triangulation base;
  std::vector<Vec3> pos;
  std::vector<std::array<Vec2, 3>> chart;
};

MetricTriangulation induced_metric(const GeometricMesh& m);
MetricTriangulation chart_metric(const GeometricMesh& m);

}  // namespace flattori
