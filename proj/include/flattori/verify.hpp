#pragma once

#include "flattori/common.hpp"
#include "flattori/flat_mesh.hpp"

#include <optional>
#include <utility>

namespace flattori {

// Max relative edge-length error of the mesh against a reference metric on the same complex.
double check_isometry(const GeometricMesh& mesh, const MetricTriangulation& reference);

// Max |angle sum - 2pi| over vertices; throws Domain on a triangle-inequality violation.
double check_flatness(const MetricTriangulation& mt);

struct IntersectionOptions {
  double rel_tol = 1e-12;  // relative to the bounding-box diagonal
};

// Offending face pairs (i < j), sorted. Faces sharing an edge are only reported
// when they fold back onto each other; faces sharing a vertex only when they
// meet away from it.
std::vector<std::pair<int, int>> self_intersection(const GeometricMesh& mesh, IntersectionOptions opt = {});

Modulus extract_modulus(const GeometricMesh& mesh);
Modulus extract_modulus(const MetricTriangulation& mt);

struct VerificationReport {
  double isometry_max_rel_error = 0;
  double flatness_max_defect = 0;
  std::vector<std::pair<int, int>> self_intersections;
  EulerAudit euler;
  std::optional<Modulus> extracted_modulus;
};

// Runs every oracle. The reference defaults to the mesh chart when present.
VerificationReport verify_mesh(const GeometricMesh& mesh, const MetricTriangulation* reference = nullptr);

}  // namespace flattori
