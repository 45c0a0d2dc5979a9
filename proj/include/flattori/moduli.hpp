#pragma once

#include "flattori/common.hpp"

#include <optional>
#include <string>
#include <variant>

namespace flattori {

struct UnimodularMap {
  long long a = 1, b = 0, c = 0, d = 1;

  static UnimodularMap identity() { return {}; }
  static UnimodularMap g_delta(long long delta) { return {0, 1, -1, delta}; }
  UnimodularMap operator*(const UnimodularMap& o) const;
  UnimodularMap inverse() const { return {d, -b, -c, a}; }
  long long det() const { return a * d - b * c; }
  bool operator==(const UnimodularMap&) const = default;
};

Modulus apply_mobius(const UnimodularMap& g, Modulus tau);

struct Reduction {
  Modulus tau;
  UnimodularMap map;  // map applied to the input gives tau
};

Reduction reduce_to_fundamental_domain(Modulus tau);

enum class ModulusClass { Long, Short };

// Long iff Im >= 33; the input must already be reduced.
ModulusClass classify(Modulus tau);

inline constexpr double kLongThreshold = 33.0;

struct VerticalRay {
  Modulus base;
};
struct Segment {
  Modulus p0, p1;
};
// Points center + radius * e^{i theta} for theta in [theta0, theta1].
struct Arc {
  Modulus center;
  double radius;
  double theta0, theta1;
};
using CurvePiece = std::variant<VerticalRay, Segment, Arc>;

// Region above a lower boundary between two vertical rays; pieces are listed
// left to right: left ray, lower boundary pieces, right ray.
struct Region {
  int d = 0;
  std::vector<CurvePiece> boundary;

  double left() const;
  double right() const;
  // Height of the lower boundary at abscissa x (x inside [left, right]).
  double lower_at(double x) const;
  bool contains(Modulus z, double tol = 1e-10) const;
  // Signed distance-like margin: min of horizontal and vertical clearances.
  double margin(Modulus z) const;
};

Region region_19d(int d);

enum class RealizationKind { ZalgallerLong, Diplotorus };

struct RealizationChoice {
  RealizationKind kind = RealizationKind::ZalgallerLong;
  bool mirror = false;
  UnimodularMap gamma;     // g_delta applied after reduction (identity for long tori)
  UnimodularMap reduction; // reduction map applied to the input
  Modulus reduced;         // reduced, mirrored modulus (Re >= 0)
  Modulus target;          // gamma applied to reduced; the modulus actually built
  int n = 0, d = 0;
};

RealizationChoice select_realization(Modulus tau);

struct AppendixCheck {
  std::string name;
  bool ok = false;
  double value = 0;  // extremal value found or compared quantity
  std::string detail;
};

struct AppendixReport {
  std::vector<AppendixCheck> checks;
  bool all_ok() const;
};

AppendixReport verify_appendix_inequalities(int grid_size);

// The closed-form functions whose signs certify the coverage argument.
double appendix_f(int which, double x);

}  // namespace flattori
