#include "flattori/coverage.hpp"

#include "flattori/diplotorus.hpp"
#include "flattori/moduli.hpp"

#include <random>

namespace flattori {

CoverageReport coverage_audit(long samples, std::uint64_t seed, double residual_tol) {
  if (samples < 0) throw Error(ErrorCode::Domain, "negative sample count");
  CoverageReport r;
  r.min_margin = 1e300;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0, 0.5), im(0.8, kLongThreshold);
  while (r.samples < samples) {
    const Modulus z(re(rng), im(rng));
    if (std::abs(z) < 1) continue;
    ++r.samples;
    try {
      const RealizationChoice c = select_realization(z);
      if (c.kind != RealizationKind::Diplotorus) throw Error(ErrorCode::Coverage, "short modulus sent to the long route");
      const Region reg = region_19d(c.d);
      if (!reg.contains(c.target)) throw Error(ErrorCode::Coverage, "target outside the chosen region");
      r.min_margin = std::min(r.min_margin, reg.margin(c.target));
      const DiplotorusParams p = solve_params(c.n, c.d, c.target);
      const double res = std::abs(modulus_formula(p) - c.target);
      r.max_residual = std::max(r.max_residual, res);
      if (res >= residual_tol) throw Error(ErrorCode::Coverage, "solver residual " + std::to_string(res));
      ++r.realized;
    } catch (const Error& e) {
      r.failures.push_back({z, e.what()});
    }
  }
  return r;
}

}  // namespace flattori
