#include "flattori/common.hpp"

#include <map>

namespace flattori {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Census: return "census";
    case ErrorCode::NonManifold: return "non-manifold";
    case ErrorCode::ConeAngle: return "cone-angle";
    case ErrorCode::Budget: return "budget";
    case ErrorCode::FoldSearch: return "fold-search";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::Io: return "io";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

void ensure_twins(Triangulation& t) {
  if (!t.twin.empty()) return;
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (int f = 0; f < static_cast<int>(t.tris.size()); ++f)
    for (int i = 0; i < 3; ++i) by_pair[{t.tris[f][i], t.tris[f][(i + 1) % 3]}].push_back(3 * f + i);
  t.twin.assign(t.tris.size(), {-1, -1, -1});
  for (const auto& [key, hs] : by_pair) {
    const auto it = by_pair.find({key.second, key.first});
    if (it == by_pair.end())
      throw Error(ErrorCode::NonManifold, "half-edge " + std::to_string(key.first) + "->" + std::to_string(key.second) +
                                              " has no opposite (open or inconsistently oriented surface)");
    const auto& opp = it->second;
    if (key.first == key.second) {
      if (hs.size() != 2) throw Error(ErrorCode::NonManifold, "ambiguous loop edges; supply explicit twins");
      t.twin[hs[0] / 3][hs[0] % 3] = hs[1];
      t.twin[hs[1] / 3][hs[1] % 3] = hs[0];
      continue;
    }
    if (hs.size() != 1 || opp.size() != 1)
      throw Error(ErrorCode::NonManifold, "edge " + std::to_string(key.first) + "-" + std::to_string(key.second) +
                                              " is shared by more than two faces or is a parallel edge; supply explicit twins");
    t.twin[hs[0] / 3][hs[0] % 3] = opp[0];
  }
}

MetricTriangulation induced_metric(const GeometricMesh& m) {
  MetricTriangulation mt;
  mt.base = m.base;
  mt.len.resize(m.base.tris.size());
  for (std::size_t f = 0; f < m.base.tris.size(); ++f)
    for (int i = 0; i < 3; ++i)
      mt.len[f][i] = (m.pos[m.base.tris[f][(i + 1) % 3]] - m.pos[m.base.tris[f][i]]).norm();
  return mt;
}

MetricTriangulation chart_metric(const GeometricMesh& m) {
  if (m.chart.size() != m.base.tris.size()) throw Error(ErrorCode::Domain, "chart_metric: mesh carries no chart");
  MetricTriangulation mt;
  mt.base = m.base;
  mt.len.resize(m.base.tris.size());
  for (std::size_t f = 0; f < m.base.tris.size(); ++f)
    for (int i = 0; i < 3; ++i) mt.len[f][i] = (m.chart[f][(i + 1) % 3] - m.chart[f][i]).norm();
  return mt;
}

}  // namespace flattori
