#include "flattori/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace flattori {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_num(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end) throw Error(ErrorCode::Io, std::string("bad number in ") + what + ": " + s);
  return v;
}

// "7", "7/3", "7/3/2", "7//2" -> 7
int obj_index(const std::string& tok, int nv) {
  const int i = std::stoi(tok.substr(0, tok.find('/')));
  const int v = i < 0 ? nv + i : i - 1;
  if (v < 0 || v >= nv) throw Error(ErrorCode::Io, "OBJ face index out of range: " + tok);
  return v;
}

void check_faces(const GeometricMesh& m) {
  for (const auto& t : m.base.tris)
    for (int v : t)
      if (v < 0 || v >= m.base.vertex_count) throw Error(ErrorCode::Io, "face index out of range");
}

}  // namespace

std::string to_obj(const GeometricMesh& m) {
  std::string s;
  for (const auto& p : m.pos) s += "v " + num(p.x()) + " " + num(p.y()) + " " + num(p.z()) + "\n";
  for (const auto& t : m.base.tris)
    s += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  return s;
}

std::string to_off(const GeometricMesh& m) {
  std::string s = "OFF\n" + std::to_string(m.pos.size()) + " " + std::to_string(m.base.tris.size()) + " 0\n";
  for (const auto& p : m.pos) s += num(p.x()) + " " + num(p.y()) + " " + num(p.z()) + "\n";
  for (const auto& t : m.base.tris)
    s += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  return s;
}

std::string triangulation_json(const Triangulation& t) {
  json j;
  j["format"] = "flattori-triangulation";
  j["version"] = 1;
  j["vertex_count"] = t.vertex_count;
  j["triangles"] = t.tris;
  j["twin"] = t.twin;
  return j.dump() + "\n";
}

Triangulation parse_triangulation_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "flattori-triangulation") throw Error(ErrorCode::Io, "not a triangulation JSON");
    Triangulation t;
    t.vertex_count = j.at("vertex_count").get<int>();
    t.tris = j.at("triangles").get<std::vector<std::array<int, 3>>>();
    if (j.contains("twin")) t.twin = j.at("twin").get<std::vector<std::array<int, 3>>>();
    if (!t.twin.empty() && t.twin.size() != t.tris.size()) throw Error(ErrorCode::Io, "twin table size mismatch");
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("triangulation JSON: ") + e.what());
  }
}

std::string identification_json(const GeometricMesh& m, std::optional<Modulus> tau) {
  json j;
  j["format"] = "flattori-identification";
  j["version"] = 1;
  j["vertex_count"] = m.base.vertex_count;
  j["face_count"] = m.base.tris.size();
  j["twin"] = m.base.twin;
  json chart = json::array();
  // strings keep all 17 digits regardless of the JSON library's float printing
  for (const auto& c : m.chart)
    chart.push_back({num(c[0].x()), num(c[0].y()), num(c[1].x()), num(c[1].y()), num(c[2].x()), num(c[2].y())});
  j["chart"] = chart;
  if (tau) j["tau"] = {num(tau->real()), num(tau->imag())};
  return j.dump() + "\n";
}

std::optional<Modulus> apply_identification(GeometricMesh& m, const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "flattori-identification") throw Error(ErrorCode::Io, "not an identification sidecar");
    if (j.at("vertex_count").get<int>() != m.base.vertex_count ||
        j.at("face_count").get<std::size_t>() != m.base.tris.size())
      throw Error(ErrorCode::Io, "sidecar does not match the mesh");
    m.base.twin = j.at("twin").get<std::vector<std::array<int, 3>>>();
    m.chart.clear();
    for (const auto& c : j.at("chart")) {
      std::array<double, 6> v;
      for (int i = 0; i < 6; ++i) v[i] = parse_num(c.at(i).get<std::string>(), "chart");
      m.chart.push_back({Vec2(v[0], v[1]), Vec2(v[2], v[3]), Vec2(v[4], v[5])});
    }
    if (!m.chart.empty() && m.chart.size() != m.base.tris.size()) throw Error(ErrorCode::Io, "chart size mismatch");
    if (!j.contains("tau")) return std::nullopt;
    return Modulus(parse_num(j["tau"].at(0).get<std::string>(), "tau"),
                   parse_num(j["tau"].at(1).get<std::string>(), "tau"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("identification sidecar: ") + e.what());
  }
}

GeometricMesh parse_obj(const std::string& text) {
  GeometricMesh m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::string x, y, z;
      if (!(ls >> x >> y >> z)) throw Error(ErrorCode::Io, "OBJ vertex needs three coordinates");
      m.pos.emplace_back(parse_num(x, "OBJ"), parse_num(y, "OBJ"), parse_num(z, "OBJ"));
    } else if (tag == "f") {
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      if (tok.size() != 3) throw Error(ErrorCode::Io, "only triangular OBJ faces are supported");
      const int nv = static_cast<int>(m.pos.size());
      m.base.tris.push_back({obj_index(tok[0], nv), obj_index(tok[1], nv), obj_index(tok[2], nv)});
    }
  }
  m.base.vertex_count = static_cast<int>(m.pos.size());
  check_faces(m);
  return m;
}

GeometricMesh parse_off(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  in >> head;
  if (head != "OFF") throw Error(ErrorCode::Io, "missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw Error(ErrorCode::Io, "bad OFF counts line");
  GeometricMesh m;
  for (long i = 0; i < nv; ++i) {
    std::string x, y, z;
    if (!(in >> x >> y >> z)) throw Error(ErrorCode::Io, "truncated OFF vertex list");
    m.pos.emplace_back(parse_num(x, "OFF"), parse_num(y, "OFF"), parse_num(z, "OFF"));
  }
  for (long i = 0; i < nf; ++i) {
    int k = 0;
    std::array<int, 3> t{};
    if (!(in >> k) || k != 3 || !(in >> t[0] >> t[1] >> t[2])) throw Error(ErrorCode::Io, "OFF faces must be triangles");
    m.base.tris.push_back(t);
  }
  m.base.vertex_count = static_cast<int>(nv);
  check_faces(m);
  return m;
}

MeshFormat format_from_path(const std::string& path) {
  auto ends = [&](const std::string& s) { return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0; };
  if (ends(".obj")) return MeshFormat::OBJ;
  if (ends(".off")) return MeshFormat::OFF;
  if (ends(".json")) return MeshFormat::TriangulationJSON;
  throw Error(ErrorCode::Usage, "unknown mesh format (use .obj, .off or .json): " + path);
}

std::string sidecar_path(const std::string& mesh_path) { return mesh_path + ".ident.json"; }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed: " + path);
}

void export_mesh(const GeometricMesh& m, const std::string& path, std::optional<Modulus> tau) {
  switch (format_from_path(path)) {
    case MeshFormat::OBJ: write_file(path, to_obj(m)); break;
    case MeshFormat::OFF: write_file(path, to_off(m)); break;
    case MeshFormat::TriangulationJSON: write_file(path, triangulation_json(m.base)); return;
  }
  GeometricMesh withtwins = m;
  ensure_twins(withtwins.base);
  write_file(sidecar_path(path), identification_json(withtwins, tau));
}

GeometricMesh import_mesh(const std::string& path, std::optional<Modulus>* tau) {
  GeometricMesh m;
  switch (format_from_path(path)) {
    case MeshFormat::OBJ: m = parse_obj(read_file(path)); break;
    case MeshFormat::OFF: m = parse_off(read_file(path)); break;
    case MeshFormat::TriangulationJSON: throw Error(ErrorCode::Usage, "triangulation JSON holds no geometry: " + path);
  }
  std::optional<Modulus> t;
  if (std::ifstream(sidecar_path(path)).good()) t = apply_identification(m, read_file(sidecar_path(path)));
  else ensure_twins(m.base);
  if (tau) *tau = t;
  return m;
}

}  // namespace flattori
