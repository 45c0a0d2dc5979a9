#pragma once

#include "flattori/common.hpp"

#include <optional>
#include <string>

namespace flattori {

enum class MeshFormat { OBJ, OFF, TriangulationJSON };

// Reals are written with 17 significant digits, so reading back is bit-exact.
std::string to_obj(const GeometricMesh& m);
std::string to_off(const GeometricMesh& m);
std::string triangulation_json(const Triangulation& t);
// Sidecar for OBJ/OFF: twins and per-corner chart, i.e. what the plain formats cannot hold.
std::string identification_json(const GeometricMesh& m, std::optional<Modulus> tau = std::nullopt);

GeometricMesh parse_obj(const std::string& text);
GeometricMesh parse_off(const std::string& text);
Triangulation parse_triangulation_json(const std::string& text);
// Applies a sidecar to a mesh parsed from OBJ/OFF; returns the recorded modulus if any.
std::optional<Modulus> apply_identification(GeometricMesh& m, const std::string& text);

MeshFormat format_from_path(const std::string& path);
std::string sidecar_path(const std::string& mesh_path);

// Writes the mesh (and the sidecar next to OBJ/OFF files). Errors carry the path.
void export_mesh(const GeometricMesh& m, const std::string& path, std::optional<Modulus> tau = std::nullopt);
// Reads a mesh and its sidecar when present; without one, twins come from vertex pairs.
GeometricMesh import_mesh(const std::string& path, std::optional<Modulus>* tau = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace flattori
