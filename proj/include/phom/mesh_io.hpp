#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "phom/mesh.hpp"

namespace phom {

// Plain-text mesh format, header "PH-MESH 1". Coordinates use 17 significant
// digits and tags are written in name order, so identical meshes give
// identical bytes.
void write_mesh(std::ostream& os, const TriMesh& mesh);
std::string mesh_to_string(const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);

// 64-bit FNV-1a hash of the text dump.
std::uint64_t mesh_checksum(const TriMesh& mesh);
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace phom
