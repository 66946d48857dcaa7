#include "phom/mesh_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace phom {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T expect(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw GeometryError(std::string("mesh file: cannot read ") + what);
  return v;
}

void expect_word(std::istream& is, const std::string& word) {
  const auto w = expect<std::string>(is, word.c_str());
  if (w != word) throw GeometryError("mesh file: expected '" + word + "', found '" + w + "'");
}

}  // namespace

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << "PH-MESH 1\n";
  os << "vertices " << mesh.vertices.size() << '\n';
  for (const auto& v : mesh.vertices) os << fmt17(v.x) << ' ' << fmt17(v.y) << '\n';
  os << "triangles " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << region_name(mesh.regions[t]) << '\n';
  }
  os << "tags " << mesh.edge_tags.size() << '\n';
  for (const auto& [name, list] : mesh.edge_tags) {
    os << "tag " << name << ' ' << list.size() << '\n';
    for (const auto& e : list) os << e[0] << ' ' << e[1] << '\n';
  }
}

std::string mesh_to_string(const TriMesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  return os.str();
}

TriMesh read_mesh(std::istream& is) {
  expect_word(is, "PH-MESH");
  if (expect<int>(is, "version") != 1) throw GeometryError("mesh file: unsupported version");
  TriMesh mesh;
  expect_word(is, "vertices");
  const auto nv = expect<std::size_t>(is, "vertex count");
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    v.x = expect<double>(is, "coordinate");
    v.y = expect<double>(is, "coordinate");
  }
  expect_word(is, "triangles");
  const auto nt = expect<std::size_t>(is, "triangle count");
  mesh.triangles.resize(nt);
  mesh.regions.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    for (int& k : mesh.triangles[t]) {
      k = expect<int>(is, "vertex index");
      if (k < 0 || static_cast<std::size_t>(k) >= nv) throw GeometryError("mesh file: vertex index out of range");
    }
    const auto r = expect<std::string>(is, "region");
    if (r == "minus")
      mesh.regions[t] = Region::Minus;
    else if (r == "plus")
      mesh.regions[t] = Region::Plus;
    else
      throw GeometryError("mesh file: unknown region '" + r + "'");
  }
  expect_word(is, "tags");
  const auto ntags = expect<std::size_t>(is, "tag count");
  for (std::size_t k = 0; k < ntags; ++k) {
    expect_word(is, "tag");
    const auto name = expect<std::string>(is, "tag name");
    const auto ne = expect<std::size_t>(is, "edge count");
    auto& list = mesh.edge_tags[name];
    list.resize(ne);
    for (auto& e : list) {
      e[0] = expect<int>(is, "edge vertex");
      e[1] = expect<int>(is, "edge vertex");
    }
  }
  return mesh;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mesh_checksum(const TriMesh& mesh) { return fnv1a(mesh_to_string(mesh)); }

}  // namespace phom
