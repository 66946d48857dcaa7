#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "phom/fem.hpp"

namespace phom {

void ConstraintSet::add_dirichlet(const TriMesh& mesh, const std::string& tag,
                                  const std::function<double(Vec2)>& value) {
  std::set<int> seen;
  for (const auto& e : mesh.edges(tag))
    for (int v : e)
      if (seen.insert(v).second) dirichlet.emplace_back(v, value(mesh.vertices[v]));
}

void ConstraintSet::add_dirichlet(const TriMesh& mesh, const std::string& tag, double value) {
  add_dirichlet(mesh, tag, [value](Vec2) { return value; });
}

namespace {

// Union-find carrying u_v = u_parent + off_v.
class OffsetForest {
 public:
  explicit OffsetForest(std::size_t n) : parent_(n), off_(n, 0.0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::pair<int, double> find(int v) {
    double acc = 0.0;
    int r = v;
    while (parent_[r] != r) {
      acc += off_[r];
      r = parent_[r];
    }
    // Path compression with accumulated offsets.
    double rest = acc;
    int w = v;
    while (parent_[w] != w) {
      const int next = parent_[w];
      const double o = off_[w];
      parent_[w] = r;
      off_[w] = rest;
      rest -= o;
      w = next;
    }
    return {r, acc};
  }

  // Imposes u_b = u_a + value; returns the mismatch when both are already linked.
  std::optional<double> link(int a, int b, double value) {
    const auto [ra, oa] = find(a);
    const auto [rb, ob] = find(b);
    if (ra == rb) return (ob - oa) - value;
    // Keep the smaller index as root for deterministic numbering.
    if (ra < rb) {
      parent_[rb] = ra;
      off_[rb] = oa + value - ob;
    } else {
      parent_[ra] = rb;
      off_[ra] = ob - value - oa;
    }
    return std::nullopt;
  }

 private:
  std::vector<int> parent_;
  std::vector<double> off_;
};

}  // namespace

DofMap resolve_constraints(std::size_t n, const ConstraintSet& c) {
  OffsetForest forest(n);
  auto check_index = [n](int v) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvariantError("constraint references a missing vertex");
  };
  auto link = [&](int a, int b, double value, const char* what) {
    check_index(a);
    check_index(b);
    if (auto mismatch = forest.link(a, b, value); mismatch && std::abs(*mismatch) > 1e-12 * (1.0 + std::abs(value)))
      throw InvariantError(std::string("conflicting ") + what + " constraints at vertices " + std::to_string(a) +
                           ", " + std::to_string(b));
  };
  for (const auto& p : c.periodic)
    for (const auto& [m, s] : p.pairs) link(m, s, 0.0, "periodic");
  for (const auto& j : c.jumps) link(j.a, j.b, j.value, "jump");

  std::vector<std::optional<double>> fixed(n);
  for (const auto& [v, value] : c.dirichlet) {
    check_index(v);
    const auto [r, o] = forest.find(v);
    const double need = value - o;
    if (fixed[r] && std::abs(*fixed[r] - need) > 1e-12 * (1.0 + std::abs(need)))
      throw InvariantError("conflicting Dirichlet values at vertex " + std::to_string(v));
    fixed[r] = need;
  }

  DofMap map;
  map.dof.assign(n, -1);
  map.offset.assign(n, 0.0);
  std::vector<int> root_dof(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto [r, o] = forest.find(static_cast<int>(v));
    if (fixed[r]) {
      map.offset[v] = *fixed[r] + o;
      continue;
    }
    if (root_dof[r] < 0) root_dof[r] = map.ndof++;
    map.dof[v] = root_dof[r];
    map.offset[v] = o;
  }
  return map;
}

}  // namespace phom
