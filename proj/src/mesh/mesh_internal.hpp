#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "phom/mesh.hpp"

namespace phom::detail {

// Bit per incident zone: 1 minus, 2 plus with centroid xi1 < 0 (solid sliver), 4 other plus.
std::vector<unsigned> vertex_zone_masks(const TriMesh& mesh);

// Hash of points on a snapping grid; lookups probe the neighbouring grid
// cells so points within `tol` are found regardless of rounding boundaries.
class PointHash {
 public:
  explicit PointHash(double grid = 1e-9) : inv_(1.0 / grid) {}

  void insert(Vec2 p, int id, unsigned tag = 0) { map_.emplace(key(cell(p.x), cell(p.y), tag), Entry{p, id, tag}); }

  int find(Vec2 p, double tol, unsigned tag = 0) const {
    const long long cx = cell(p.x);
    const long long cy = cell(p.y);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto range = map_.equal_range(key(cx + dx, cy + dy, tag));
        for (auto it = range.first; it != range.second; ++it) {
          if (it->second.tag != tag) continue;
          const Vec2 q = it->second.p;
          if (std::abs(q.x - p.x) <= tol && std::abs(q.y - p.y) <= tol) return it->second.id;
        }
      }
    return -1;
  }

 private:
  struct Entry {
    Vec2 p;
    int id;
    unsigned tag;
  };
  long long cell(double v) const { return static_cast<long long>(std::floor(v * inv_)); }
  static std::uint64_t key(long long x, long long y, unsigned tag) {
    std::uint64_t h = static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(tag) * 0xC2B2AE3D27D4EB4Full;
    return h;
  }

  double inv_;
  std::unordered_multimap<std::uint64_t, Entry> map_;
};

}  // namespace phom::detail
