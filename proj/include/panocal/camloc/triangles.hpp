#pragma once

#include <array>
#include <span>
#include <vector>

#include "panocal/recon/map.hpp"
#include "panocal/types.hpp"

namespace panocal::camloc {

struct Triangle3D {
  std::array<int, 3> v;                // indices into the map point list
  std::array<double, 3> edges_sorted;  // m, ascending
};

/// Every vertex triple with all edges <= max_edge, each stored once.
std::vector<Triangle3D> enumerate_3d_triangles(std::span<const Vec3> points,
                                               double max_edge = 1.0);

inline std::vector<Triangle3D> enumerate_3d_triangles(const recon::MarkerMap& map,
                                                      double max_edge = 1.0) {
  return enumerate_3d_triangles(std::span<const Vec3>(map.points), max_edge);
}

}  // namespace panocal::camloc
