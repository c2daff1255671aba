#include "panocal/camloc/triangles.hpp"

#include <algorithm>

namespace panocal::camloc {

std::vector<Triangle3D> enumerate_3d_triangles(std::span<const Vec3> points, double max_edge) {
  const int n = static_cast<int>(points.size());
  // neighbour lists (j > i within max_edge) keep the triple loop near-linear
  // in the usual marker densities
  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((points[i] - points[j]).norm() <= max_edge) nbr[i].push_back(j);
    }
  }
  std::vector<Triangle3D> out;
  for (int i = 0; i < n; ++i) {
    const auto& cand = nbr[i];
    for (std::size_t x = 0; x < cand.size(); ++x) {
      for (std::size_t y = x + 1; y < cand.size(); ++y) {
        const int j = cand[x], l = cand[y];
        const double jl = (points[j] - points[l]).norm();
        if (jl > max_edge) continue;
        Triangle3D t;
        t.v = {i, j, l};
        t.edges_sorted = {jl, (points[i] - points[l]).norm(), (points[i] - points[j]).norm()};
        std::sort(t.edges_sorted.begin(), t.edges_sorted.end());
        out.push_back(t);
      }
    }
  }
  return out;
}

}  // namespace panocal::camloc
