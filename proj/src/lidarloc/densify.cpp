#include "panocal/lidarloc/densify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "panocal/errors.hpp"

namespace panocal::lidarloc {

DensePointCloud densify_reference(const recon::MarkerMap& map, double spacing, double padding) {
  if (map.planes.empty()) throw ConfigError("densify_reference: map has no fitted planes");
  DensePointCloud cloud;
  for (const FittedPlane& fp : map.planes) {
    DensePointCloud::PlaneGrid grid;
    grid.plane = fp.plane;
    grid.spacing = spacing;
    const Vec3& n = fp.plane.normal;
    grid.base = fp.plane.d * n;
    grid.u_axis = n.cross(std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
    grid.v_axis = n.cross(grid.u_axis);

    double u0 = std::numeric_limits<double>::max(), u1 = -u0;
    double v0 = u0, v1 = -u0;
    for (int idx : fp.support) {
      const Vec3 rel = map.points[idx] - grid.base;
      u0 = std::min(u0, rel.dot(grid.u_axis));
      u1 = std::max(u1, rel.dot(grid.u_axis));
      v0 = std::min(v0, rel.dot(grid.v_axis));
      v1 = std::max(v1, rel.dot(grid.v_axis));
    }
    grid.u0 = u0 - padding;
    grid.v0 = v0 - padding;
    grid.nu = static_cast<int>(std::floor((u1 + padding - grid.u0) / spacing + 1e-9)) + 1;
    grid.nv = static_cast<int>(std::floor((v1 + padding - grid.v0) / spacing + 1e-9)) + 1;

    const int grid_index = static_cast<int>(cloud.grids.size());
    for (int iu = 0; iu < grid.nu; ++iu) {
      for (int iv = 0; iv < grid.nv; ++iv) {
        cloud.points.push_back(grid.base + (grid.u0 + iu * spacing) * grid.u_axis +
                               (grid.v0 + iv * spacing) * grid.v_axis);
        cloud.plane_of.push_back(grid_index);
      }
    }
    cloud.grids.push_back(grid);
  }
  return cloud;
}

DenseNeighbor nearest_dense(const DensePointCloud& cloud, const Vec3& query, double max_dist) {
  DenseNeighbor best;
  best.distance = max_dist;
  for (std::size_t g = 0; g < cloud.grids.size(); ++g) {
    const auto& grid = cloud.grids[g];
    const Vec3 rel = query - grid.base;
    // in-plane coordinates, clamped to the extent, snapped to the sampling
    const double u = rel.dot(grid.u_axis);
    const double v = rel.dot(grid.v_axis);
    const double iu = std::clamp(std::round((u - grid.u0) / grid.spacing), 0.0,
                                 static_cast<double>(grid.nu - 1));
    const double iv = std::clamp(std::round((v - grid.v0) / grid.spacing), 0.0,
                                 static_cast<double>(grid.nv - 1));
    const Vec3 sample = grid.base + (grid.u0 + iu * grid.spacing) * grid.u_axis +
                        (grid.v0 + iv * grid.spacing) * grid.v_axis;
    const double d = (sample - query).norm();
    if (d < best.distance) {
      best.distance = d;
      best.point = sample;
      best.plane = static_cast<int>(g);
    }
  }
  return best;
}

}  // namespace panocal::lidarloc
