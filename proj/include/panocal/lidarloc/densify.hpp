#pragma once

#include <span>
#include <vector>

#include "panocal/geometry/plane.hpp"
#include "panocal/recon/map.hpp"

namespace panocal::lidarloc {

/// Plane-structured dense reference cloud for ICP.
struct DensePointCloud {
  struct PlaneGrid {
    Plane plane;
    Vec3 base;          // point on the plane (d * normal)
    Vec3 u_axis, v_axis;
    double u0 = 0, v0 = 0;  // grid origin offsets along the axes
    int nu = 0, nv = 0;
    double spacing = 0.01;
  };

  std::vector<Vec3> points;
  std::vector<int> plane_of;   // per point, index into grids
  std::vector<PlaneGrid> grids;

  const Plane& plane(int grid_index) const { return grids[grid_index].plane; }
};

/// Regular grid sample over each map plane's extent (bounding rectangle of
/// its supporting markers padded by `padding`).
DensePointCloud densify_reference(const recon::MarkerMap& map, double spacing = 0.01,
                                  double padding = 0.10);

struct DenseNeighbor {
  Vec3 point;
  int plane = -1;
  double distance = 0;
};

/// Exact nearest dense sample to the query within max_dist (the reference is
/// a union of plane-aligned grids, so the nearest sample per plane is the
/// clamped, grid-snapped projection). Returns plane = -1 when out of range.
DenseNeighbor nearest_dense(const DensePointCloud& cloud, const Vec3& query, double max_dist);

}  // namespace panocal::lidarloc
