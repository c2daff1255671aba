#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "panocal/types.hpp"

namespace panocal {

/// Infinite plane n . p = d with unit normal.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double d = 0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - d; }

  /// Flip so that the given point lies on the positive side.
  Plane oriented_toward(const Vec3& p) const {
    return signed_distance(p) >= 0 ? *this : Plane{-normal, -d};
  }
};

/// Plane extracted from data, with its supporting point indices.
struct FittedPlane {
  Plane plane;
  std::vector<int> support;
  double rms = 0;  // point-to-plane RMS of the support
};

/// Total least squares plane (PCA). Requires >= 3 points with planar spread.
Plane fit_plane_lsq(std::span<const Vec3> points, std::span<const int> subset = {});

struct PlaneRansacParams {
  double dist_tol = 0.05;    // m
  int min_support = 100;
  int max_planes = 12;
  int iterations = 200;      // RANSAC draws per extracted plane
  std::uint64_t seed = 0;
};

/// Sequential RANSAC plane extraction: fit, peel inliers, repeat while the
/// best remaining plane keeps min_support points. Throws NoPlanes when the
/// first round finds nothing.
std::vector<FittedPlane> extract_planes(std::span<const Vec3> points,
                                        const PlaneRansacParams& params);

}  // namespace panocal
