#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panocal/geometry/plane.hpp"
#include "panocal/recon/tracking.hpp"

namespace panocal::recon {

struct TrackObs {
  int frame = 0;
  int eye = 0;  // 0 = left, 1 = right
  int detection = 0;

  friend bool operator<(const TrackObs& a, const TrackObs& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    if (a.eye != b.eye) return a.eye < b.eye;
    return a.detection < b.detection;
  }
  friend bool operator==(const TrackObs& a, const TrackObs& b) {
    return a.frame == b.frame && a.eye == b.eye && a.detection == b.detection;
  }
};

struct MapMetadata {
  std::uint64_t seed = 0;
  double pixel_sigma = 0;
  double map_sigma = 0;
  std::string date;
  std::string source;
};

/// The reconstructed calibration reference.
struct MarkerMap {
  std::vector<Vec3> points;                  // map frame
  std::vector<std::vector<TrackObs>> tracks; // parallel to points
  std::vector<FittedPlane> planes;
  MapMetadata meta;

  /// Count of distinct stereo frames observing point i.
  int frames_observing(int i) const;
};

/// Fuse tracked local points into one map: union-find over (frame, local
/// point) with tracking and loop-closure links, then a spatial merge.
MarkerMap build_map(const std::vector<StereoFrame>& frames, const TrackingResult& tracking,
                    const std::vector<LoopClosure>& closures, double merge_radius = 0.02);

/// Single-linkage clustering: collapse clusters under `radius` to their
/// centroid with unioned tracks, repeated until the minimum pairwise
/// distance is >= radius. Idempotent.
MarkerMap merge_points(const MarkerMap& map, double radius);

struct MapPlaneParams {
  double dist_tol = 0.015;
  int min_support = 12;
  int max_planes = 8;
  std::uint64_t seed = 17;
  // Fit on bundle-adjusted (>= 2 frame) points only; frozen single-frame
  // points keep raw triangulation noise and would blur the planes.
  bool refined_only = true;
};

/// RANSAC plane decomposition of the map points (walls + floor).
/// Support indices always reference the full map point list.
void fit_map_planes(MarkerMap& map, const MapPlaneParams& params = {});

/// Mean absolute point-to-plane residual over all supported points.
double mean_plane_fit_error(const MarkerMap& map);

}  // namespace panocal::recon
