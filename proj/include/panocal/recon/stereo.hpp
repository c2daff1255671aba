#pragma once

#include <utility>
#include <vector>

#include "panocal/geometry/solvers.hpp"
#include "panocal/sim/rig.hpp"

namespace panocal::recon {

/// One synchronized stereo capture with its triangulated local points.
struct StereoFrame {
  int index = 0;
  std::vector<Vec2> detections_left, detections_right;
  std::vector<Vec3> local_points;                 // left-camera (rig) frame
  std::vector<std::pair<int, int>> point_obs;     // local point -> (left, right) detection
  Pose pose_world = Pose();                       // map <- rig, filled by tracking
};

/// Epipolar stereo association (mutual best match within tol) followed by
/// triangulation. Pairs failing depth or ray checks are dropped.
StereoFrame build_stereo_frame(int index, std::vector<Vec2> detections_left,
                               std::vector<Vec2> detections_right,
                               const sim::StereoRig& rig, double epipolar_tol_px = 2.0,
                               double min_depth = 0.2, double max_depth = 15.0);

}  // namespace panocal::recon
