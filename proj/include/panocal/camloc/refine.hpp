#pragma once

#include <span>
#include <vector>

#include "panocal/camloc/pnp.hpp"

namespace panocal::camloc {

struct RefineParams {
  double inlier_px = 3.0;
  int outer_iters = 6;   // association / minimization rounds
  int lm_iters = 25;
  double hi_res_diagonal = 1600.0;
};

struct CameraView {
  CameraIntrinsics intrinsics;
  std::vector<Vec2> detections;
};

/// Per-camera LM refinement with re-association each outer round (the map is
/// fixed, so the joint problem decouples per camera). Updates the results in
/// place; an update is kept only while the camera's inlier count does not
/// decrease. Returns the refined camera <- map poses.
std::vector<Pose> refine_multi_camera(std::vector<LocalizationResult>& results,
                                      std::span<const CameraView> views,
                                      std::span<const Vec3> map_points,
                                      const RefineParams& params = {});

}  // namespace panocal::camloc
