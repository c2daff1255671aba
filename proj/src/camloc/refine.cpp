#include "panocal/camloc/refine.hpp"

#include "panocal/errors.hpp"
#include "panocal/threading.hpp"

namespace panocal::camloc {

std::vector<Pose> refine_multi_camera(std::vector<LocalizationResult>& results,
                                      std::span<const CameraView> views,
                                      std::span<const Vec3> map_points,
                                      const RefineParams& params) {
  if (results.size() != views.size()) {
    throw ConfigError("refine_multi_camera: one result per camera required");
  }
  std::vector<Pose> poses(results.size());
  parallel_for(results.size(), [&](std::size_t c) {
    const CameraView& view = views[c];
    PnpParams gate;
    gate.inlier_px = params.inlier_px;
    gate.hi_res_diagonal = params.hi_res_diagonal;
    const double inlier_px = effective_inlier_px(gate, view.intrinsics);

    RigidTransform pose = to_rigid(results[c].pose);
    auto pairs = reprojection_inliers(view.detections, map_points, view.intrinsics, pose,
                                      inlier_px);
    RigidTransform best_pose = pose;
    auto best_pairs = pairs;

    for (int outer = 0; outer < params.outer_iters; ++outer) {
      refine_pose_lm(view.detections, map_points, pairs, view.intrinsics, pose,
                     params.lm_iters);
      auto next = reprojection_inliers(view.detections, map_points, view.intrinsics, pose,
                                       inlier_px);
      if (next.size() >= best_pairs.size()) {
        best_pose = pose;
        const bool stable = (next == pairs);
        best_pairs = std::move(next);
        if (stable) break;
        pairs = best_pairs;
      } else {
        break;  // keep the best state seen
      }
    }

    results[c].pose = best_pose.as_pose("map", "camera");
    results[c].inliers = best_pairs;
    results[c].inlier_count = static_cast<int>(best_pairs.size());
    results[c].rms_px = reprojection_rms_px(view.detections, map_points, view.intrinsics,
                                            best_pose, best_pairs);
    poses[c] = results[c].pose;
  });
  return poses;
}

}  // namespace panocal::camloc
