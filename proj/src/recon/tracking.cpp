#include "panocal/recon/tracking.hpp"

#include "panocal/errors.hpp"

namespace panocal::recon {

TrackingResult track_sequence(std::vector<StereoFrame>& frames,
                              const TriangleMatchParams& params) {
  if (frames.size() < 2) throw ConfigError("track_sequence: need >= 2 frames");
  TrackingResult result;
  result.poses.reserve(frames.size());
  result.matches.resize(frames.size());

  frames[0].pose_world = Pose::identity("rig").relabeled("rig", "map");
  result.poses.push_back(frames[0].pose_world);

  for (std::size_t k = 1; k < frames.size(); ++k) {
    TriangleMatch match;
    try {
      // transform maps frame-k coordinates into frame-(k-1) coordinates
      match = match_triangles(frames[k].local_points, frames[k - 1].local_points, params);
    } catch (const NoConsensus&) {
      throw TrackingLost(static_cast<int>(k));
    }
    const Pose rel = match.transform.as_pose("rig", "rig");
    frames[k].pose_world = compose(frames[k - 1].pose_world, rel);
    result.poses.push_back(frames[k].pose_world);
    result.matches[k].reserve(match.inliers.size());
    for (auto [cur, prev] : match.inliers) result.matches[k].emplace_back(prev, cur);
  }
  return result;
}

std::optional<LoopClosure> detect_loop_closure(const std::vector<StereoFrame>& frames,
                                               int current, int min_gap,
                                               const CameraIntrinsics& k_left,
                                               const TriangleMatchParams& params,
                                               int min_covisible) {
  const StereoFrame& cur = frames[current];
  int best_frame = -1;
  int best_count = 0;
  for (int j = 0; j <= current - min_gap; ++j) {
    const Pose into_j = compose(invert(frames[j].pose_world), cur.pose_world);
    int count = 0;
    for (const Vec3& p : cur.local_points) {
      const Vec3 q = into_j * p;
      if (q.z() < 0.3 || q.z() > 10.0) continue;
      try {
        if (k_left.in_image(project_camera_point(k_left, q))) ++count;
      } catch (const BehindCamera&) {
      }
    }
    if (count > best_count) {
      best_count = count;
      best_frame = j;
    }
  }
  if (best_frame < 0 || best_count < min_covisible) return std::nullopt;

  try {
    const TriangleMatch match =
        match_triangles(cur.local_points, frames[best_frame].local_points, params);
    LoopClosure closure;
    closure.current = current;
    closure.partner = best_frame;
    closure.pairs = match.inliers;
    return closure;
  } catch (const NoConsensus&) {
    return std::nullopt;
  }
}

}  // namespace panocal::recon
