#pragma once

#include <optional>
#include <vector>

#include "panocal/recon/stereo.hpp"
#include "panocal/recon/triangle_match.hpp"

namespace panocal::recon {

struct TrackingResult {
  std::vector<Pose> poses;  // map <- rig_k; frame 0 anchored at the identity
  // matches[k]: local-point correspondences (index in frame k-1, index in k)
  std::vector<std::vector<std::pair<int, int>>> matches;
};

/// Chains match_triangles over consecutive frames; frame 0 defines the map
/// frame. Writes pose_world into the frames. Throws TrackingLost(k).
TrackingResult track_sequence(std::vector<StereoFrame>& frames,
                              const TriangleMatchParams& params = {});

struct LoopClosure {
  int current = -1;
  int partner = -1;  // earlier frame
  std::vector<std::pair<int, int>> pairs;  // (current local idx, partner local idx)
};

/// Projects the current frame's points into every frame at least min_gap
/// older and links to the one with the most co-visible points (>= 6),
/// with correspondences from match_triangles. nullopt when nothing qualifies.
std::optional<LoopClosure> detect_loop_closure(const std::vector<StereoFrame>& frames,
                                               int current, int min_gap,
                                               const CameraIntrinsics& k_left,
                                               const TriangleMatchParams& params = {},
                                               int min_covisible = 6);

}  // namespace panocal::recon
