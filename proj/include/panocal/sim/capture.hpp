#pragma once

#include <string>
#include <utility>
#include <vector>

#include "panocal/sim/render.hpp"

namespace panocal::sim {

/// One synchronized single-shot capture of a whole rig.
struct RigCapture {
  Pose world_from_rig;  // placement at capture time (truth, evaluation only)
  std::vector<std::pair<std::string, DetectionSet>> camera_detections;
  std::vector<LidarScan> lidar_scans;
};

/// Render every sensor of the rig from one placement. Camera detections get
/// pixel_sigma noise; each LiDAR uses its own range sigma.
RigCapture render_rig_capture(const SceneTruth& scene, const RigSpec& rig,
                              const Pose& world_from_rig, double pixel_sigma,
                              std::uint64_t seed);

}  // namespace panocal::sim
