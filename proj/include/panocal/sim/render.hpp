#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panocal/geometry/camera.hpp"
#include "panocal/sim/rig.hpp"
#include "panocal/sim/scene.hpp"

namespace panocal::sim {

/// Detected marker centers for one view. The truth ids are an evaluation
/// side channel only; solvers consume just the pixel list.
struct DetectionSet {
  std::vector<Vec2> pixels;
  std::vector<int> truth_ids;  // parallel to pixels
};

struct LidarScan {
  std::vector<Vec3> points;  // sensor frame
  std::string sensor;
  double range_sigma = 0;    // noise model metadata
};

struct VisibilityModel {
  double min_depth = 0.3;       // m
  double max_depth = 10.0;      // m
  double max_view_angle = 70.0; // deg between plane normal and ray to camera
};

/// Indices of markers detectable from the given camera pose.
std::vector<int> visible_markers(const SceneTruth& scene, const CameraIntrinsics& k,
                                 const Pose& t_cam_world,
                                 const VisibilityModel& model = {});

/// Noisy projections of the visible markers; stands in for the external
/// marker detector. Empty result is allowed.
DetectionSet render_detections(const SceneTruth& scene, const CameraIntrinsics& k,
                               const Pose& t_cam_world, double pixel_sigma,
                               std::uint64_t seed, const VisibilityModel& model = {});

/// Ray-cast the angular grid against the room; ranges perturbed by
/// N(0, range_sigma); points expressed in the LiDAR frame.
LidarScan render_lidar(const SceneTruth& scene, const Pose& t_lidar_world,
                       const LidarDef& lidar, double range_sigma, std::uint64_t seed);

}  // namespace panocal::sim
