#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "panocal/geometry/camera.hpp"
#include "panocal/geometry/pose.hpp"

namespace panocal::sim {

struct CameraDef {
  std::string name;
  CameraIntrinsics intrinsics;
  Pose mount;  // sensor <- rig
};

struct LidarDef {
  std::string name;
  double fov_h_min_deg = -180, fov_h_max_deg = 180;
  double fov_v_min_deg = -30, fov_v_max_deg = 30;
  double resolution_deg = 0.5;
  double range_sigma = 0.02;  // m
  Pose mount;                 // sensor <- rig
  // Coarse orientation prior (XYZ Euler, degrees) used by LiDAR localization;
  // a plain yaw is the common case, roll/pitch default to 0.
  Vec3 coarse_rpy_deg = Vec3::Zero();
};

struct RigSpec {
  std::string name;
  std::vector<CameraDef> cameras;
  std::vector<LidarDef> lidars;

  void validate() const;  // unique names, valid intrinsics/fovs
};

struct NoiseSpec {
  double pixel_sigma = 0.2;   // px
  double range_sigma = 0.02;  // m
  double map_sigma = 0.0;     // m
  std::uint64_t seed = 1;

  void validate() const;
};

/// The pre-calibrated stereo camera used to reconstruct the room.
struct StereoRig {
  CameraIntrinsics left, right;
  Pose t_right_left;  // maps left-camera coords into the right camera

  double baseline() const { return t_right_left.translation().norm(); }
};

StereoRig default_survey_rig();

// Built-in device presets mirroring the evaluation scenarios.
RigSpec make_stereo_rig(double baseline_m = 0.12);
RigSpec make_mobile_robot_rig();
RigSpec make_backpack_rig();
std::optional<RigSpec> rig_preset(const std::string& name);

}  // namespace panocal::sim
