#pragma once

#include <optional>
#include <string>
#include <vector>

#include "panocal/calib/extrinsics.hpp"
#include "panocal/camloc/pnp.hpp"
#include "panocal/camloc/refine.hpp"
#include "panocal/lidarloc/localize.hpp"

namespace panocal::calib {

struct CameraCapture {
  std::string name;
  CameraIntrinsics intrinsics;
  std::vector<Vec2> detections;
};

struct LidarCapture {
  std::string name;
  std::vector<Vec3> points;
  // coarse rotation of this sensor relative to the rig's reference sensor
  // (XYZ Euler, degrees, table convention: maps reference coords into this
  // sensor); ignored for the reference sensor itself
  Vec3 coarse_rpy_deg = Vec3::Zero();
};

struct CalibrateParams {
  camloc::PnpParams pnp;
  camloc::RefineParams refine;
  lidarloc::LidarLocParams lidar;
  double densify_spacing = 0.01;
  double densify_padding = 0.10;
  std::uint64_t seed = 0;
};

/// Single-shot calibration core: localize every camera (triangle PnP +
/// multi-camera refinement) and every LiDAR (corner solve + ICP) against the
/// map, then derive all pairwise extrinsics. LiDAR coarse priors chain off
/// the first localized camera, or off the first LiDAR when the rig carries
/// no cameras (that reference localizes prior-free). Per-sensor failures are
/// recorded; throws LocalizationFailure only when fewer than two sensors
/// localize.
CalibrationResult calibrate_rig(const recon::MarkerMap& map,
                                const std::vector<CameraCapture>& cameras,
                                const std::vector<LidarCapture>& lidars,
                                const CalibrateParams& params = {});

}  // namespace panocal::calib
