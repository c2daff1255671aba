#pragma once

#include <map>
#include <string>

#include "panocal/geometry/pose.hpp"
#include "panocal/recon/map.hpp"

namespace panocal::calib {

/// Per-sensor localization outcome attached to the calibration result.
struct SensorLocalization {
  Pose world_from_sensor;  // map <- sensor
  double rms_px = -1;      // cameras
  double rms_m = -1;       // lidars
  int inliers = -1;        // cameras
  bool converged = true;
};

struct CalibrationResult {
  std::map<std::string, SensorLocalization> sensors;
  std::map<std::string, std::string> failures;  // sensor -> reason
  // T^x_y for every ordered pair (x != y): maps y-frame coords into x.
  std::map<std::pair<std::string, std::string>, Pose> pairwise;

  const Pose& extrinsic(const std::string& x, const std::string& y) const;
};

/// Fill all ordered pairwise transforms from the per-sensor world poses.
CalibrationResult derive_extrinsics(const std::map<std::string, SensorLocalization>& sensors);

/// i.i.d. per-coordinate N(0, sigma) on every map point; planes refitted.
recon::MarkerMap add_map_noise(const recon::MarkerMap& map, double sigma, std::uint64_t seed);

}  // namespace panocal::calib
