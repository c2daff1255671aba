#pragma once

#include <vector>

#include "panocal/calib/extrinsics.hpp"
#include "panocal/sim/rig.hpp"

namespace panocal::calib {

/// One pairwise comparison against the rig ground truth, in the paper's
/// table convention (rotation as XYZ Euler degrees, translation in cm).
struct PairScore {
  std::string x, y;  // T^x_y
  double rotation_error_deg = 0;  // geodesic
  EulerXyz euler_estimate, euler_truth;
  Vec3 translation_estimate_cm = Vec3::Zero();
  Vec3 translation_truth_cm = Vec3::Zero();
  Vec3 translation_error_cm = Vec3::Zero();  // per axis, estimate - truth
  double translation_error_norm_cm = 0;
  double reprojection_px = -1;  // camera pairs, inlier-weighted mean rms
};

struct ScoreReport {
  std::vector<PairScore> pairs;  // every other sensor against the reference
  double mean_rotation_error_deg = 0;
  double mean_translation_error_cm = 0;  // of the per-pair error norms
};

/// Truth pairwise extrinsic from the rig mounting poses.
Pose truth_extrinsic(const sim::RigSpec& rig, const std::string& x, const std::string& y);

/// Reference sensor in the paper's convention: the first camera, else the
/// first LiDAR.
std::string reference_sensor(const sim::RigSpec& rig);

/// Compare each localized sensor against the reference sensor using the rig
/// mounting poses as ground truth. Throws UnknownSensor for names the rig
/// does not define.
ScoreReport score(const CalibrationResult& result, const sim::RigSpec& truth);

}  // namespace panocal::calib
