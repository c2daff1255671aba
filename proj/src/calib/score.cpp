#include "panocal/calib/score.hpp"

#include "panocal/errors.hpp"

namespace panocal::calib {

namespace {

const Pose* find_mount(const sim::RigSpec& rig, const std::string& name) {
  for (const auto& c : rig.cameras) {
    if (c.name == name) return &c.mount;
  }
  for (const auto& l : rig.lidars) {
    if (l.name == name) return &l.mount;
  }
  return nullptr;
}

bool is_camera(const sim::RigSpec& rig, const std::string& name) {
  for (const auto& c : rig.cameras) {
    if (c.name == name) return true;
  }
  return false;
}

}  // namespace

Pose truth_extrinsic(const sim::RigSpec& rig, const std::string& x, const std::string& y) {
  const Pose* mx = find_mount(rig, x);
  const Pose* my = find_mount(rig, y);
  if (!mx || !my) throw UnknownSensor("rig does not define " + (mx ? y : x));
  return compose(*mx, invert(*my));
}

std::string reference_sensor(const sim::RigSpec& rig) {
  if (!rig.cameras.empty()) return rig.cameras.front().name;
  if (!rig.lidars.empty()) return rig.lidars.front().name;
  throw ConfigError("reference_sensor: empty rig");
}

ScoreReport score(const CalibrationResult& result, const sim::RigSpec& truth) {
  ScoreReport report;
  const std::string ref = reference_sensor(truth);
  for (const auto& [name, loc] : result.sensors) {
    if (!find_mount(truth, name)) throw UnknownSensor("rig does not define " + name);
  }
  if (!result.sensors.count(ref)) {
    throw UnknownSensor("reference sensor " + ref + " was not localized");
  }

  for (const auto& [name, loc] : result.sensors) {
    if (name == ref) continue;
    PairScore pair;
    pair.x = name;
    pair.y = ref;
    const Pose estimate = result.extrinsic(name, ref);
    const Pose gt = truth_extrinsic(truth, name, ref);
    pair.rotation_error_deg =
        rotation_angle_deg(estimate.rotation().transpose() * gt.rotation());
    pair.euler_estimate = euler_xyz(estimate.rotation());
    pair.euler_truth = euler_xyz(gt.rotation());
    pair.translation_estimate_cm = estimate.translation() * 100.0;
    pair.translation_truth_cm = gt.translation() * 100.0;
    pair.translation_error_cm = pair.translation_estimate_cm - pair.translation_truth_cm;
    pair.translation_error_norm_cm = pair.translation_error_cm.norm();
    if (is_camera(truth, name) && is_camera(truth, ref)) {
      const SensorLocalization& a = result.sensors.at(name);
      const SensorLocalization& b = result.sensors.at(ref);
      const double wa = std::max(1, a.inliers), wb = std::max(1, b.inliers);
      pair.reprojection_px = (wa * a.rms_px + wb * b.rms_px) / (wa + wb);
    }
    report.pairs.push_back(pair);
  }
  for (const PairScore& pair : report.pairs) {
    report.mean_rotation_error_deg += pair.rotation_error_deg;
    report.mean_translation_error_cm += pair.translation_error_norm_cm;
  }
  if (!report.pairs.empty()) {
    report.mean_rotation_error_deg /= report.pairs.size();
    report.mean_translation_error_cm /= report.pairs.size();
  }
  return report;
}

}  // namespace panocal::calib
