#include "panocal/calib/study.hpp"

#include <algorithm>
#include <cmath>

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"
#include "panocal/threading.hpp"

namespace panocal::calib {

namespace {

struct TrialOutcome {
  bool ok = false;
  bool sensor_failure = false;
  double rotation_error_deg = 0;
  double translation_error_cm = 0;
  double reprojection_px = -1;
};

}  // namespace

NoiseStudyTable run_noise_study(const sim::SceneTruth& scene, const sim::RigSpec& rig,
                                const recon::MarkerMap& base_map,
                                const NoiseStudyParams& params) {
  if (!std::is_sorted(params.sigmas.begin(), params.sigmas.end())) {
    throw ConfigError("run_noise_study: sigmas must be ascending");
  }
  if (params.trials < 1) throw ConfigError("run_noise_study: trials must be >= 1");

  const std::size_t n = params.sigmas.size() * params.trials;
  std::vector<TrialOutcome> outcomes(n);
  parallel_for(n, [&](std::size_t idx) {
    const std::size_t si = idx / params.trials;
    const std::size_t trial = idx % params.trials;
    const std::uint64_t seed = derive_seed(params.seed, "noise_study", (si << 16) | trial);
    TrialOutcome& out = outcomes[idx];
    try {
      const recon::MarkerMap noisy =
          add_map_noise(base_map, params.sigmas[si], derive_seed(seed, "map"));
      const sim::RigCapture capture = sim::render_rig_capture(
          scene, rig, params.world_from_rig, params.pixel_sigma, derive_seed(seed, "capture"));

      std::vector<CameraCapture> cameras;
      for (std::size_t c = 0; c < rig.cameras.size(); ++c) {
        cameras.push_back(CameraCapture{rig.cameras[c].name, rig.cameras[c].intrinsics,
                                        capture.camera_detections[c].second.pixels});
      }
      std::vector<LidarCapture> lidars;
      for (std::size_t l = 0; l < rig.lidars.size(); ++l) {
        lidars.push_back(LidarCapture{rig.lidars[l].name, capture.lidar_scans[l].points,
                                      rig.lidars[l].coarse_rpy_deg});
      }
      CalibrateParams cal = params.calibrate;
      cal.seed = derive_seed(seed, "calibrate");
      const CalibrationResult result = calibrate_rig(noisy, cameras, lidars, cal);
      out.sensor_failure = !result.failures.empty();
      const ScoreReport report = score(result, rig);
      out.rotation_error_deg = report.mean_rotation_error_deg;
      out.translation_error_cm = report.mean_translation_error_cm;
      double reproj_sum = 0;
      int reproj_n = 0;
      for (const PairScore& pair : report.pairs) {
        if (pair.reprojection_px >= 0) {
          reproj_sum += pair.reprojection_px;
          ++reproj_n;
        }
      }
      if (reproj_n) out.reprojection_px = reproj_sum / reproj_n;
      out.ok = true;
    } catch (const Error&) {
      out.sensor_failure = true;
    }
  });

  NoiseStudyTable table;
  for (std::size_t si = 0; si < params.sigmas.size(); ++si) {
    NoiseStudyRow row;
    row.sigma_m = params.sigmas[si];
    row.trials = params.trials;
    std::vector<double> rot, trans, reproj;
    for (int t = 0; t < params.trials; ++t) {
      const TrialOutcome& out = outcomes[si * params.trials + t];
      if (out.sensor_failure) ++row.failures;
      if (!out.ok) continue;
      rot.push_back(out.rotation_error_deg);
      trans.push_back(out.translation_error_cm);
      if (out.reprojection_px >= 0) reproj.push_back(out.reprojection_px);
    }
    auto mean_std = [](const std::vector<double>& v, double* mean, double* sd) {
      if (v.empty()) {
        *mean = std::numeric_limits<double>::quiet_NaN();
        *sd = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      double m = 0;
      for (double x : v) m += x;
      m /= v.size();
      double ss = 0;
      for (double x : v) ss += (x - m) * (x - m);
      *mean = m;
      *sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    };
    mean_std(rot, &row.mean_rotation_error_deg, &row.std_rotation_error_deg);
    mean_std(trans, &row.mean_translation_error_cm, &row.std_translation_error_cm);
    if (!reproj.empty()) {
      double m = 0;
      for (double x : reproj) m += x;
      row.mean_reprojection_px = m / reproj.size();
    }
    row.unacceptable = row.failures > 0 ||
                       !(row.mean_rotation_error_deg <= params.unacceptable_rotation_deg);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace panocal::calib
