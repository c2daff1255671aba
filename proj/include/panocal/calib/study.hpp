#pragma once

#include <vector>

#include "panocal/calib/calibrate.hpp"
#include "panocal/calib/score.hpp"
#include "panocal/sim/capture.hpp"
#include "panocal/sim/scene.hpp"

namespace panocal::calib {

struct NoiseStudyParams {
  std::vector<double> sigmas;  // m, ascending
  int trials = 5;              // repetitions per sigma, distinct seeds
  std::uint64_t seed = 0;
  double pixel_sigma = 0.2;
  double unacceptable_rotation_deg = 2.0;
  Pose world_from_rig = Pose();  // capture placement
  CalibrateParams calibrate;
};

struct NoiseStudyRow {
  double sigma_m = 0;
  int trials = 0;
  int failures = 0;  // trials with any per-sensor localization failure
  double mean_rotation_error_deg = 0, std_rotation_error_deg = 0;
  double mean_translation_error_cm = 0, std_translation_error_cm = 0;
  double mean_reprojection_px = -1;
  bool unacceptable = false;
};

struct NoiseStudyTable {
  std::vector<NoiseStudyRow> rows;
};

/// The map-noise degradation study: per sigma, noise the map, re-render the
/// single-shot captures with fresh seeds and run the full calibration,
/// `trials` times. Failures are counted, never propagated.
NoiseStudyTable run_noise_study(const sim::SceneTruth& scene, const sim::RigSpec& rig,
                                const recon::MarkerMap& base_map,
                                const NoiseStudyParams& params);

}  // namespace panocal::calib
