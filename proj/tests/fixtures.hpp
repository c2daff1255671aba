#pragma once

// Shared synthetic-pipeline fixtures for the unit suites. Building the
// default room reconstruction is comparatively expensive, so it is cached
// per process.

#include <vector>

#include "panocal/recon/ba.hpp"
#include "panocal/recon/stereo.hpp"
#include "panocal/recon/tracking.hpp"
#include "panocal/rng.hpp"
#include "panocal/sim/render.hpp"
#include "panocal/sim/rig.hpp"
#include "panocal/sim/scene.hpp"
#include "panocal/sim/trajectory.hpp"

namespace fixtures {

using namespace panocal;
using recon::StereoFrame;

/// Render both eyes along the trajectory and assemble stereo frames.
inline std::vector<StereoFrame> render_stereo_frames(const sim::SceneTruth& scene,
                                                     const std::vector<Pose>& trajectory,
                                                     const sim::StereoRig& rig,
                                                     double pixel_sigma, std::uint64_t seed) {
  std::vector<StereoFrame> frames;
  frames.reserve(trajectory.size());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const Pose t_left_world = invert(trajectory[k]);
    const Pose t_right_world = compose(rig.t_right_left, t_left_world);
    const sim::DetectionSet left = sim::render_detections(
        scene, rig.left, t_left_world, pixel_sigma, derive_seed(seed, "left", k));
    const sim::DetectionSet right = sim::render_detections(
        scene, rig.right, t_right_world, pixel_sigma, derive_seed(seed, "right", k));
    frames.push_back(recon::build_stereo_frame(static_cast<int>(k), left.pixels,
                                               right.pixels, rig));
  }
  return frames;
}

struct ReconFixture {
  sim::SceneTruth scene;
  sim::StereoRig rig;
  std::vector<Pose> trajectory;  // rig -> world, truth
  std::vector<StereoFrame> frames;
  recon::TrackingResult tracking;
  recon::MarkerMap map;
  recon::BaSummary ba;
};

/// Default-room reconstruction at the paper-scale settings
/// (340 markers, 60 frames, 0.2 px detection noise), built once.
const ReconFixture& default_reconstruction();

/// Same scene rendered noiselessly with a short trajectory; cheap and exact.
const ReconFixture& noiseless_reconstruction();

}  // namespace fixtures
