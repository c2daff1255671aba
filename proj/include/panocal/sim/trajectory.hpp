#pragma once

#include <cstdint>
#include <vector>

#include "panocal/sim/render.hpp"
#include "panocal/sim/scene.hpp"

namespace panocal::sim {

struct TrajectoryParams {
  CameraIntrinsics camera;        // visibility is checked with this (left) eye
  int min_visible = 12;
  int min_overlap = 6;            // shared markers between consecutive frames
  double pitch_deg = 14.0;        // downward look to pick up the floor
  double pitch_osc_deg = 9.0;     // slow oscillation sweeping the wall height band
  double pitch_osc_period = 20.0; // frames
  double orbit_radius_frac = 0.20;  // of the smaller room footprint dimension
  double height_frac = 0.55;      // of room height
  VisibilityModel visibility;
};

/// Smooth inward-looking orbit around the room center. Yaw advances by
/// min(360/(n-1), 12) degrees per frame, so the full 360-degree sweep is
/// reached for n >= 31; every pose is jittered (seeded) until it sees
/// >= min_visible markers and shares >= min_overlap with its predecessor.
/// Returned poses map rig -> world. Throws InsufficientVisibility.
std::vector<Pose> make_stereo_trajectory(const SceneTruth& scene, int n_frames,
                                         std::uint64_t seed, const TrajectoryParams& params);

}  // namespace panocal::sim
