#include "panocal/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"

namespace panocal::sim {

namespace {

// Camera pose (rig -> world) at position `eye` looking along `forward`,
// image y pointing downward in the world.
Pose look_pose(const Vec3& eye, const Vec3& forward) {
  const Vec3 z = forward.normalized();
  Vec3 x = z.cross(Vec3::UnitZ());
  if (x.norm() < 1e-6) x = Vec3::UnitX();  // looking straight up/down
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r_world_cam;  // camera axes as world columns
  r_world_cam.col(0) = x;
  r_world_cam.col(1) = y;
  r_world_cam.col(2) = z;
  return Pose(r_world_cam, eye, "rig", "world");
}

int overlap_count(const std::vector<int>& a, const std::vector<int>& b) {
  int n = 0;
  for (int x : a) {
    if (std::binary_search(b.begin(), b.end(), x)) ++n;
  }
  return n;
}

}  // namespace

std::vector<Pose> make_stereo_trajectory(const SceneTruth& scene, int n_frames,
                                         std::uint64_t seed, const TrajectoryParams& params) {
  if (n_frames < 2) throw ConfigError("make_stereo_trajectory: n_frames must be >= 2");
  params.camera.validate();

  const Vec3 center = scene.interior_centroid();
  const double radius =
      params.orbit_radius_frac * std::min(scene.room_size.x(), scene.room_size.y());
  const double height = params.height_frac * scene.room_size.z();
  const double yaw_step = deg2rad(std::min(360.0 / (n_frames - 1), 12.0));
  const double pitch = deg2rad(params.pitch_deg);

  std::vector<Pose> poses;
  std::vector<int> prev_ids;
  for (int frame = 0; frame < n_frames; ++frame) {
    const double base_phi = frame * yaw_step;
    // slow pitch oscillation sweeps the wall height band
    const double base_pitch =
        pitch + deg2rad(params.pitch_osc_deg) *
                    std::sin(2.0 * kPi * frame / params.pitch_osc_period);
    bool placed = false;
    for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
      Rng rng(derive_seed(seed, "trajectory", (std::uint64_t(frame) << 8) | attempt));
      const double phi = base_phi + (attempt ? rng.uniform(-0.6, 0.6) * deg2rad(1.5) : 0.0);
      const double r = radius + (attempt ? rng.uniform(-0.05, 0.05) : 0.0);
      const double h = height + (attempt ? rng.uniform(-0.08, 0.08) : 0.0);
      const double p = base_pitch + (attempt ? rng.uniform(-1.0, 1.0) * deg2rad(3.0) : 0.0);

      const Vec3 eye = center + Vec3(r * std::cos(phi), r * std::sin(phi), h - center.z());
      // look across the room center with a downward pitch
      const Vec3 forward(-std::cos(phi) * std::cos(p), -std::sin(phi) * std::cos(p),
                         -std::sin(p));
      const Pose pose = look_pose(eye, forward);
      std::vector<int> ids = visible_markers(scene, params.camera, invert(pose),
                                             params.visibility);
      if (static_cast<int>(ids.size()) < params.min_visible) continue;
      std::sort(ids.begin(), ids.end());
      if (frame > 0) {
        if (overlap_count(prev_ids, ids) < params.min_overlap) continue;
        const Pose rel = compose(invert(poses.back()), pose);
        if (rotation_angle_deg(rel.rotation()) >= 15.0) continue;
        if (rel.translation().norm() >= 0.3) continue;
      }
      poses.push_back(pose);
      prev_ids = std::move(ids);
      placed = true;
    }
    if (!placed) {
      throw InsufficientVisibility("make_stereo_trajectory: frame " + std::to_string(frame) +
                                   " sees fewer than " + std::to_string(params.min_visible) +
                                   " markers");
    }
  }
  return poses;
}

}  // namespace panocal::sim
