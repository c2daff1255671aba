#include "panocal/sim/render.hpp"

#include <cmath>

#include "panocal/errors.hpp"
#include "panocal/geometry/solvers.hpp"
#include "panocal/rng.hpp"

namespace panocal::sim {

std::vector<int> visible_markers(const SceneTruth& scene, const CameraIntrinsics& k,
                                 const Pose& t_cam_world, const VisibilityModel& model) {
  std::vector<int> ids;
  const Vec3 cam_center = invert(t_cam_world).translation();
  const double cos_limit = std::cos(deg2rad(model.max_view_angle));
  for (std::size_t i = 0; i < scene.markers.size(); ++i) {
    const Marker& m = scene.markers[i];
    const Vec3 p_cam = t_cam_world * m.position;
    if (p_cam.z() < model.min_depth || p_cam.z() > model.max_depth) continue;
    const Vec3 to_cam = cam_center - m.position;
    const double dist = to_cam.norm();
    if (dist < 1e-9) continue;
    if (scene.planes[m.plane].plane.normal.dot(to_cam / dist) < cos_limit) continue;
    Vec2 px;
    try {
      px = project_camera_point(k, p_cam);
    } catch (const BehindCamera&) {
      continue;
    }
    if (!k.in_image(px)) continue;
    ids.push_back(static_cast<int>(i));
  }
  return ids;
}

DetectionSet render_detections(const SceneTruth& scene, const CameraIntrinsics& k,
                               const Pose& t_cam_world, double pixel_sigma,
                               std::uint64_t seed, const VisibilityModel& model) {
  DetectionSet out;
  Rng rng(derive_seed(seed, "render_detections"));
  for (int id : visible_markers(scene, k, t_cam_world, model)) {
    Vec2 px = project_camera_point(k, t_cam_world * scene.markers[id].position);
    if (pixel_sigma > 0) {
      px.x() += rng.gaussian(pixel_sigma);
      px.y() += rng.gaussian(pixel_sigma);
    }
    out.pixels.push_back(px);
    out.truth_ids.push_back(id);
  }
  return out;
}

LidarScan render_lidar(const SceneTruth& scene, const Pose& t_lidar_world,
                       const LidarDef& lidar, double range_sigma, std::uint64_t seed) {
  LidarScan scan;
  scan.sensor = lidar.name;
  scan.range_sigma = range_sigma;
  Rng rng(derive_seed(seed, "render_lidar"));

  const Pose t_world_lidar = invert(t_lidar_world);
  const Vec3 origin = t_world_lidar.translation();
  const Mat3 to_world = t_world_lidar.rotation();

  const double res = deg2rad(lidar.resolution_deg);
  const double v0 = deg2rad(lidar.fov_v_min_deg), v1 = deg2rad(lidar.fov_v_max_deg);
  const double h0 = deg2rad(lidar.fov_h_min_deg), h1 = deg2rad(lidar.fov_h_max_deg);
  const bool full_circle = (lidar.fov_h_max_deg - lidar.fov_h_min_deg) >= 360.0 - 1e-9;
  const int n_el = static_cast<int>(std::floor((v1 - v0) / res + 1e-9)) + 1;
  int n_az = static_cast<int>(std::floor((h1 - h0) / res + 1e-9)) + 1;
  if (full_circle) n_az -= 1;  // drop the duplicate seam column

  for (int ie = 0; ie < n_el; ++ie) {
    const double el = v0 + ie * res;
    const double ce = std::cos(el), se = std::sin(el);
    for (int ia = 0; ia < n_az; ++ia) {
      const double az = h0 + ia * res;
      const Vec3 dir_l(ce * std::cos(az), ce * std::sin(az), se);
      const Vec3 dir_w = to_world * dir_l;
      double best_range = -1;
      for (const PlanePatch& patch : scene.planes) {
        const double denom = patch.plane.normal.dot(dir_w);
        if (std::abs(denom) < 1e-12) continue;
        const double range = (patch.plane.d - patch.plane.normal.dot(origin)) / denom;
        if (range < 1e-6) continue;
        if (!patch.contains(origin + range * dir_w, 1e-9)) continue;
        if (best_range < 0 || range < best_range) best_range = range;
      }
      if (best_range < 0) continue;
      const double measured = best_range + (range_sigma > 0 ? rng.gaussian(range_sigma) : 0.0);
      scan.points.push_back(to_rigid(t_lidar_world) * (origin + measured * dir_w));
    }
  }
  return scan;
}

}  // namespace panocal::sim
