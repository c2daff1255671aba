#include "panocal/sim/capture.hpp"

#include "panocal/rng.hpp"

namespace panocal::sim {

RigCapture render_rig_capture(const SceneTruth& scene, const RigSpec& rig,
                              const Pose& world_from_rig, double pixel_sigma,
                              std::uint64_t seed) {
  RigCapture capture;
  capture.world_from_rig = world_from_rig;
  const Pose rig_from_world = invert(world_from_rig);
  for (const CameraDef& cam : rig.cameras) {
    const Pose t_cam_world = compose(cam.mount, rig_from_world);
    capture.camera_detections.emplace_back(
        cam.name, render_detections(scene, cam.intrinsics, t_cam_world, pixel_sigma,
                                    derive_seed(seed, "capture_cam", capture.camera_detections.size())));
  }
  for (const LidarDef& lidar : rig.lidars) {
    const Pose t_lidar_world = compose(lidar.mount, rig_from_world);
    capture.lidar_scans.push_back(render_lidar(scene, t_lidar_world, lidar, lidar.range_sigma,
                                               derive_seed(seed, "capture_lidar",
                                                           capture.lidar_scans.size())));
  }
  return capture;
}

}  // namespace panocal::sim
