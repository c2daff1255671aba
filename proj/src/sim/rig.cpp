#include "panocal/sim/rig.hpp"

#include <set>

#include "panocal/errors.hpp"

namespace panocal::sim {

void RigSpec::validate() const {
  std::set<std::string> names;
  for (const CameraDef& c : cameras) {
    if (c.name.empty()) throw ConfigError("rig: empty camera name");
    if (!names.insert(c.name).second) throw ConfigError("rig: duplicate sensor name " + c.name);
    c.intrinsics.validate();
    if (c.mount.from_frame() != "rig") throw ConfigError("rig: camera mount must be <sensor> <- rig");
  }
  for (const LidarDef& l : lidars) {
    if (l.name.empty()) throw ConfigError("rig: empty lidar name");
    if (!names.insert(l.name).second) throw ConfigError("rig: duplicate sensor name " + l.name);
    if (!(l.resolution_deg > 0)) throw ConfigError("rig: lidar resolution must be > 0");
    if (!(l.fov_h_max_deg > l.fov_h_min_deg) || !(l.fov_v_max_deg > l.fov_v_min_deg)) {
      throw ConfigError("rig: lidar fov range is empty");
    }
    if (l.range_sigma < 0) throw ConfigError("rig: lidar range_sigma must be >= 0");
    if (l.mount.from_frame() != "rig") throw ConfigError("rig: lidar mount must be <sensor> <- rig");
  }
  if (names.empty()) throw ConfigError("rig: no sensors");
}

void NoiseSpec::validate() const {
  if (pixel_sigma < 0 || range_sigma < 0 || map_sigma < 0) {
    throw ConfigError("noise: sigmas must be >= 0");
  }
}

namespace {

CameraIntrinsics make_intrinsics(double f, int w, int h, bool distorted) {
  CameraIntrinsics k;
  k.fx = k.fy = f;
  k.cx = w / 2.0;
  k.cy = h / 2.0;
  k.width = w;
  k.height = h;
  if (distorted) {
    k.k1 = -0.06;
    k.k2 = 0.011;
    k.p1 = 4e-4;
    k.p2 = -3e-4;
  }
  return k;
}

// Camera looking along rig +x, z up in the rig: optical z = rig x, image
// x right = rig -y, image y down = rig -z.
Mat3 forward_camera_rotation() {
  Mat3 r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return r;
}

}  // namespace

StereoRig default_survey_rig() {
  StereoRig rig;
  rig.left = make_intrinsics(1746, 1280, 1024, true);
  rig.right = rig.left;
  rig.right.k1 = -0.055;  // the two eyes need not share distortion exactly
  rig.t_right_left = Pose(Mat3::Identity(), Vec3(-0.1209, 0, 0), "rig", "survey_right");
  return rig;
}

RigSpec make_stereo_rig(double baseline_m) {
  RigSpec rig;
  rig.name = "stereo";
  CameraDef cam0{"cam0", make_intrinsics(760, 1280, 1024, true),
                 Pose(forward_camera_rotation(), Vec3::Zero(), "rig", "cam0")};
  CameraDef cam1 = cam0;
  cam1.name = "cam1";
  // second eye displaced along the camera x axis (image right)
  cam1.mount = compose(Pose(Mat3::Identity(), Vec3(-baseline_m, 0, 0), "cam0", "cam1"),
                       cam0.mount);
  rig.cameras = {cam0, cam1};
  return rig;
}

RigSpec make_mobile_robot_rig() {
  RigSpec rig;
  rig.name = "mobile_robot";
  CameraDef cam0{"cam0", make_intrinsics(600, 1280, 720, true),
                 Pose(forward_camera_rotation(), Vec3::Zero(), "rig", "cam0")};
  // Table GT for the camera-LiDAR pair: R = XYZ Euler (90, -45, 0) deg,
  // t = (0, -5.93, -5.497) cm.
  const Pose t_l0_c0(rotation_from_euler_xyz(90, -45, 0), Vec3(0, -0.0593, -0.05497),
                     "cam0", "lidar0");
  LidarDef lidar0;
  lidar0.name = "lidar0";
  lidar0.mount = compose(t_l0_c0, cam0.mount);
  lidar0.fov_h_min_deg = -180;
  lidar0.fov_h_max_deg = 180;
  lidar0.fov_v_min_deg = -55;
  lidar0.fov_v_max_deg = 40;
  lidar0.resolution_deg = 0.6;
  rig.cameras = {cam0};
  rig.lidars = {lidar0};
  return rig;
}

RigSpec make_backpack_rig() {
  RigSpec rig;
  rig.name = "backpack";
  LidarDef lidar0;
  lidar0.name = "lidar0";
  lidar0.mount = Pose::identity("rig").relabeled("rig", "lidar0");
  lidar0.fov_h_min_deg = 95;   // rear half, facing rig -x
  lidar0.fov_h_max_deg = 265;
  lidar0.fov_v_min_deg = -70;
  lidar0.fov_v_max_deg = 15;
  lidar0.resolution_deg = 0.45;

  // Table GT for the LiDAR pair: t = (-22.55, 13.02, -34.92) cm with the
  // backpack's tilted rear unit, R = XYZ Euler (0, -75, -30) deg.
  const Pose t_l1_l0(rotation_from_euler_xyz(0, -75, -30),
                     Vec3(-0.2255, 0.1302, -0.3492), "lidar0", "lidar1");
  LidarDef lidar1 = lidar0;
  lidar1.name = "lidar1";
  lidar1.mount = compose(t_l1_l0, lidar0.mount);
  lidar1.fov_h_min_deg = -85;  // front half, facing rig +x
  lidar1.fov_h_max_deg = 85;
  rig.lidars = {lidar0, lidar1};
  return rig;
}

std::optional<RigSpec> rig_preset(const std::string& name) {
  if (name == "stereo") return make_stereo_rig();
  if (name == "mobile_robot") return make_mobile_robot_rig();
  if (name == "backpack") return make_backpack_rig();
  return std::nullopt;
}

}  // namespace panocal::sim
