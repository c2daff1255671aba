#include <doctest.h>

#include <cstring>
#include <set>

#include "panocal/errors.hpp"
#include "panocal/geometry/solvers.hpp"
#include "panocal/sim/render.hpp"
#include "panocal/sim/rig.hpp"
#include "panocal/sim/scene.hpp"
#include "panocal/sim/trajectory.hpp"
#include "testutil.hpp"

using namespace panocal;
using namespace panocal::sim;

namespace {

bool bitwise_equal(const Vec3& a, const Vec3& b) {
  return std::memcmp(a.data(), b.data(), 3 * sizeof(double)) == 0;
}

SceneTruth default_scene() { return build_room(RoomConfig{}); }

}  // namespace

TEST_CASE("build_room: default paper-scale room") {
  const SceneTruth scene = default_scene();
  CHECK(scene.markers.size() == 340);
  CHECK(scene.planes.size() == 5);
  scene.validate(0.05);

  std::set<int> used_planes;
  for (const Marker& m : scene.markers) used_planes.insert(m.plane);
  CHECK(used_planes.size() == 5);
}

TEST_CASE("build_room: minimal scene and determinism") {
  RoomConfig small;
  small.marker_count = 4;
  small.seed = 9;
  const SceneTruth a = build_room(small);
  CHECK(a.markers.size() == 4);
  a.validate(small.min_spacing);

  const SceneTruth b = build_room(small);
  REQUIRE(a.markers.size() == b.markers.size());
  for (std::size_t i = 0; i < a.markers.size(); ++i) {
    CHECK(bitwise_equal(a.markers[i].position, b.markers[i].position));
  }

  RoomConfig impossible;
  impossible.room_size = Vec3(0.4, 0.4, 0.4);
  impossible.marker_count = 500;
  CHECK_THROWS_AS((void)build_room(impossible), PackingFailure);
}

TEST_CASE("render_detections: zero noise equals exact projection") {
  const SceneTruth scene = default_scene();
  const CameraIntrinsics k = testutil::survey_camera(true);
  const Pose cam = invert(Pose(rotation_from_euler_xyz(0, 90, 0), scene.interior_centroid(),
                               "cam", "world"));
  const DetectionSet det = render_detections(scene, k, cam, 0.0, 3);
  REQUIRE(det.pixels.size() > 5);
  REQUIRE(det.pixels.size() == det.truth_ids.size());
  for (std::size_t i = 0; i < det.pixels.size(); ++i) {
    const Vec2 expected = project(k, scene.markers[det.truth_ids[i]].position, cam);
    CHECK((det.pixels[i] - expected).norm() == 0.0);
  }
}

TEST_CASE("render_detections: noise statistics match the requested sigma") {
  const SceneTruth scene = default_scene();
  const CameraIntrinsics k = testutil::survey_camera();
  const Pose cam = invert(Pose(rotation_from_euler_xyz(0, 90, 0),
                               Vec3(0.5, 2.0, 1.25), "cam", "world"));
  double sum_sq = 0;
  long n = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const DetectionSet noisy = render_detections(scene, k, cam, 0.2, 1000 + trial);
    const DetectionSet clean = render_detections(scene, k, cam, 0.0, 1000 + trial);
    REQUIRE(noisy.pixels.size() == clean.pixels.size());
    for (std::size_t i = 0; i < noisy.pixels.size(); ++i) {
      const Vec2 d = noisy.pixels[i] - clean.pixels[i];
      sum_sq += d.squaredNorm();
      n += 2;
    }
  }
  REQUIRE(n > 10000);
  const double std_dev = std::sqrt(sum_sq / n);
  CHECK(std_dev == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("render_detections: camera facing one wall sees only that wall") {
  const SceneTruth scene = default_scene();
  const CameraIntrinsics k = testutil::survey_camera();
  // one meter in front of the x=0 wall, looking straight at it
  Mat3 axes;  // cam z -> world -x (forward), cam y -> world -z (down)
  axes.col(0) = Vec3::UnitY();
  axes.col(1) = -Vec3::UnitZ();
  axes.col(2) = -Vec3::UnitX();
  const Pose cam = invert(Pose(axes, Vec3(1.0, 2.0, 1.25), "cam", "world"));
  const DetectionSet det = render_detections(scene, k, cam, 0.0, 4);
  REQUIRE(det.pixels.size() > 0);
  for (int id : det.truth_ids) CHECK(scene.markers[id].plane == 1);
}

TEST_CASE("render_lidar: noiseless points lie on the planes") {
  const SceneTruth scene = default_scene();
  LidarDef def;
  def.name = "l";
  def.resolution_deg = 2.0;
  def.fov_v_min_deg = -60;
  def.fov_v_max_deg = 45;
  const Pose t_lidar_world =
      invert(Pose(Mat3::Identity(), scene.interior_centroid(), "l", "world"));
  const LidarScan scan = render_lidar(scene, t_lidar_world, def, 0.0, 5);
  REQUIRE(scan.points.size() > 1000);

  const RigidTransform world_from_lidar = to_rigid(invert(t_lidar_world));
  std::set<int> planes_hit;
  for (const Vec3& p : scan.points) {
    const Vec3 w = world_from_lidar * p;
    double best = 1e9;
    int best_plane = -1;
    for (std::size_t i = 0; i < scene.planes.size(); ++i) {
      const double d = std::abs(scene.planes[i].plane.signed_distance(w));
      if (d < best) {
        best = d;
        best_plane = static_cast<int>(i);
      }
    }
    CHECK(best < 1e-9);
    planes_hit.insert(best_plane);
  }
  CHECK(planes_hit.size() == 5);  // 360 deg from the center covers the whole room
}

TEST_CASE("render_lidar: 2 cm range noise statistics") {
  const SceneTruth scene = default_scene();
  LidarDef def;
  def.name = "l";
  def.resolution_deg = 1.0;
  def.fov_v_min_deg = -60;
  def.fov_v_max_deg = 45;
  const Pose t_lidar_world =
      invert(Pose(Mat3::Identity(), scene.interior_centroid() + Vec3(0.2, -0.3, 0.1), "l",
                  "world"));
  const LidarScan noisy = render_lidar(scene, t_lidar_world, def, 0.02, 6);
  const LidarScan clean = render_lidar(scene, t_lidar_world, def, 0.0, 6);
  REQUIRE(noisy.points.size() == clean.points.size());

  double range_sq = 0;
  for (std::size_t i = 0; i < noisy.points.size(); ++i) {
    const double dr = noisy.points[i].norm() - clean.points[i].norm();
    range_sq += dr * dr;
  }
  const double range_rms = std::sqrt(range_sq / noisy.points.size());
  CHECK(range_rms == doctest::Approx(0.02).epsilon(0.05));

  const RigidTransform world_from_lidar = to_rigid(invert(t_lidar_world));
  double plane_sq = 0;
  for (const Vec3& p : noisy.points) {
    const Vec3 w = world_from_lidar * p;
    double best = 1e9;
    for (const PlanePatch& patch : scene.planes) {
      best = std::min(best, std::abs(patch.plane.signed_distance(w)));
    }
    plane_sq += best * best;
  }
  const double plane_rms = std::sqrt(plane_sq / noisy.points.size());
  CHECK(plane_rms > 0.012);
  CHECK(plane_rms < 0.022);
}

TEST_CASE("make_stereo_trajectory: 60-frame loop") {
  const SceneTruth scene = default_scene();
  TrajectoryParams params;
  params.camera = testutil::survey_camera(true);
  const auto poses = make_stereo_trajectory(scene, 60, 7, params);
  REQUIRE(poses.size() == 60);

  std::vector<int> prev;
  double total_yaw = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    std::vector<int> ids = visible_markers(scene, params.camera, invert(poses[i]));
    CHECK(ids.size() >= 12);
    std::sort(ids.begin(), ids.end());
    if (i > 0) {
      int shared = 0;
      for (int id : ids) shared += std::binary_search(prev.begin(), prev.end(), id) ? 1 : 0;
      CHECK(shared >= 6);
      const Pose rel = compose(invert(poses[i - 1]), poses[i]);
      CHECK(rotation_angle_deg(rel.rotation()) < 15.0);
      CHECK(rel.translation().norm() < 0.3);
      total_yaw += rotation_angle_deg(rel.rotation());
    }
    prev = std::move(ids);
  }
  CHECK(total_yaw >= 350.0);  // sweeps the full circle
  // loop closes: the last pose is near the first
  const Pose loop = compose(invert(poses.front()), poses.back());
  CHECK(rotation_angle_deg(loop.rotation()) < 20.0);
}

TEST_CASE("make_stereo_trajectory: minimal and deterministic") {
  const SceneTruth scene = default_scene();
  TrajectoryParams params;
  params.camera = testutil::survey_camera(true);
  const auto two = make_stereo_trajectory(scene, 2, 11, params);
  REQUIRE(two.size() == 2);
  std::vector<int> a = visible_markers(scene, params.camera, invert(two[0]));
  std::vector<int> b = visible_markers(scene, params.camera, invert(two[1]));
  std::sort(a.begin(), a.end());
  int shared = 0;
  for (int id : b) shared += std::binary_search(a.begin(), a.end(), id) ? 1 : 0;
  CHECK(shared >= 6);

  const auto again = make_stereo_trajectory(scene, 2, 11, params);
  for (int i = 0; i < 2; ++i) {
    CHECK(bitwise_equal(two[i].translation(), again[i].translation()));
    CHECK((two[i].rotation() - again[i].rotation()).norm() == 0.0);
  }
}

TEST_CASE("rig presets reproduce the table ground truths") {
  const RigSpec robot = make_mobile_robot_rig();
  robot.validate();
  const Pose t_l0_c0 = compose(robot.lidars[0].mount, invert(robot.cameras[0].mount));
  const EulerXyz e = euler_xyz(t_l0_c0.rotation());
  CHECK(e.rx_deg == doctest::Approx(90).epsilon(1e-9));
  CHECK(e.ry_deg == doctest::Approx(-45).epsilon(1e-9));
  CHECK(e.rz_deg == doctest::Approx(0).epsilon(1e-9));
  CHECK((t_l0_c0.translation() - Vec3(0, -0.0593, -0.05497)).norm() < 1e-12);

  const RigSpec backpack = make_backpack_rig();
  backpack.validate();
  const Pose t_l1_l0 = compose(backpack.lidars[1].mount, invert(backpack.lidars[0].mount));
  CHECK((t_l1_l0.translation() - Vec3(-0.2255, 0.1302, -0.3492)).norm() < 1e-12);

  const RigSpec stereo = make_stereo_rig();
  stereo.validate();
  const Pose t_c0_c1 = compose(stereo.cameras[0].mount, invert(stereo.cameras[1].mount));
  CHECK(t_c0_c1.translation().norm() == doctest::Approx(0.12).epsilon(1e-12));
}
