#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "panocal/errors.hpp"
#include "panocal/lidarloc/corner.hpp"
#include "panocal/lidarloc/densify.hpp"
#include "panocal/lidarloc/icp.hpp"
#include "panocal/lidarloc/localize.hpp"
#include "testutil.hpp"

using namespace panocal;
using namespace panocal::lidarloc;

namespace {

// a map whose points are the truth markers themselves (map frame == world)
recon::MarkerMap truth_map(const sim::SceneTruth& scene) {
  recon::MarkerMap map;
  for (const auto& m : scene.markers) {
    map.points.push_back(m.position);
    map.tracks.emplace_back();
  }
  recon::fit_map_planes(map);
  return map;
}

sim::LidarDef wide_lidar(double resolution = 0.8) {
  sim::LidarDef def;
  def.name = "lidar";
  def.resolution_deg = resolution;
  def.fov_v_min_deg = -60;
  def.fov_v_max_deg = 45;
  return def;
}

}  // namespace

TEST_CASE("scan plane extraction recovers the five room planes") {
  const auto scene = sim::build_room(sim::RoomConfig{});
  const Pose t_lidar_world =
      invert(Pose(Mat3::Identity(), Vec3(1.4, 2.1, 1.3), "lidar", "world"));
  const auto scan = sim::render_lidar(scene, t_lidar_world, wide_lidar(), 0.0, 3);

  PlaneRansacParams params;
  params.dist_tol = 0.02;
  params.min_support = 500;
  params.seed = 5;
  const auto planes = extract_planes(scan.points, params);
  REQUIRE(planes.size() == 5);

  const RigidTransform world_from_lidar = to_rigid(invert(t_lidar_world));
  for (const auto& fp : planes) {
    const Vec3 n_world = world_from_lidar.rotation * fp.plane.normal;
    double best = 180;
    for (const auto& patch : scene.planes) {
      const double c = std::abs(n_world.dot(patch.plane.normal));
      best = std::min(best, rad2deg(std::acos(std::clamp(c, 0.0, 1.0))));
    }
    CHECK(best < 0.01);
    // junction-band points sit within tol of two planes; residuals stay small
    CHECK(fp.rms < 0.002);
  }

  // 2 cm range noise: refined normals still within half a degree
  const auto noisy = sim::render_lidar(scene, t_lidar_world, wide_lidar(), 0.02, 4);
  PlaneRansacParams nparams;
  nparams.dist_tol = 0.05;
  nparams.min_support = 500;
  nparams.seed = 6;
  const auto nplanes = extract_planes(noisy.points, nparams);
  REQUIRE(nplanes.size() >= 4);
  for (const auto& fp : nplanes) {
    const Vec3 n_world = world_from_lidar.rotation * fp.plane.normal;
    double best = 180;
    for (const auto& patch : scene.planes) {
      const double c = std::abs(n_world.dot(patch.plane.normal));
      best = std::min(best, rad2deg(std::acos(std::clamp(c, 0.0, 1.0))));
    }
    CHECK(best < 0.5);
  }
}

TEST_CASE("extract_corner: coordinate planes, offsets, equivariance") {
  const std::array<Plane, 3> axes = {Plane{Vec3::UnitX(), 0}, Plane{Vec3::UnitY(), 0},
                                     Plane{Vec3::UnitZ(), 0}};
  const Corner origin_corner = extract_corner(axes, Vec3(1, 1, 1));
  CHECK(origin_corner.c.norm() < 1e-12);
  CHECK((origin_corner.directions - Mat3::Identity()).norm() < 1e-12);

  const std::array<Plane, 3> offset = {Plane{Vec3::UnitX(), 1}, Plane{Vec3::UnitY(), 2},
                                       Plane{Vec3::UnitZ(), 0.5}};
  const Corner offset_corner = extract_corner(offset, Vec3(2, 3, 1.5));
  CHECK((offset_corner.c - Vec3(1, 2, 0.5)).norm() < 1e-12);

  // rotating the input planes rotates the corner exactly
  Rng rng(17);
  const Mat3 r = testutil::random_rotation(rng);
  std::array<Plane, 3> rotated;
  for (int i = 0; i < 3; ++i) rotated[i] = Plane{r * offset[i].normal, offset[i].d};
  const Corner rc = extract_corner(rotated, r * Vec3(2, 3, 1.5));
  CHECK((rc.c - r * offset_corner.c).norm() < 1e-10);
  CHECK((rc.directions - r * offset_corner.directions).norm() < 1e-10);

  const std::array<Plane, 3> parallel = {Plane{Vec3::UnitX(), 0},
                                         Plane{Vec3(0.999, 0.01, 0).normalized(), 1},
                                         Plane{Vec3::UnitZ(), 0}};
  CHECK_THROWS_AS((void)extract_corner(parallel, Vec3(1, 1, 1)), NearParallelPlanes);
}

TEST_CASE("solve_pose_from_corner: identity and exact recovery") {
  const std::array<Plane, 3> axes = {Plane{Vec3::UnitX(), 0}, Plane{Vec3::UnitY(), 0},
                                     Plane{Vec3::UnitZ(), 0}};
  const Corner corner = extract_corner(axes, Vec3(1, 1, 1));
  const Pose id = solve_pose_from_corner(corner, corner);
  CHECK(rotation_angle_deg(id.rotation()) < 1e-12);
  CHECK(id.translation().norm() < 1e-12);

  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    // corner seen from a lidar at pose T (map <- lidar): lidar-frame corner
    // is the inverse image of the map corner
    const RigidTransform t = testutil::random_rigid(rng, 2.0);
    const RigidTransform t_inv = t.inverse();
    Corner corner_lidar;
    corner_lidar.c = t_inv * corner.c;
    corner_lidar.directions = t_inv.rotation * corner.directions;
    const Pose solved = solve_pose_from_corner(corner, corner_lidar);
    CHECK((solved.rotation() - t.rotation).norm() < 1e-12);
    CHECK((solved.translation() - t.translation).norm() < 1e-12);
    // Eq. 6 consistency
    CHECK((corner.directions - solved.rotation() * corner_lidar.directions).norm() < 1e-9);
  }
}

TEST_CASE("densify_reference: grid counts and on-plane samples") {
  // one square metre of markers on the floor plane
  recon::MarkerMap map;
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      map.points.emplace_back(i * 0.1, j * 0.1, 0.0);
      map.tracks.emplace_back();
    }
  }
  FittedPlane floor;
  floor.plane = Plane{Vec3::UnitZ(), 0};
  for (int i = 0; i < static_cast<int>(map.points.size()); ++i) floor.support.push_back(i);
  map.planes = {floor};

  const DensePointCloud dense = densify_reference(map, 0.01, 0.10);
  CHECK(dense.points.size() == 121u * 121u);
  for (const Vec3& p : dense.points) CHECK(std::abs(p.z()) < 1e-12);
}

TEST_CASE("densify_reference: covers the room scan within half a diagonal") {
  const auto scene = sim::build_room(sim::RoomConfig{});
  const auto map = truth_map(scene);
  const DensePointCloud dense = densify_reference(map, 0.01, 0.10);

  const Pose t_lidar_world =
      invert(Pose(Mat3::Identity(), Vec3(1.6, 1.9, 1.2), "lidar", "world"));
  const auto scan = sim::render_lidar(scene, t_lidar_world, wide_lidar(1.2), 0.0, 9);
  const RigidTransform world_from_lidar = to_rigid(invert(t_lidar_world));

  long covered = 0, interior = 0, interior_covered = 0;
  const double tol = 0.01 * std::sqrt(2.0) / 2.0;
  for (const Vec3& p : scan.points) {
    const Vec3 w = world_from_lidar * p;
    const DenseNeighbor nn = nearest_dense(dense, w, 0.05);
    if (nn.plane >= 0 && nn.distance <= tol + 1e-12) ++covered;
    // hits well inside a patch must always be covered
    bool inner = false;
    for (const auto& patch : scene.planes) {
      if (std::abs(patch.plane.signed_distance(w)) > 1e-9) continue;
      const Vec3 rel = w - patch.origin;
      const double u = rel.dot(patch.u_axis), v = rel.dot(patch.v_axis);
      if (u > 0.2 && u < patch.u_len - 0.2 && v > 0.2 && v < patch.v_len - 0.2) inner = true;
    }
    if (inner) {
      ++interior;
      if (nn.plane >= 0 && nn.distance <= tol + 1e-12) ++interior_covered;
    }
  }
  CHECK(interior > 500);
  CHECK(interior_covered == interior);
  CHECK(covered >= static_cast<long>(0.97 * scan.points.size()));
}

TEST_CASE("icp_refine: fixed point, basin recovery, noise floor") {
  const auto scene = sim::build_room(sim::RoomConfig{});
  const auto map = truth_map(scene);
  const DensePointCloud dense = densify_reference(map);

  const Pose truth_pose(rotation_from_euler_xyz(3, -7, 25), Vec3(1.7, 2.4, 1.1), "lidar",
                        "world");
  const Pose t_lidar_world = invert(truth_pose);
  const auto clean = sim::render_lidar(scene, t_lidar_world, wide_lidar(), 0.0, 11);

  // exact start: nothing moves
  const IcpResult fixed = icp_refine(clean.points, dense,
                                     truth_pose.relabeled("lidar", "map"));
  CHECK(fixed.rms_m < 1e-9);
  CHECK((fixed.pose.translation() - truth_pose.translation()).norm() < 1e-9);
  CHECK(rotation_angle_deg(fixed.pose.rotation().transpose() * truth_pose.rotation()) < 1e-7);

  // perturbed 2 deg / 3 cm: recovered
  Rng rng(31);
  const Mat3 dr = rotation_about(testutil::random_unit(rng), deg2rad(2.0));
  const Pose off(dr * truth_pose.rotation(),
                 truth_pose.translation() + Vec3(0.02, -0.015, 0.012), "lidar", "map");
  const IcpResult rec = icp_refine(clean.points, dense, off);
  CHECK(rec.converged);
  CHECK((rec.pose.translation() - truth_pose.translation()).norm() < 1e-4);
  CHECK(rotation_angle_deg(rec.pose.rotation().transpose() * truth_pose.rotation()) < 1e-3);
  for (std::size_t i = 1; i < rec.rms_history.size(); ++i) {
    CHECK(rec.rms_history[i] <= rec.rms_history[i - 1] * 1.001 + 1e-12);
  }

  // 2 cm range noise: sub-centimetre pose, rms at the noise floor
  const auto noisy = sim::render_lidar(scene, t_lidar_world, wide_lidar(), 0.02, 12);
  const IcpResult nrec = icp_refine(noisy.points, dense, off);
  CHECK((nrec.pose.translation() - truth_pose.translation()).norm() < 0.01);
  CHECK(rotation_angle_deg(nrec.pose.rotation().transpose() * truth_pose.rotation()) < 0.5);
  CHECK(nrec.rms_m > 0.010);
  CHECK(nrec.rms_m < 0.022);
}

TEST_CASE("localize_lidar: single shot against the truth map") {
  const auto scene = sim::build_room(sim::RoomConfig{});
  const auto map = truth_map(scene);
  const DensePointCloud dense = densify_reference(map);

  const Pose truth_pose(rotation_from_euler_xyz(95, -40, 10), Vec3(1.2, 2.6, 1.4), "lidar",
                        "world");
  const auto scan = sim::render_lidar(scene, invert(truth_pose), wide_lidar(0.5), 0.02, 13);
  REQUIRE(scan.points.size() > 5000);

  // coarse prior: 20 degrees off the truth
  Rng rng(37);
  const Mat3 prior =
      rotation_about(testutil::random_unit(rng), deg2rad(20.0)) * truth_pose.rotation();
  const LidarLocalization loc = localize_lidar(scan.points, map, dense, prior);
  CHECK((loc.pose.translation() - truth_pose.translation()).norm() < 0.01);
  CHECK(rotation_angle_deg(loc.pose.rotation().transpose() * truth_pose.rotation()) < 0.5);
  CHECK(loc.rms_m < 0.022);
  CHECK(loc.scan_planes >= 3);

  // prior-free localization still lands on a plane-consistent pose
  const LidarLocalization free = localize_lidar(scan.points, map, dense, std::nullopt);
  CHECK(free.rms_m < 0.022);
}

TEST_CASE("localize_lidar: rough corner pose is within the ICP basin") {
  const auto scene = sim::build_room(sim::RoomConfig{});
  const auto map = truth_map(scene);
  const DensePointCloud dense = densify_reference(map);

  const Pose truth_pose(rotation_from_euler_xyz(0, 0, 135), Vec3(2.0, 1.5, 1.0), "lidar",
                        "world");
  const auto scan = sim::render_lidar(scene, invert(truth_pose), wide_lidar(0.6), 0.02, 14);

  // corner-only solve (no ICP): extract scan planes and compare the best
  // prior-gated corner pose against the truth
  LidarLocParams params;
  params.icp.max_iters = 0;  // rough pose only
  const LidarLocalization rough =
      localize_lidar(scan.points, map, dense, truth_pose.rotation(), params);
  CHECK((rough.pose.translation() - truth_pose.translation()).norm() < 0.03);
  CHECK(rotation_angle_deg(rough.pose.rotation().transpose() * truth_pose.rotation()) < 2.0);
}
