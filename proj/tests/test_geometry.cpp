#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <array>
#include <vector>

#include "panocal/errors.hpp"
#include "panocal/geometry/camera.hpp"
#include "panocal/geometry/plane.hpp"
#include "panocal/geometry/pose.hpp"
#include "panocal/geometry/solvers.hpp"
#include "testutil.hpp"

using namespace panocal;
using testutil::random_pose;
using testutil::random_rigid;
using testutil::random_rotation;
using testutil::random_unit;
using testutil::survey_camera;

namespace {

// Independent orthonormalization route (Horn): the rotation maximizing
// trace(R^T M) from the dominant eigenvector of the 4x4 quaternion matrix.
Mat3 nearest_rotation_quaternion_oracle(const Mat3& m) {
  Eigen::Matrix4d k;
  const double sxx = m(0, 0), sxy = m(0, 1), sxz = m(0, 2);
  const double syx = m(1, 0), syy = m(1, 1), syz = m(1, 2);
  const double szx = m(2, 0), szy = m(2, 1), szz = m(2, 2);
  k << sxx + syy + szz, szy - syz, sxz - szx, syx - sxy,
       szy - syz, sxx - syy - szz, sxy + syx, szx + sxz,
       sxz - szx, sxy + syx, -sxx + syy - szz, syz + szy,
       syx - sxy, szx + sxz, syz + szy, -sxx - syy + szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k);
  Eigen::Vector4d q = es.eigenvectors().col(3);
  Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
  return quat.normalized().toRotationMatrix();
}

}  // namespace

TEST_CASE("pose: compose identity and inverse") {
  Rng rng(7);
  const Pose t = random_pose(rng, "a", "b");
  const Pose id_a = Pose::identity("a");

  const Pose ti = compose(t, id_a);
  CHECK((ti.rotation() - t.rotation()).norm() == doctest::Approx(0).epsilon(1e-15));
  CHECK((ti.translation() - t.translation()).norm() == doctest::Approx(0).epsilon(1e-15));

  const Pose round = compose(t, invert(t));
  CHECK((round.rotation() - Mat3::Identity()).norm() < 1e-12);
  CHECK(round.translation().norm() < 1e-12);
  CHECK(round.from_frame() == "b");
  CHECK(round.to_frame() == "b");
}

TEST_CASE("pose: compose matches 4x4 homogeneous product") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose a = random_pose(rng, "y", "z");
    const Pose b = random_pose(rng, "x", "y");
    const Pose c = compose(a, b);
    const Mat4 oracle = a.matrix() * b.matrix();
    CHECK((c.matrix() - oracle).norm() < 1e-12);
    CHECK(c.from_frame() == "x");
    CHECK(c.to_frame() == "z");
  }
}

TEST_CASE("pose: frame mismatch rejected") {
  Rng rng(3);
  const Pose a = random_pose(rng, "a", "b");
  const Pose b = random_pose(rng, "c", "d");
  CHECK_THROWS_AS((void)compose(a, b), FrameMismatch);
}

TEST_CASE("pose: double inversion is identity") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose t = random_pose(rng, "a", "b");
    const Pose tt = invert(invert(t));
    CHECK((tt.rotation() - t.rotation()).norm() < 1e-12);
    CHECK((tt.translation() - t.translation()).norm() < 1e-12);
  }
}

TEST_CASE("pose: constructor rejects non-rotations") {
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(Pose(bad, Vec3::Zero(), "a", "b"), InvalidRotation);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(Pose(reflection, Vec3::Zero(), "a", "b"), InvalidRotation);
}

TEST_CASE("project: principal point and hand-evaluated pinhole") {
  const CameraIntrinsics k = survey_camera();
  const Pose id = Pose::identity("world");

  const Vec2 axis = project(k, Vec3(0, 0, 1), id);
  CHECK(axis.x() == doctest::Approx(k.cx).epsilon(1e-12));
  CHECK(axis.y() == doctest::Approx(k.cy).epsilon(1e-12));

  const Vec2 off = project(k, Vec3(0.1, 0, 1), id);
  CHECK(off.x() == doctest::Approx(814.6).epsilon(1e-12));
  CHECK(off.y() == doctest::Approx(512.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)project(k, Vec3(0, 0, -1), id), BehindCamera);
}

TEST_CASE("project/backproject round trip") {
  Rng rng(13);
  const CameraIntrinsics plain = survey_camera(false);
  const CameraIntrinsics distorted = survey_camera(true);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 px(rng.uniform(40, plain.width - 40), rng.uniform(40, plain.height - 40));
    const double depth = rng.uniform(0.4, 8.0);

    const Vec2 back_plain = project_camera_point(plain, backproject_at_depth(plain, px, depth));
    CHECK((back_plain - px).norm() < 1e-9);

    const Vec2 back_dist =
        project_camera_point(distorted, backproject_at_depth(distorted, px, depth));
    CHECK((back_dist - px).norm() < 1e-6);
  }
}

TEST_CASE("rigid_fit: identity and exact recovery") {
  Rng rng(17);
  std::vector<Vec3> src;
  for (int i = 0; i < 12; ++i)
    src.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));

  const RigidTransform same = rigid_fit(src, src);
  CHECK((same.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(same.translation.norm() < 1e-12);

  for (int trial = 0; trial < 30; ++trial) {
    const RigidTransform truth = random_rigid(rng, 2.0);
    std::vector<Vec3> dst;
    for (const Vec3& p : src) dst.push_back(truth * p);
    const RigidTransform fit = rigid_fit(src, dst);
    CHECK((fit.rotation - truth.rotation).norm() < 1e-10);
    CHECK((fit.translation - truth.translation).norm() < 1e-10);
  }
}

TEST_CASE("rigid_fit: 1 mm noise over 100 points recovers translation to 1 mm") {
  Rng rng(19);
  std::vector<Vec3> src;
  for (int i = 0; i < 100; ++i)
    src.emplace_back(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
  const RigidTransform truth = random_rigid(rng, 1.0);
  std::vector<Vec3> dst;
  for (const Vec3& p : src) dst.push_back(truth * p + rng.gaussian3(1e-3));
  const RigidTransform fit = rigid_fit(src, dst);
  CHECK((fit.translation - truth.translation).norm() < 1e-3);
}

TEST_CASE("rigid_fit: collinear input rejected") {
  std::vector<Vec3> src, dst;
  for (int i = 0; i < 5; ++i) {
    src.emplace_back(i * 0.1, 0, 0);
    dst.emplace_back(i * 0.1, 1, 0);
  }
  CHECK_THROWS_AS((void)rigid_fit(src, dst), DegenerateConfiguration);
}

TEST_CASE("rigid_fit: equivariance under a common rigid transform") {
  Rng rng(23);
  std::vector<Vec3> src;
  for (int i = 0; i < 15; ++i)
    src.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  const RigidTransform truth = random_rigid(rng);
  std::vector<Vec3> dst;
  for (const Vec3& p : src) dst.push_back(truth * p + rng.gaussian3(2e-3));

  const RigidTransform a = random_rigid(rng);
  std::vector<Vec3> src_a, dst_a;
  for (const Vec3& p : src) src_a.push_back(a * p);
  for (const Vec3& p : dst) dst_a.push_back(a * p);

  const RigidTransform base = rigid_fit(src, dst);
  const RigidTransform moved = rigid_fit(src_a, dst_a);
  const RigidTransform expected = a * base * a.inverse();
  CHECK((moved.rotation - expected.rotation).norm() < 1e-10);
  CHECK((moved.translation - expected.translation).norm() < 1e-10);
}

TEST_CASE("triangulate_stereo: render then triangulate, 12.09 cm baseline") {
  const CameraIntrinsics k = survey_camera(true);
  const Pose t_right_left(Mat3::Identity(), Vec3(-0.1209, 0, 0), "left", "right");
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 p(rng.uniform(-0.8, 0.8), rng.uniform(-0.6, 0.6), rng.uniform(0.8, 4.0));
    const Vec2 pl = project_camera_point(k, p);
    const Vec2 pr = project_camera_point(k, to_rigid(t_right_left) * p);
    if (!k.in_image(pl) || !k.in_image(pr)) continue;
    const Vec3 rec = triangulate_stereo(pl, pr, k, k, t_right_left);
    CHECK((rec - p).norm() < 1e-9);
  }
}

TEST_CASE("triangulate_stereo: zero baseline degenerates") {
  const CameraIntrinsics k = survey_camera();
  const Pose identity_rel = Pose::identity("left").relabeled("left", "right");
  CHECK_THROWS_AS((void)triangulate_stereo(Vec2(700, 300), Vec2(700, 300), k, k, identity_rel),
                  DivergentRays);
}

TEST_CASE("triangulate_stereo: 0.2 px noise at 2 m gives < 1 cm depth error") {
  const CameraIntrinsics k = survey_camera();
  const Pose t_right_left(Mat3::Identity(), Vec3(-0.1209, 0, 0), "left", "right");
  Rng rng(31);
  double sum_sq = 0;
  int n = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 p(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 2.0);
    const Vec2 pl = project_camera_point(k, p) + Vec2(rng.gaussian(0.2), rng.gaussian(0.2));
    const Vec2 pr = project_camera_point(k, to_rigid(t_right_left) * p) +
                    Vec2(rng.gaussian(0.2), rng.gaussian(0.2));
    const Vec3 rec = triangulate_stereo(pl, pr, k, k, t_right_left);
    sum_sq += (rec.z() - p.z()) * (rec.z() - p.z());
    ++n;
  }
  CHECK(n > 400);
  CHECK(std::sqrt(sum_sq / n) < 0.01);
}

TEST_CASE("solve_p3p: render then solve recovers the pose") {
  const CameraIntrinsics k = survey_camera();
  Rng rng(37);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const RigidTransform cam_from_world = random_rigid(rng, 0.5);
    // Three world points in front of the camera with a well-spread triangle.
    const RigidTransform world_from_cam = cam_from_world.inverse();
    std::array<Vec3, 3> pts;
    std::array<Vec2, 3> pix;
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      const Vec3 p_cam(rng.uniform(-0.7, 0.7), rng.uniform(-0.5, 0.5), rng.uniform(1.2, 4.0));
      pts[i] = world_from_cam * p_cam;
      try {
        pix[i] = project_camera_point(k, p_cam);
      } catch (const BehindCamera&) {
        ok = false;
      }
    }
    if (!ok) continue;
    const double area = ((pts[1] - pts[0]).cross(pts[2] - pts[0])).norm();
    if (area < 0.1) continue;

    const auto sols = solve_p3p(pix, pts, k);
    CHECK(sols.size() >= 1);
    CHECK(sols.size() <= 4);
    double best_rot = 1e9, best_t = 1e9;
    for (const auto& s : sols) {
      best_rot = std::min(best_rot,
                          deg2rad(rotation_angle_deg(s.rotation.transpose() * cam_from_world.rotation)));
      best_t = std::min(best_t, (s.translation - cam_from_world.translation).norm());
      // solution-set closure: every returned pose reprojects and has positive depths
      for (int i = 0; i < 3; ++i) {
        const Vec3 q = s * pts[i];
        CHECK(q.z() > 0);
        CHECK((project_camera_point(k, q) - pix[i]).norm() <= 1e-6);
      }
    }
    CHECK(best_rot < 1e-8);
    CHECK(best_t < 1e-9);
    ++solved;
  }
  CHECK(solved >= 50);
}

TEST_CASE("solve_p3p: collinear points rejected") {
  const CameraIntrinsics k = survey_camera();
  const std::array<Vec3, 3> pts = {Vec3(0, 0, 2), Vec3(0.1, 0, 2), Vec3(0.2, 0, 2)};
  const std::array<Vec2, 3> pix = {Vec2(640, 512), Vec2(700, 512), Vec2(760, 512)};
  CHECK_THROWS_AS((void)solve_p3p(pix, pts, k), DegenerateConfiguration);
}

TEST_CASE("solve_p3p: symmetric equilateral configuration") {
  const CameraIntrinsics k = survey_camera();
  // Equilateral triangle centered on the optical axis, viewed head-on.
  const double r = 0.4;
  std::array<Vec3, 3> pts;
  for (int i = 0; i < 3; ++i) {
    const double th = 2.0 * kPi * i / 3.0;
    pts[i] = Vec3(r * std::cos(th), r * std::sin(th), 2.0);
  }
  std::array<Vec2, 3> pix;
  for (int i = 0; i < 3; ++i) pix[i] = project_camera_point(k, pts[i]);
  const auto sols = solve_p3p(pix, pts, k);
  CHECK(sols.size() >= 1);
  CHECK(sols.size() <= 4);
  for (const auto& s : sols) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 q = s * pts[i];
      CHECK(q.z() > 0);
      CHECK((project_camera_point(k, q) - pix[i]).norm() <= 1e-6);
    }
  }
}

TEST_CASE("nearest_rotation: fixed point, perturbation, reflection repair") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Mat3 r = random_rotation(rng);
    CHECK((nearest_rotation(r) - r).norm() < 1e-12);

    Mat3 perturbed = r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) perturbed(i, j) += rng.uniform(-1e-3, 1e-3);
    const Mat3 fixed = nearest_rotation(perturbed);
    CHECK((fixed.transpose() * fixed - Mat3::Identity()).norm() < 1e-12);
    CHECK(fixed.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((fixed - perturbed).norm() < 2e-3);
    CHECK((fixed - nearest_rotation_quaternion_oracle(perturbed)).norm() < 1e-9);
  }

  // det < 0 input maps to the nearest proper rotation (distinct singular
  // values keep the minimizer unique)
  Mat3 mirrored = random_rotation(rng);
  mirrored.col(0) *= 1.05;
  mirrored.col(1) *= 0.97;
  mirrored.col(2) *= -0.9;
  const Mat3 repaired = nearest_rotation(mirrored);
  CHECK(repaired.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((repaired - nearest_rotation_quaternion_oracle(mirrored)).norm() < 1e-9);

  CHECK_THROWS_AS((void)nearest_rotation(Mat3::Zero()), SingularInput);
}

TEST_CASE("euler_xyz: identity, paper angles, random round trip") {
  const EulerXyz id = euler_xyz(Mat3::Identity());
  CHECK(id.rx_deg == doctest::Approx(0).epsilon(1e-12));
  CHECK(id.ry_deg == doctest::Approx(0).epsilon(1e-12));
  CHECK(id.rz_deg == doctest::Approx(0).epsilon(1e-12));
  CHECK_FALSE(id.gimbal_lock);

  const Mat3 robot = rotation_from_euler_xyz(90, -45, 0);
  const EulerXyz e = euler_xyz(robot);
  CHECK(e.rx_deg == doctest::Approx(90).epsilon(1e-9));
  CHECK(e.ry_deg == doctest::Approx(-45).epsilon(1e-9));
  CHECK(e.rz_deg == doctest::Approx(0).epsilon(1e-9));

  Rng rng(43);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double ry = rng.uniform(-89, 89);
    const Mat3 r = rotation_from_euler_xyz(rng.uniform(-180, 180), ry, rng.uniform(-180, 180));
    const EulerXyz dec = euler_xyz(r);
    CHECK(std::abs(dec.ry_deg) <= 90.0);
    const Mat3 rec = rotation_from_euler_xyz(dec.rx_deg, dec.ry_deg, dec.rz_deg);
    worst = std::max(worst, (rec - r).norm());
  }
  CHECK(worst < 1e-9);

  const EulerXyz locked = euler_xyz(rotation_from_euler_xyz(10, 90, 20));
  CHECK(locked.gimbal_lock);
}

TEST_CASE("plane: lsq fit and ransac extraction") {
  Rng rng(47);
  const Vec3 n = random_unit(rng);
  const double d = rng.uniform(-1, 1);
  const Vec3 u = n.cross(std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
  const Vec3 v = n.cross(u);

  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) {
    pts.push_back(d * n + rng.uniform(-1, 1) * u + rng.uniform(-1, 1) * v +
                  n * rng.gaussian(0.002));
  }
  const Plane fit = fit_plane_lsq(pts);
  CHECK(std::abs(std::abs(fit.normal.dot(n)) - 1.0) < 1e-5);

  // add a second plane and outliers; sequential RANSAC should find both
  for (int i = 0; i < 400; ++i) {
    pts.push_back(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 2.0 + rng.gaussian(0.002)));
  }
  for (int i = 0; i < 50; ++i) {
    pts.push_back(Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)));
  }
  PlaneRansacParams params;
  params.dist_tol = 0.01;
  params.min_support = 100;
  params.seed = 5;
  const auto planes = extract_planes(pts, params);
  CHECK(planes.size() == 2);
  for (const auto& p : planes) CHECK(p.rms < 0.005);
}
