#include "panocal/geometry/camera.hpp"

#include <cmath>
#include <string>

#include "panocal/errors.hpp"

namespace panocal {

void CameraIntrinsics::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("intrinsics: " + what); };
  if (!(fx > 0)) fail("fx must be > 0");
  if (!(fy > 0)) fail("fy must be > 0");
  if (width <= 0 || height <= 0) fail("width/height must be > 0");
  if (!(cx >= 0 && cx < width)) fail("cx must be in [0, width)");
  if (!(cy >= 0 && cy < height)) fail("cy must be in [0, height)");
}

double CameraIntrinsics::image_diagonal() const {
  return std::sqrt(double(width) * width + double(height) * height);
}

Vec2 distort_normalized(const CameraIntrinsics& k, const Vec2& xy) {
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k.k1 * r2 + k.k2 * r2 * r2;
  return Vec2(x * radial + 2.0 * k.p1 * x * y + k.p2 * (r2 + 2.0 * x * x),
              y * radial + k.p1 * (r2 + 2.0 * y * y) + 2.0 * k.p2 * x * y);
}

Eigen::Matrix2d distort_jacobian(const CameraIntrinsics& k, const Vec2& xy) {
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k.k1 * r2 + k.k2 * r2 * r2;
  const double dr = k.k1 + 2.0 * k.k2 * r2;  // d(radial)/d(r2)
  Eigen::Matrix2d j;
  j(0, 0) = radial + 2.0 * x * x * dr + 2.0 * k.p1 * y + 6.0 * k.p2 * x;
  j(0, 1) = 2.0 * x * y * dr + 2.0 * k.p1 * x + 2.0 * k.p2 * y;
  j(1, 0) = 2.0 * x * y * dr + 2.0 * k.p1 * x + 2.0 * k.p2 * y;
  j(1, 1) = radial + 2.0 * y * y * dr + 6.0 * k.p1 * y + 2.0 * k.p2 * x;
  return j;
}

Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& xy_distorted) {
  Vec2 xy = xy_distorted;
  const double tol = 1e-8 / std::max(k.fx, k.fy);  // 1e-8 px in normalized units
  for (int it = 0; it < 10; ++it) {
    const double x = xy.x(), y = xy.y();
    const double r2 = x * x + y * y;
    const double radial = 1.0 + k.k1 * r2 + k.k2 * r2 * r2;
    const Vec2 next((xy_distorted.x() - (2.0 * k.p1 * x * y + k.p2 * (r2 + 2.0 * x * x))) / radial,
                    (xy_distorted.y() - (k.p1 * (r2 + 2.0 * y * y) + 2.0 * k.p2 * x * y)) / radial);
    const double step = (next - xy).norm();
    xy = next;
    if (step < tol) break;
  }
  return xy;
}

Vec2 project_camera_point(const CameraIntrinsics& k, const Vec3& p_cam) {
  if (p_cam.z() <= 1e-9) {
    throw BehindCamera("projection depth " + std::to_string(p_cam.z()) + " m");
  }
  const Vec2 d = distort_normalized(k, Vec2(p_cam.x() / p_cam.z(), p_cam.y() / p_cam.z()));
  return Vec2(k.fx * d.x() + k.cx, k.fy * d.y() + k.cy);
}

Vec2 project(const CameraIntrinsics& k, const Vec3& p_world, const Pose& t_cam_world) {
  return project_camera_point(k, t_cam_world * p_world);
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& k, const Vec3& p_cam) {
  const double z = p_cam.z();
  const Vec2 ab(p_cam.x() / z, p_cam.y() / z);
  Eigen::Matrix<double, 2, 3> d_ab_dq;
  d_ab_dq << 1.0 / z, 0, -p_cam.x() / (z * z),
             0, 1.0 / z, -p_cam.y() / (z * z);
  return Eigen::Vector2d(k.fx, k.fy).asDiagonal() * distort_jacobian(k, ab) * d_ab_dq;
}

Vec3 pixel_to_bearing(const CameraIntrinsics& k, const Vec2& px) {
  const Vec2 xy = undistort_normalized(
      k, Vec2((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy));
  return Vec3(xy.x(), xy.y(), 1.0).normalized();
}

Vec3 backproject_at_depth(const CameraIntrinsics& k, const Vec2& px, double depth) {
  const Vec2 xy = undistort_normalized(
      k, Vec2((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy));
  return Vec3(xy.x() * depth, xy.y() * depth, depth);
}

}  // namespace panocal
