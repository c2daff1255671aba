#pragma once

#include "panocal/geometry/pose.hpp"
#include "panocal/types.hpp"

namespace panocal {

/// Pinhole model with Brown radial-tangential distortion (k1, k2, p1, p2).
struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  double k1 = 0, k2 = 0, p1 = 0, p2 = 0;
  int width = 0, height = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool in_image(const Vec2& px) const {
    return px.x() >= 0 && px.x() < width && px.y() >= 0 && px.y() < height;
  }

  double image_diagonal() const;
};

/// Distort ideal normalized coordinates (x/z, y/z).
Vec2 distort_normalized(const CameraIntrinsics& k, const Vec2& xy);

/// 2x2 Jacobian of distort_normalized at xy.
Eigen::Matrix2d distort_jacobian(const CameraIntrinsics& k, const Vec2& xy);

/// Invert the distortion by fixed-point iteration (10 iterations, 1e-8 px).
Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& xy_distorted);

/// Project a camera-frame point. Throws BehindCamera when depth <= 1e-9 m.
Vec2 project_camera_point(const CameraIntrinsics& k, const Vec3& p_cam);

/// Project a world point through T_cam_world (world -> camera).
Vec2 project(const CameraIntrinsics& k, const Vec3& p_world, const Pose& t_cam_world);

/// d(pixel) / d(camera-frame point) at p_cam, including distortion.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& k, const Vec3& p_cam);

/// Pixel -> unit bearing vector in the camera frame (undistorted).
Vec3 pixel_to_bearing(const CameraIntrinsics& k, const Vec2& px);

/// Camera-frame point at the given depth along the pixel's bearing.
Vec3 backproject_at_depth(const CameraIntrinsics& k, const Vec2& px, double depth);

}  // namespace panocal
