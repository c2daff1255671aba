#pragma once

#include <span>
#include <vector>

#include "panocal/geometry/camera.hpp"
#include "panocal/geometry/pose.hpp"
#include "panocal/types.hpp"

namespace panocal {

/// Unlabeled rigid transform, the working currency inside solvers.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  Pose as_pose(std::string from, std::string to) const {
    return Pose(rotation, translation, std::move(from), std::move(to));
  }
};

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

inline RigidTransform to_rigid(const Pose& p) { return {p.rotation(), p.translation()}; }

/// Least-squares rotation+translation with dst_i ~ R * src_i + t (SVD closed
/// form, reflection branch rejected). Requires >= 3 non-collinear points.
RigidTransform rigid_fit(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Midpoint-of-rays stereo triangulation; result in the left camera frame.
/// t_right_left maps left-frame points into the right camera frame.
Vec3 triangulate_stereo(const Vec2& pixel_left, const Vec2& pixel_right,
                        const CameraIntrinsics& k_left, const CameraIntrinsics& k_right,
                        const Pose& t_right_left, double epipolar_tol_px = 2.0);

/// Epipolar residual of an undistorted correspondence, in pixels.
double epipolar_residual_px(const Vec2& pixel_left, const Vec2& pixel_right,
                            const CameraIntrinsics& k_left, const CameraIntrinsics& k_right,
                            const Pose& t_right_left);

/// Minimal three-point pose: returns all camera-from-world candidates (<= 4)
/// whose reprojection of the three points is within 1e-6 px. Pixels are
/// undistorted internally.
std::vector<RigidTransform> solve_p3p(const std::array<Vec2, 3>& pixels,
                                      const std::array<Vec3, 3>& points,
                                      const CameraIntrinsics& k);

/// Core distance-based P3P on unit bearing vectors. Candidates carry
/// positive depths and bearing-aligned reprojection; no pixel-domain
/// polish (callers needing the 1e-6 px contract use solve_p3p).
std::vector<RigidTransform> solve_p3p_bearings(const std::array<Vec3, 3>& bearings,
                                               const std::array<Vec3, 3>& points);

}  // namespace panocal
