#pragma once

#include <string>

#include "panocal/types.hpp"

namespace panocal {

/// Rigid transform between two named frames: p_to = R * p_from + t.
/// Frame labels are checked on composition; the rotation is kept orthonormal
/// (re-projected onto SO(3) when numeric drift exceeds 1e-9).
class Pose {
 public:
  Pose() : R_(Mat3::Identity()), t_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation, std::string from_frame,
       std::string to_frame);

  static Pose identity(const std::string& frame) {
    return Pose(Mat3::Identity(), Vec3::Zero(), frame, frame);
  }

  const Mat3& rotation() const { return R_; }
  const Vec3& translation() const { return t_; }
  const std::string& from_frame() const { return from_; }
  const std::string& to_frame() const { return to_; }

  Vec3 operator*(const Vec3& p) const { return R_ * p + t_; }

  Mat4 matrix() const;

  /// Same transform under different frame names.
  Pose relabeled(std::string from_frame, std::string to_frame) const {
    Pose p(*this);
    p.from_ = std::move(from_frame);
    p.to_ = std::move(to_frame);
    return p;
  }

 private:
  Mat3 R_;
  Vec3 t_;
  std::string from_, to_;
};

/// a: y->z, b: x->y  =>  x->z.  Throws FrameMismatch on label disagreement.
Pose compose(const Pose& a, const Pose& b);

Pose invert(const Pose& pose);

/// Frobenius-nearest rotation with det +1 (polar decomposition).
/// Throws SingularInput when the matrix has no full-rank polar factor.
Mat3 nearest_rotation(const Mat3& m);

/// Geodesic distance of R from the identity, degrees in [0, 180].
double rotation_angle_deg(const Mat3& rotation);

Mat3 rotation_about(const Vec3& unit_axis, double angle_rad);
Mat3 exp_so3(const Vec3& omega);
Mat3 skew(const Vec3& v);

/// XYZ-order Euler factorization, degrees: R = Rx(rx) * Ry(ry) * Rz(rz),
/// ry on the principal branch [-90, 90].
struct EulerXyz {
  double rx_deg = 0, ry_deg = 0, rz_deg = 0;
  bool gimbal_lock = false;  // |ry| within 1e-6 deg of 90
};

EulerXyz euler_xyz(const Mat3& rotation);
Mat3 rotation_from_euler_xyz(double rx_deg, double ry_deg, double rz_deg);

}  // namespace panocal
