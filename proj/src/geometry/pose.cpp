#include "panocal/geometry/pose.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "panocal/errors.hpp"

namespace panocal {

namespace {

double orthonormality_drift(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).norm();
}

}  // namespace

Pose::Pose(const Mat3& rotation, const Vec3& translation, std::string from_frame,
           std::string to_frame)
    : R_(rotation), t_(translation), from_(std::move(from_frame)), to_(std::move(to_frame)) {
  const double drift = orthonormality_drift(R_);
  if (drift > 1e-6 || R_.determinant() < 0.0) {
    throw InvalidRotation("Pose rotation is not a proper rotation (drift " +
                          std::to_string(drift) + ", det " +
                          std::to_string(R_.determinant()) + ")");
  }
  if (drift > 1e-9) R_ = nearest_rotation(R_);
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R_;
  m.topRightCorner<3, 1>() = t_;
  return m;
}

Pose compose(const Pose& a, const Pose& b) {
  if (a.from_frame() != b.to_frame()) {
    throw FrameMismatch("compose: '" + a.from_frame() + "' <- does not meet -> '" +
                        b.to_frame() + "'");
  }
  Mat3 r = a.rotation() * b.rotation();
  if (orthonormality_drift(r) > 1e-9) r = nearest_rotation(r);
  return Pose(r, a.rotation() * b.translation() + a.translation(), b.from_frame(),
              a.to_frame());
}

Pose invert(const Pose& pose) {
  const Mat3 rt = pose.rotation().transpose();
  return Pose(rt, -(rt * pose.translation()), pose.to_frame(), pose.from_frame());
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(2) < 1e-12 * std::max(1.0, svd.singularValues()(0))) {
    throw SingularInput("nearest_rotation: rank-deficient input");
  }
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

double rotation_angle_deg(const Mat3& rotation) {
  // Quaternion extraction resolves small angles far below the acos(trace)
  // precision floor of ~sqrt(eps).
  const Eigen::Quaterniond q(rotation);
  return rad2deg(2.0 * std::atan2(q.vec().norm(), std::abs(q.w())));
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Mat3 rotation_about(const Vec3& unit_axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, unit_axis).toRotationMatrix();
}

Mat3 exp_so3(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) return Mat3::Identity() + skew(omega);
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

EulerXyz euler_xyz(const Mat3& r) {
  EulerXyz e;
  const double sy = std::clamp(r(0, 2), -1.0, 1.0);
  e.ry_deg = rad2deg(std::asin(sy));
  const double cy = std::sqrt(std::max(0.0, 1.0 - sy * sy));
  if (90.0 - std::abs(e.ry_deg) < 1e-6) {
    e.gimbal_lock = true;
    // rx and rz are coupled; put the whole twist into rx.
    e.rz_deg = 0.0;
    e.rx_deg = rad2deg(std::atan2(r(2, 1), r(1, 1)));
  } else {
    e.rx_deg = rad2deg(std::atan2(-r(1, 2), r(2, 2)));
    e.rz_deg = rad2deg(std::atan2(-r(0, 1), r(0, 0)));
  }
  (void)cy;
  return e;
}

Mat3 rotation_from_euler_xyz(double rx_deg, double ry_deg, double rz_deg) {
  return rotation_about(Vec3::UnitX(), deg2rad(rx_deg)) *
         rotation_about(Vec3::UnitY(), deg2rad(ry_deg)) *
         rotation_about(Vec3::UnitZ(), deg2rad(rz_deg));
}

}  // namespace panocal
