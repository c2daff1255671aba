#include "panocal/geometry/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "panocal/errors.hpp"

namespace panocal {

namespace {

Vec3 centroid(std::span<const Vec3> pts) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

// Second singular value of the centered point matrix; ~0 for collinear sets.
double spread_2nd(std::span<const Vec3> pts, const Vec3& c) {
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  return std::sqrt(std::max(0.0, es.eigenvalues()(1)));
}

}  // namespace

RigidTransform rigid_fit(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size() || src.size() < 3) {
    throw DegenerateConfiguration("rigid_fit: need >= 3 paired points");
  }
  const Vec3 cs = centroid(src), cd = centroid(dst);
  if (spread_2nd(src, cs) < 1e-9 || spread_2nd(dst, cd) < 1e-9) {
    throw DegenerateConfiguration("rigid_fit: collinear points");
  }
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += (src[i] - cs) * (dst[i] - cd).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  return {r, cd - r * cs};
}

double epipolar_residual_px(const Vec2& pixel_left, const Vec2& pixel_right,
                            const CameraIntrinsics& k_left, const CameraIntrinsics& k_right,
                            const Pose& t_right_left) {
  const Vec3 xl = pixel_to_bearing(k_left, pixel_left);
  const Vec3 xr = pixel_to_bearing(k_right, pixel_right);
  const Mat3 essential = skew(t_right_left.translation()) * t_right_left.rotation();
  // Epipolar line of xl on the right normalized plane, homogeneous coords.
  const Vec3 line = essential * (xl / xl.z());
  const Vec3 xrh = xr / xr.z();
  const double denom = std::hypot(line.x(), line.y());
  if (denom < 1e-15) return 0.0;
  return std::abs(xrh.dot(line)) / denom * 0.5 * (k_right.fx + k_right.fy);
}

Vec3 triangulate_stereo(const Vec2& pixel_left, const Vec2& pixel_right,
                        const CameraIntrinsics& k_left, const CameraIntrinsics& k_right,
                        const Pose& t_right_left, double epipolar_tol_px) {
  const double epi = epipolar_residual_px(pixel_left, pixel_right, k_left, k_right, t_right_left);
  if (epi > epipolar_tol_px) {
    throw EpipolarViolation("epipolar residual " + std::to_string(epi) + " px");
  }
  const Vec3 dl = pixel_to_bearing(k_left, pixel_left);
  const RigidTransform left_from_right = to_rigid(invert(t_right_left));
  const Vec3 origin_r = left_from_right.translation;
  const Vec3 dr = left_from_right.rotation * pixel_to_bearing(k_right, pixel_right);

  const double cos_angle = std::clamp(dl.dot(dr), -1.0, 1.0);
  if (rad2deg(std::acos(cos_angle)) < 0.05) {
    throw DivergentRays("ray angle below 0.05 deg");
  }
  // Closest points on the two rays, then their midpoint.
  const double b1 = dl.dot(origin_r);
  const double b2 = dr.dot(origin_r);
  const double den = 1.0 - cos_angle * cos_angle;
  const double s = (b1 - cos_angle * b2) / den;
  const double u = (cos_angle * b1 - b2) / den;
  const Vec3 p = 0.5 * (s * dl + (origin_r + u * dr));

  if (p.z() <= 1e-9) throw BehindCamera("triangulated point behind left camera");
  const Vec3 p_right = to_rigid(t_right_left) * p;
  if (p_right.z() <= 1e-9) throw BehindCamera("triangulated point behind right camera");
  return p;
}

namespace {

// Real roots of a quartic (descending coefficients) via the companion matrix,
// polished by a few Newton steps.
std::vector<double> quartic_real_roots(const std::array<double, 5>& c) {
  std::vector<double> roots;
  if (std::abs(c[0]) < 1e-14 * std::max({std::abs(c[1]), std::abs(c[2]), std::abs(c[3]),
                                         std::abs(c[4]), 1.0})) {
    return roots;  // degenerate leading coefficient: treat as no admissible root
  }
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -c[4 - i] / c[0];
  const Eigen::EigenSolver<Eigen::Matrix4d> es(companion);
  auto eval = [&c](double x, double& f, double& df) {
    f = (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
    df = ((4 * c[0] * x + 3 * c[1]) * x + 2 * c[2]) * x + c[3];
  };
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z.real()))) continue;
    double x = z.real(), f, df;
    for (int it = 0; it < 5; ++it) {
      eval(x, f, df);
      if (std::abs(df) < 1e-30) break;
      const double step = f / df;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

bool near_duplicate(const RigidTransform& a, const RigidTransform& b) {
  return rotation_angle_deg(a.rotation.transpose() * b.rotation) < 1e-7 &&
         (a.translation - b.translation).norm() < 1e-8;
}

// Exactly-determined Gauss-Newton on the three reprojection residuals;
// sharpens the quartic-root pose to machine precision.
void polish_p3p_pose(const std::array<Vec2, 3>& pixels, const std::array<Vec3, 3>& points,
                     const CameraIntrinsics& k, RigidTransform& pose) {
  for (int it = 0; it < 3; ++it) {
    Eigen::Matrix<double, 6, 6> jac;
    Eigen::Matrix<double, 6, 1> res;
    for (int i = 0; i < 3; ++i) {
      const Vec3 q = pose * points[i];
      if (q.z() <= 1e-9) return;
      res.segment<2>(2 * i) = project_camera_point(k, q) - pixels[i];
      // q(delta) = exp(delta_theta) * (R p + t) + delta_rho
      const Eigen::Matrix<double, 2, 3> d_px_dq = projection_jacobian(k, q);
      jac.block<2, 3>(2 * i, 0) = d_px_dq;
      jac.block<2, 3>(2 * i, 3) = -d_px_dq * skew(q);
    }
    const Eigen::Matrix<double, 6, 1> delta = jac.fullPivLu().solve(-res);
    if (!delta.allFinite()) return;
    const Mat3 dr = exp_so3(delta.tail<3>());
    pose.rotation = dr * pose.rotation;
    pose.translation = dr * pose.translation + delta.head<3>();
    if (delta.norm() < 1e-14) break;
  }
}

}  // namespace

std::vector<RigidTransform> solve_p3p_bearings(const std::array<Vec3, 3>& bearings,
                                               const std::array<Vec3, 3>& points) {
  const Vec3 p1 = points[0], p2 = points[1], p3 = points[2];
  const double area2 = ((p2 - p1).cross(p3 - p1)).norm();
  if (area2 < 1e-9) throw DegenerateConfiguration("solve_p3p: collinear 3D points");

  const Vec3& f1 = bearings[0];
  const Vec3& f2 = bearings[1];
  const Vec3& f3 = bearings[2];

  // Grunert's distance formulation: side lengths a,b,c opposite P1,P2,P3 and
  // the cosines of the inter-bearing angles.
  const double a = (p2 - p3).norm();
  const double b = (p1 - p3).norm();
  const double c = (p1 - p2).norm();
  const double cos_alpha = f2.dot(f3);
  const double cos_beta = f1.dot(f3);
  const double cos_gamma = f1.dot(f2);
  const double a2 = a * a, b2 = b * b, c2 = c * c;

  // With u = s2/s1, v = s3/s1:
  //   (i)  b^2 u^2 - 2 b^2 cos(alpha) u v + b^2 v^2 - a^2 (1 + v^2 - 2 v cos(beta)) = 0
  //   (ii) b^2 u^2 - 2 b^2 cos(gamma) u + b^2 - c^2 (1 + v^2 - 2 v cos(beta)) = 0
  // (i)-(ii) is linear in u: u = N(v) / D(v); substituting into (ii) gives a
  // quartic in v assembled here by coefficient convolution.
  // N(v) = b^2 (1 - v^2) + (a^2 - c^2)(1 + v^2 - 2 v cos(beta))
  const std::array<double, 3> nn = {-b2 + (a2 - c2),              // v^2
                                    -2.0 * (a2 - c2) * cos_beta,  // v
                                    b2 + (a2 - c2)};              // 1
  // D(v) = 2 b^2 (cos(gamma) - v cos(alpha))
  const std::array<double, 2> dd = {-2.0 * b2 * cos_alpha, 2.0 * b2 * cos_gamma};
  // Q(v) = b^2 - c^2 (1 + v^2 - 2 v cos(beta))
  const std::array<double, 3> qq = {-c2, 2.0 * c2 * cos_beta, b2 - c2};

  std::array<double, 5> quartic{};  // b^2 N^2 - 2 b^2 cos(gamma) N D + Q D^2
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) quartic[i + j] += b2 * nn[i] * nn[j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) quartic[i + j + 1] += -2.0 * b2 * cos_gamma * nn[i] * dd[j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) quartic[i + j + l] += qq[i] * dd[j] * dd[l];

  std::vector<RigidTransform> solutions;
  auto try_candidate = [&](double u, double v) {
    if (!(u > 0) || !(v > 0)) return;
    const double s1_sq = b2 / (1.0 + v * v - 2.0 * v * cos_beta);
    if (!(s1_sq > 0)) return;
    const double s1 = std::sqrt(s1_sq);
    const std::array<Vec3, 3> cam_pts = {s1 * f1, u * s1 * f2, v * s1 * f3};
    RigidTransform pose;
    try {
      pose = rigid_fit(std::span<const Vec3>(points), std::span<const Vec3>(cam_pts));
    } catch (const DegenerateConfiguration&) {
      return;
    }
    // Admissibility: positive depths and bearing-aligned reprojection
    // (loose gate; the pixel-domain contract is enforced by solve_p3p).
    for (int i = 0; i < 3; ++i) {
      const Vec3 q = pose * points[i];
      if (q.z() <= 1e-9) return;
      if (q.normalized().cross(bearings[i]).norm() > 1e-4) return;
    }
    for (const RigidTransform& s : solutions) {
      if (near_duplicate(s, pose)) return;
    }
    solutions.push_back(pose);
  };

  for (double v : quartic_real_roots(quartic)) {
    const double den = dd[0] * v + dd[1];
    const double num = (nn[0] * v + nn[1]) * v + nn[2];
    if (std::abs(den) > 1e-12 * std::max(1.0, std::abs(num))) {
      try_candidate(num / den, v);
    } else {
      // D(v) ~ 0: recover u from the quadratic (ii) directly.
      const double qv = (qq[0] * v + qq[1]) * v + qq[2];
      const double disc = b2 * b2 * cos_gamma * cos_gamma - b2 * qv;
      if (disc < 0) continue;
      const double sq = std::sqrt(disc);
      try_candidate((b2 * cos_gamma + sq) / b2, v);
      try_candidate((b2 * cos_gamma - sq) / b2, v);
    }
  }
  return solutions;
}

std::vector<RigidTransform> solve_p3p(const std::array<Vec2, 3>& pixels,
                                      const std::array<Vec3, 3>& points,
                                      const CameraIntrinsics& k) {
  const std::array<Vec3, 3> bearings = {pixel_to_bearing(k, pixels[0]),
                                        pixel_to_bearing(k, pixels[1]),
                                        pixel_to_bearing(k, pixels[2])};
  std::vector<RigidTransform> solutions;
  for (RigidTransform pose : solve_p3p_bearings(bearings, points)) {
    polish_p3p_pose(pixels, points, k, pose);
    bool admissible = true;
    for (int i = 0; i < 3 && admissible; ++i) {
      const Vec3 q = pose * points[i];
      if (q.z() <= 1e-9) {
        admissible = false;
        break;
      }
      try {
        admissible = (project_camera_point(k, q) - pixels[i]).norm() <= 1e-6;
      } catch (const BehindCamera&) {
        admissible = false;
      }
    }
    if (!admissible) continue;
    bool dup = false;
    for (const RigidTransform& s : solutions) dup = dup || near_duplicate(s, pose);
    if (!dup) solutions.push_back(pose);
  }
  if (solutions.empty()) throw NoSolution("solve_p3p: no admissible real root");
  return solutions;
}

}  // namespace panocal
