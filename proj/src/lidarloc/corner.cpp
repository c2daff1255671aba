#include "panocal/lidarloc/corner.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "panocal/errors.hpp"

namespace panocal::lidarloc {

Corner extract_corner(const std::array<Plane, 3>& planes, const Vec3& interior_hint) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double c = std::abs(planes[i].normal.dot(planes[j].normal));
      if (rad2deg(std::acos(std::clamp(c, 0.0, 1.0))) <= 20.0) {
        throw NearParallelPlanes("extract_corner: normals within 20 deg");
      }
    }
  }
  Mat3 a;
  Vec3 b;
  for (int i = 0; i < 3; ++i) {
    a.row(i) = planes[i].normal.transpose();
    b(i) = planes[i].d;
  }
  const Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(0) > 1e3 * svd.singularValues()(2)) {
    throw NearParallelPlanes("extract_corner: normal matrix condition above 1e3");
  }
  Corner corner;
  corner.c = svd.solve(b);

  // line directions: pairwise plane intersections, interior-pointing
  Mat3 dirs;
  dirs.col(0) = planes[1].normal.cross(planes[2].normal).normalized();
  dirs.col(1) = planes[2].normal.cross(planes[0].normal).normalized();
  dirs.col(2) = planes[0].normal.cross(planes[1].normal).normalized();
  const Vec3 into = interior_hint - corner.c;
  for (int i = 0; i < 3; ++i) {
    if (dirs.col(i).dot(into) < 0) dirs.col(i) = -dirs.col(i);
  }
  if (dirs.determinant() < 0) dirs.col(1).swap(dirs.col(2));
  corner.directions = nearest_rotation(dirs);
  return corner;
}

Pose solve_pose_from_corner(const Corner& corner_world, const Corner& corner_lidar,
                            const std::string& lidar_frame, const std::string& world_frame) {
  const Mat3 m = corner_world.directions * corner_lidar.directions.transpose();
  if (m.determinant() < 0) {
    throw ImproperRotation("solve_pose_from_corner: det(S_W S_L^T) < 0");
  }
  const Mat3 r = nearest_rotation(m);
  return Pose(r, corner_world.c - r * corner_lidar.c, lidar_frame, world_frame);
}

}  // namespace panocal::lidarloc
