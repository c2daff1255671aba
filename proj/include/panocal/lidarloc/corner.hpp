#pragma once

#include <array>

#include "panocal/geometry/plane.hpp"
#include "panocal/geometry/pose.hpp"

namespace panocal::lidarloc {

/// Room corner: the intersection point of three walls plus the directions of
/// the three intersection lines, as an orthonormal right-handed triad
/// pointing into the room.
struct Corner {
  Vec3 c = Vec3::Zero();
  Mat3 directions = Mat3::Identity();  // columns s0, s1, s2

  Corner cycled(int shift) const {  // even permutation of the directions
    Corner out = *this;
    for (int i = 0; i < 3; ++i) out.directions.col(i) = directions.col((i + shift) % 3);
    return out;
  }
};

/// Intersect three planes into a corner. The interior hint fixes the +/-
/// sign of each line direction (c + eps*s must move toward the hint side).
/// Throws NearParallelPlanes when the normal matrix is ill-conditioned.
Corner extract_corner(const std::array<Plane, 3>& planes, const Vec3& interior_hint);

/// Closed-form pose from one corner correspondence:
/// R = S_W * S_L^T (projected to the nearest rotation), t = c_W - R c_L.
/// Returns the transform mapping lidar coordinates into the reference frame.
Pose solve_pose_from_corner(const Corner& corner_world, const Corner& corner_lidar,
                            const std::string& lidar_frame = "lidar",
                            const std::string& world_frame = "map");

}  // namespace panocal::lidarloc
