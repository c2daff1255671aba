#pragma once

#include <cstdint>
#include <vector>

#include "panocal/geometry/plane.hpp"
#include "panocal/types.hpp"

namespace panocal::sim {

/// Finite rectangle on a plane. The normal points into the room.
struct PlanePatch {
  Plane plane;
  Vec3 origin;           // one corner
  Vec3 u_axis, v_axis;   // in-plane unit axes
  double u_len = 0, v_len = 0;

  Vec3 point_at(double u, double v) const { return origin + u * u_axis + v * v_axis; }
  bool contains(const Vec3& p, double edge_tol = 1e-9) const;
};

struct Marker {
  Vec3 position;  // world frame
  int plane = -1; // owning patch index
};

/// Ground-truth synthetic room: floor + four walls, ceiling open.
struct SceneTruth {
  Vec3 room_size = Vec3::Zero();  // x, y, z extents; floor at z = 0
  std::vector<PlanePatch> planes;
  std::vector<Marker> markers;
  std::uint64_t seed = 0;

  Vec3 interior_centroid() const { return 0.5 * room_size; }

  /// Re-checks the type invariants (markers on-plane, pairwise spacing).
  void validate(double min_spacing = 0.0) const;
};

struct RoomConfig {
  Vec3 room_size = Vec3(3.0, 4.0, 2.5);
  int marker_count = 340;
  double min_spacing = 0.05;   // m
  double edge_margin = 0.06;   // keep markers off patch borders
  std::uint64_t seed = 42;
};

/// Markers uniformly sampled over the five patches with spacing rejection.
/// Identical seeds give bit-identical scenes. Throws PackingFailure when the
/// attempt budget (10 x marker_count) runs out.
SceneTruth build_room(const RoomConfig& config);

}  // namespace panocal::sim
