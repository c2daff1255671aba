#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "panocal/camloc/delaunay.hpp"
#include "panocal/camloc/triangles.hpp"
#include "panocal/geometry/solvers.hpp"

namespace panocal::camloc {

struct PnpParams {
  int n_rounds = 20;              // random 2D triangles tried
  double inlier_px = 3.0;         // scaled up for very high-resolution sensors
  double early_exit_ratio = 0.6;  // of the detection count
  int min_inliers = 8;
  std::uint64_t seed = 0;
  bool use_signature_prefilter = true;  // speed heuristic, off in oracle tests
  bool exhaustive = false;  // iterate every 2D triangle in order, no early exit
  double min_depth = 0.3, max_depth = 10.0;
  double hi_res_diagonal = 1600.0;
  // Optional camera-position plausibility box (min, max corners); the
  // pipeline sets it from the map bounds since sensors sit inside the room.
  std::optional<std::pair<Vec3, Vec3>> position_prior;
};

struct LocalizationResult {
  Pose pose;  // camera <- map
  std::vector<std::pair<int, int>> inliers;  // (detection index, map point index)
  int inlier_count = 0;
  double rms_px = 0;
  bool converged = true;
};

/// Effective pixel gate: inlier_px stretched by the image diagonal for
/// very high-resolution sensors.
double effective_inlier_px(const PnpParams& params, const CameraIntrinsics& k);

/// Canonical inlier predicate: project every map point, pair projections
/// with detections within inlier_px, claim greedily nearest-first,
/// one-to-one. Deterministic tie-breaking.
std::vector<std::pair<int, int>> reprojection_inliers(std::span<const Vec2> detections,
                                                      std::span<const Vec3> map_points,
                                                      const CameraIntrinsics& k,
                                                      const RigidTransform& cam_from_map,
                                                      double inlier_px);

double reprojection_rms_px(std::span<const Vec2> detections, std::span<const Vec3> map_points,
                           const CameraIntrinsics& k, const RigidTransform& cam_from_map,
                           std::span<const std::pair<int, int>> pairs);

/// Pose-only Levenberg-Marquardt on fixed detection<->map associations.
void refine_pose_lm(std::span<const Vec2> detections, std::span<const Vec3> map_points,
                    std::span<const std::pair<int, int>> pairs, const CameraIntrinsics& k,
                    RigidTransform& cam_from_map, int max_iters = 20);

/// Triangle-based PnP with RANSAC over 2D/3D triangle pairs (all six vertex
/// correspondences per pair). Throws LocalizationFailure below min_inliers.
LocalizationResult triangle_pnp(std::span<const Vec2> detections,
                                const std::vector<Triangle2D>& tri2d,
                                const std::vector<Triangle3D>& tri3d,
                                std::span<const Vec3> map_points, const CameraIntrinsics& k,
                                const PnpParams& params = {});

}  // namespace panocal::camloc
