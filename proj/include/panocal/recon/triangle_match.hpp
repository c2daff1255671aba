#pragma once

#include <span>
#include <utility>
#include <vector>

#include "panocal/geometry/solvers.hpp"

namespace panocal::recon {

struct TriangleMatchParams {
  double edge_tol = 0.01;    // m, per-edge signature gate
  double inlier_tol = 0.02;  // m, consensus distance
  double max_edge = 1.5;     // m, triangle enumeration cap for local points
};

struct TriangleMatch {
  RigidTransform transform;  // maps src coordinates into dst coordinates
  std::vector<std::pair<int, int>> inliers;  // (src index, dst index)
};

/// Triangle-signature RANSAC between two 3D point sets: enumerate triangles,
/// pair them by edge lengths within edge_tol, fit a rigid transform per
/// candidate and keep the one with the largest greedy one-to-one consensus.
/// Throws NoConsensus when fewer than 3 points agree.
TriangleMatch match_triangles(std::span<const Vec3> src, std::span<const Vec3> dst,
                              const TriangleMatchParams& params = {});

/// The consensus scoring used by match_triangles, exposed so callers and
/// tests share one inlier definition: greedy nearest-first one-to-one
/// assignment of transformed src points to dst points within inlier_tol.
std::vector<std::pair<int, int>> consensus_pairs(std::span<const Vec3> src,
                                                 std::span<const Vec3> dst,
                                                 const RigidTransform& transform,
                                                 double inlier_tol);

}  // namespace panocal::recon
