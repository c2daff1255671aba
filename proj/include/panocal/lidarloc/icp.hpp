#pragma once

#include <span>
#include <vector>

#include "panocal/geometry/pose.hpp"
#include "panocal/lidarloc/densify.hpp"

namespace panocal::lidarloc {

struct IcpParams {
  double max_corr = 0.10;      // m, correspondence rejection radius
  int max_iters = 50;
  double update_tol = 1e-6;    // pose update norm
  double voxel = 0.02;         // m, scan downsampling; 0 disables
  std::size_t max_points = 50000;
};

struct IcpResult {
  Pose pose;                       // map <- lidar
  double rms_m = 0;                // final point-to-plane RMS
  int iterations = 0;
  std::vector<double> rms_history; // per completed iteration, new correspondences
  bool converged = false;
};

/// Deterministic voxel-grid thinning (first point per cell, then stride cap).
std::vector<Vec3> downsample_scan(std::span<const Vec3> points, double voxel,
                                  std::size_t max_points);

/// Point-to-plane ICP of the scan against the densified reference. `init`
/// maps lidar coordinates into the reference (map) frame. Throws IcpDiverged
/// when the RMS rises three iterations in a row.
IcpResult icp_refine(std::span<const Vec3> scan_points, const DensePointCloud& reference,
                     const Pose& init, const IcpParams& params = {});

}  // namespace panocal::lidarloc
