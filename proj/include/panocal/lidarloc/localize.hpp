#pragma once

#include <optional>
#include <span>

#include "panocal/lidarloc/corner.hpp"
#include "panocal/lidarloc/icp.hpp"

namespace panocal::lidarloc {

struct LidarLocParams {
  PlaneRansacParams plane_ransac{.dist_tol = 0.05, .min_support = 300, .max_planes = 8,
                                 .iterations = 250, .seed = 1};
  double prior_max_rot_deg = 60.0;   // gate around the coarse prior (spec: +/-45)
  double position_margin = 0.75;     // m around the map bounds
  double rough_corr = 0.20;          // m, rough-scoring correspondence radius
  int rough_samples = 2000;
  IcpParams icp;
};

struct LidarLocalization {
  Pose pose;           // map <- lidar
  double rms_m = 0;
  int icp_iterations = 0;
  bool converged = false;
  Corner corner_map, corner_scan;  // the chosen correspondence
  int scan_planes = 0;
};

/// Single-shot LiDAR localization: plane extraction, corner matching under
/// the coarse orientation prior (nullopt = no prior, best rough score wins),
/// closed-form pose, point-to-plane ICP against the densified reference.
LidarLocalization localize_lidar(std::span<const Vec3> scan_points,
                                 const recon::MarkerMap& map,
                                 const DensePointCloud& reference,
                                 const std::optional<Mat3>& coarse_rotation,
                                 const LidarLocParams& params = {});

}  // namespace panocal::lidarloc
