#include "panocal/lidarloc/localize.hpp"

#include <algorithm>
#include <cmath>

#include "panocal/errors.hpp"
#include "panocal/geometry/solvers.hpp"

namespace panocal::lidarloc {

namespace {

struct CornerSet {
  std::vector<Corner> corners;
};

CornerSet enumerate_corners(std::span<const Plane> planes, const Vec3& interior_hint) {
  CornerSet set;
  const int n = static_cast<int>(planes.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        try {
          set.corners.push_back(extract_corner({planes[i], planes[j], planes[k]},
                                               interior_hint));
        } catch (const NearParallelPlanes&) {
        }
      }
    }
  }
  return set;
}

struct RoughScore {
  double matched_fraction = 0;
  double rms = 1e9;
};

RoughScore rough_score(std::span<const Vec3> sample, const DensePointCloud& reference,
                       const RigidTransform& pose, double corr) {
  RoughScore score;
  double sq = 0;
  long matched = 0;
  for (const Vec3& p : sample) {
    const DenseNeighbor nn = nearest_dense(reference, pose * p, corr);
    if (nn.plane < 0) continue;
    sq += nn.distance * nn.distance;
    ++matched;
  }
  if (!sample.empty()) score.matched_fraction = static_cast<double>(matched) / sample.size();
  if (matched > 0) score.rms = std::sqrt(sq / matched);
  return score;
}

}  // namespace

LidarLocalization localize_lidar(std::span<const Vec3> scan_points,
                                 const recon::MarkerMap& map,
                                 const DensePointCloud& reference,
                                 const std::optional<Mat3>& coarse_rotation,
                                 const LidarLocParams& params) {
  if (map.planes.empty()) throw NoPlanes("localize_lidar: map has no fitted planes");
  const std::vector<Vec3> scan =
      downsample_scan(scan_points, params.icp.voxel, params.icp.max_points);
  if (scan.size() < static_cast<std::size_t>(params.plane_ransac.min_support)) {
    throw LocalizationFailure("localize_lidar: scan too small");
  }

  // scene planes in the scan, oriented toward the sensor
  PlaneRansacParams ransac = params.plane_ransac;
  std::vector<FittedPlane> scan_planes = extract_planes(scan, ransac);
  std::vector<Plane> scan_plane_list;
  for (auto& fp : scan_planes) scan_plane_list.push_back(fp.plane.oriented_toward(Vec3::Zero()));
  if (scan_plane_list.size() < 3) {
    throw LocalizationFailure("localize_lidar: fewer than 3 planes in the scan");
  }

  std::vector<Plane> map_plane_list;
  Vec3 map_centroid = Vec3::Zero();
  for (const Vec3& p : map.points) map_centroid += p;
  map_centroid /= static_cast<double>(map.points.size());
  for (const auto& fp : map.planes) map_plane_list.push_back(fp.plane.oriented_toward(map_centroid));

  const CornerSet scan_corners = enumerate_corners(scan_plane_list, Vec3::Zero());
  const CornerSet map_corners = enumerate_corners(map_plane_list, map_centroid);
  if (scan_corners.corners.empty() || map_corners.corners.empty()) {
    throw LocalizationFailure("localize_lidar: no usable corner triples");
  }

  Vec3 bbox_lo = map.points[0], bbox_hi = map.points[0];
  for (const Vec3& p : map.points) {
    bbox_lo = bbox_lo.cwiseMin(p);
    bbox_hi = bbox_hi.cwiseMax(p);
  }
  bbox_lo.array() -= params.position_margin;
  bbox_hi.array() += params.position_margin;

  // rough-score sample: deterministic stride over the downsampled scan
  std::vector<Vec3> sample;
  const std::size_t step = std::max<std::size_t>(1, scan.size() / params.rough_samples);
  for (std::size_t i = 0; i < scan.size(); i += step) sample.push_back(scan[i]);

  struct Candidate {
    RigidTransform pose;
    RoughScore score;
    Corner corner_map, corner_scan;
  };
  std::optional<Candidate> best;
  for (const Corner& cw : map_corners.corners) {
    for (const Corner& cl_base : scan_corners.corners) {
      for (int shift = 0; shift < 3; ++shift) {
        const Corner cl = cl_base.cycled(shift);
        Pose pose;
        try {
          pose = solve_pose_from_corner(cw, cl);
        } catch (const ImproperRotation&) {
          continue;
        }
        if (coarse_rotation &&
            rotation_angle_deg(coarse_rotation->transpose() * pose.rotation()) >
                params.prior_max_rot_deg) {
          continue;
        }
        const Vec3 center = pose.translation();  // lidar origin in the map frame
        if ((center.array() < bbox_lo.array()).any() ||
            (center.array() > bbox_hi.array()).any()) {
          continue;
        }
        const RoughScore score =
            rough_score(sample, reference, to_rigid(pose), params.rough_corr);
        if (score.matched_fraction < 0.35) continue;
        const bool better =
            !best ||
            (score.matched_fraction > best->score.matched_fraction + 0.05) ||
            (score.matched_fraction > best->score.matched_fraction - 0.05 &&
             score.rms < best->score.rms);
        if (better) best = Candidate{to_rigid(pose), score, cw, cl};
      }
    }
  }
  if (!best) {
    throw LocalizationFailure("localize_lidar: no corner assignment matches the prior");
  }

  const IcpResult icp = icp_refine(scan, reference,
                                   best->pose.as_pose("lidar", "map"), params.icp);
  LidarLocalization loc;
  loc.pose = icp.pose;
  loc.rms_m = icp.rms_m;
  loc.icp_iterations = icp.iterations;
  loc.converged = icp.converged;
  loc.corner_map = best->corner_map;
  loc.corner_scan = best->corner_scan;
  loc.scan_planes = static_cast<int>(scan_plane_list.size());
  return loc;
}

}  // namespace panocal::lidarloc
