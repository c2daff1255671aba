#include "panocal/camloc/pnp.hpp"

#include <algorithm>
#include <cmath>

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"

namespace panocal::camloc {

double effective_inlier_px(const PnpParams& params, const CameraIntrinsics& k) {
  return params.inlier_px * std::max(1.0, k.image_diagonal() / params.hi_res_diagonal);
}

namespace {

struct Cand {
  double dist;
  int det, pt;
};

// greedy nearest-first one-to-one claim; candidates may arrive unordered
std::vector<std::pair<int, int>> greedy_one_to_one(std::vector<Cand>& cands, std::size_t n_det,
                                                   std::size_t n_pt) {
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.det != b.det) return a.det < b.det;
    return a.pt < b.pt;
  });
  std::vector<char> used_det(n_det, 0), used_pt(n_pt, 0);
  std::vector<std::pair<int, int>> pairs;
  for (const Cand& c : cands) {
    if (used_det[c.det] || used_pt[c.pt]) continue;
    used_det[c.det] = used_pt[c.pt] = 1;
    pairs.emplace_back(c.det, c.pt);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline bool project_fast(const CameraIntrinsics& k, const Vec3& q, double pad, Vec2* px) {
  if (q.z() <= 1e-9) return false;
  const Vec2 d = distort_normalized(k, Vec2(q.x() / q.z(), q.y() / q.z()));
  px->x() = k.fx * d.x() + k.cx;
  px->y() = k.fy * d.y() + k.cy;
  return px->x() >= -pad && px->x() < k.width + pad && px->y() >= -pad &&
         px->y() < k.height + pad;
}

// uniform grid over the detections for O(1) radius queries
class DetectionGrid {
 public:
  DetectionGrid(std::span<const Vec2> detections, const CameraIntrinsics& k, double radius)
      : cell_(std::max(radius, 1.0)), pad_(radius) {
    nx_ = static_cast<int>((k.width + 2 * pad_) / cell_) + 2;
    ny_ = static_cast<int>((k.height + 2 * pad_) / cell_) + 2;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int i = 0; i < static_cast<int>(detections.size()); ++i) {
      cells_[index_of(detections[i])].push_back(i);
    }
  }

  template <typename Fn>
  void visit_near(const Vec2& px, Fn&& fn) const {
    const int cx = coord_x(px.x()), cy = coord_y(px.y());
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = cx + dx, y = cy + dy;
        if (x < 0 || x >= nx_ || y < 0 || y >= ny_) continue;
        for (int det : cells_[static_cast<std::size_t>(y) * nx_ + x]) fn(det);
      }
    }
  }

 private:
  int coord_x(double x) const {
    return std::clamp(static_cast<int>((x + pad_) / cell_), 0, nx_ - 1);
  }
  int coord_y(double y) const {
    return std::clamp(static_cast<int>((y + pad_) / cell_), 0, ny_ - 1);
  }
  std::size_t index_of(const Vec2& p) const {
    return static_cast<std::size_t>(coord_y(p.y())) * nx_ + coord_x(p.x());
  }
  double cell_, pad_;
  int nx_, ny_;
  std::vector<std::vector<int>> cells_;
};

}  // namespace

std::vector<std::pair<int, int>> reprojection_inliers(std::span<const Vec2> detections,
                                                      std::span<const Vec3> map_points,
                                                      const CameraIntrinsics& k,
                                                      const RigidTransform& cam_from_map,
                                                      double inlier_px) {
  std::vector<Cand> cands;
  Vec2 px;
  for (int m = 0; m < static_cast<int>(map_points.size()); ++m) {
    if (!project_fast(k, cam_from_map * map_points[m], inlier_px, &px)) continue;
    for (int i = 0; i < static_cast<int>(detections.size()); ++i) {
      const double dist = (px - detections[i]).norm();
      if (dist <= inlier_px) cands.push_back({dist, i, m});
    }
  }
  return greedy_one_to_one(cands, detections.size(), map_points.size());
}

double reprojection_rms_px(std::span<const Vec2> detections, std::span<const Vec3> map_points,
                           const CameraIntrinsics& k, const RigidTransform& cam_from_map,
                           std::span<const std::pair<int, int>> pairs) {
  if (pairs.empty()) return 0;
  double ss = 0;
  Vec2 px;
  for (const auto& [det, pt] : pairs) {
    if (!project_fast(k, cam_from_map * map_points[pt], 1e9, &px)) continue;
    ss += (px - detections[det]).squaredNorm();
  }
  return std::sqrt(ss / (2.0 * pairs.size()));
}

void refine_pose_lm(std::span<const Vec2> detections, std::span<const Vec3> map_points,
                    std::span<const std::pair<int, int>> pairs, const CameraIntrinsics& k,
                    RigidTransform& cam_from_map, int max_iters) {
  if (pairs.size() < 3) return;
  double lambda = 1e-6;
  auto cost_of = [&](const RigidTransform& pose) {
    double ss = 0;
    Vec2 px;
    for (const auto& [det, pt] : pairs) {
      if (!project_fast(k, pose * map_points[pt], 1e9, &px)) return 1e30;
      ss += (px - detections[det]).squaredNorm();
    }
    return ss;
  };
  double cost = cost_of(cam_from_map);
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    Vec2 px;
    for (const auto& [det, pt] : pairs) {
      const Vec3 q = cam_from_map * map_points[pt];
      if (!project_fast(k, q, 1e9, &px)) continue;
      const Vec2 r = px - detections[det];
      Eigen::Matrix<double, 2, 6> j;
      const Eigen::Matrix<double, 2, 3> d_px_dq = projection_jacobian(k, q);
      j.leftCols<3>() = d_px_dq;
      j.rightCols<3>() = -d_px_dq * skew(q);
      h += j.transpose() * j;
      g -= j.transpose() * r;
    }
    bool stepped = false;
    for (int inner = 0; inner < 8 && !stepped; ++inner) {
      Eigen::Matrix<double, 6, 6> hd = h;
      hd.diagonal() *= (1.0 + lambda);
      const Eigen::Matrix<double, 6, 1> delta = hd.ldlt().solve(g);
      if (!delta.allFinite()) {
        lambda *= 10;
        continue;
      }
      RigidTransform cand = cam_from_map;
      const Mat3 dr = exp_so3(delta.tail<3>());
      cand.rotation = dr * cand.rotation;
      cand.translation = dr * cand.translation + delta.head<3>();
      const double cand_cost = cost_of(cand);
      if (cand_cost < cost) {
        cam_from_map = cand;
        cost = cand_cost;
        stepped = true;
        lambda = std::max(lambda / 3, 1e-12);
        if (delta.norm() < 1e-12) iter = max_iters;
      } else {
        lambda *= 10;
      }
    }
    if (!stepped) break;
  }
  cam_from_map.rotation = nearest_rotation(cam_from_map.rotation);
}

LocalizationResult triangle_pnp(std::span<const Vec2> detections,
                                const std::vector<Triangle2D>& tri2d,
                                const std::vector<Triangle3D>& tri3d,
                                std::span<const Vec3> map_points, const CameraIntrinsics& k,
                                const PnpParams& params) {
  if (tri2d.empty() || tri3d.empty()) {
    throw LocalizationFailure("triangle_pnp: empty triangle set");
  }
  const double inlier_px = effective_inlier_px(params, k);
  const double focal = 0.5 * (k.fx + k.fy);
  Rng rng(derive_seed(params.seed, "triangle_pnp"));

  std::vector<Vec3> bearings(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    bearings[i] = pixel_to_bearing(k, detections[i]);
  }
  const DetectionGrid grid(detections, k, inlier_px);

  // grid-backed mirror of reprojection_inliers (identical candidate set)
  auto count_consensus = [&](const RigidTransform& pose) {
    std::vector<Cand> cands;
    Vec2 px;
    for (int m = 0; m < static_cast<int>(map_points.size()); ++m) {
      if (!project_fast(k, pose * map_points[m], inlier_px, &px)) continue;
      grid.visit_near(px, [&](int det) {
        const double dist = (px - detections[det]).norm();
        if (dist <= inlier_px) cands.push_back({dist, det, m});
      });
    }
    return greedy_one_to_one(cands, detections.size(), map_points.size()).size();
  };

  RigidTransform best_pose;
  std::size_t best_count = 0;
  const std::size_t exit_count = params.exhaustive
      ? detections.size() + 1
      : static_cast<std::size_t>(std::ceil(params.early_exit_ratio * detections.size()));

  constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  const int rounds = params.exhaustive ? static_cast<int>(tri2d.size()) : params.n_rounds;
  bool done = false;
  for (int round = 0; round < rounds && !done; ++round) {
    const Triangle2D& d2 =
        params.exhaustive ? tri2d[round] : tri2d[rng.uniform_index(tri2d.size())];
    const std::array<Vec3, 3> tri_bearings = {bearings[d2.v[0]], bearings[d2.v[1]],
                                              bearings[d2.v[2]]};
    for (const Triangle3D& d3 : tri3d) {
      if (params.use_signature_prefilter) {
        // px-per-metre scale of the matched sorted edges must be depth
        // plausible and not wildly anisotropic (foreshortening bound)
        const double s_big = d2.edges_sorted[2] / d3.edges_sorted[2];
        const double s_small = d2.edges_sorted[0] / d3.edges_sorted[0];
        const double lo = std::min(s_small, s_big), hi = std::max(s_small, s_big);
        if (hi / lo > 6.0) continue;
        const double z_est = focal / hi;
        if (z_est < 0.5 * params.min_depth || z_est > 2.0 * params.max_depth) continue;
      }
      for (const auto& perm : kPerms) {
        const std::array<Vec3, 3> pts = {map_points[d3.v[perm[0]]], map_points[d3.v[perm[1]]],
                                         map_points[d3.v[perm[2]]]};
        std::vector<RigidTransform> hyps;
        try {
          hyps = solve_p3p_bearings(tri_bearings, pts);
        } catch (const Error&) {
          continue;
        }
        for (const RigidTransform& hyp : hyps) {
          if (params.position_prior) {
            const Vec3 center = -(hyp.rotation.transpose() * hyp.translation);
            const auto& [lo, hi] = *params.position_prior;
            if ((center.array() < lo.array()).any() || (center.array() > hi.array()).any()) {
              continue;
            }
          }
          const std::size_t count = count_consensus(hyp);
          if (count > best_count) {
            best_count = count;
            best_pose = hyp;
            if (!params.exhaustive && best_count >= exit_count) done = true;
          }
          if (done) break;
        }
        if (done) break;
      }
      if (done) break;
    }
  }

  if (static_cast<int>(best_count) < params.min_inliers) {
    throw LocalizationFailure("triangle_pnp: best consensus " + std::to_string(best_count) +
                              " below " + std::to_string(params.min_inliers));
  }

  auto pairs = reprojection_inliers(detections, map_points, k, best_pose, inlier_px);
  refine_pose_lm(detections, map_points, pairs, k, best_pose);
  pairs = reprojection_inliers(detections, map_points, k, best_pose, inlier_px);

  LocalizationResult result;
  result.pose = best_pose.as_pose("map", "camera");
  result.inliers = pairs;
  result.inlier_count = static_cast<int>(pairs.size());
  result.rms_px = reprojection_rms_px(detections, map_points, k, best_pose, pairs);
  return result;
}

}  // namespace panocal::camloc
