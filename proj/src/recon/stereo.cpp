#include "panocal/recon/stereo.hpp"

#include <algorithm>
#include <limits>

#include "panocal/errors.hpp"

namespace panocal::recon {

StereoFrame build_stereo_frame(int index, std::vector<Vec2> detections_left,
                               std::vector<Vec2> detections_right,
                               const sim::StereoRig& rig, double epipolar_tol_px,
                               double min_depth, double max_depth) {
  StereoFrame frame;
  frame.index = index;
  frame.detections_left = std::move(detections_left);
  frame.detections_right = std::move(detections_right);

  const std::size_t nl = frame.detections_left.size();
  const std::size_t nr = frame.detections_right.size();
  if (nl == 0 || nr == 0) return frame;

  // residual matrix, then mutual best match within tolerance
  std::vector<double> res(nl * nr);
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      res[i * nr + j] = epipolar_residual_px(frame.detections_left[i],
                                             frame.detections_right[j], rig.left,
                                             rig.right, rig.t_right_left);
    }
  }
  for (std::size_t i = 0; i < nl; ++i) {
    std::size_t best_j = 0;
    double best = std::numeric_limits<double>::max();
    double second = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < nr; ++j) {
      const double r = res[i * nr + j];
      if (r < best) {
        second = best;
        best = r;
        best_j = j;
      } else if (r < second) {
        second = r;
      }
    }
    if (best > epipolar_tol_px) continue;
    // ambiguous rows breed phantom points; require a clear margin
    if (second < std::max(2.0 * best, 1.0)) continue;
    bool mutual = true;  // i must also be best_j's favourite
    for (std::size_t i2 = 0; i2 < nl; ++i2) {
      if (res[i2 * nr + best_j] < best) {
        mutual = false;
        break;
      }
    }
    if (!mutual) continue;
    try {
      const Vec3 p = triangulate_stereo(frame.detections_left[i], frame.detections_right[best_j],
                                        rig.left, rig.right, rig.t_right_left, epipolar_tol_px);
      if (p.z() < min_depth || p.z() > max_depth) continue;
      frame.local_points.push_back(p);
      frame.point_obs.emplace_back(static_cast<int>(i), static_cast<int>(best_j));
    } catch (const Error&) {
      // divergent rays or behind-camera: skip the pair
    }
  }
  return frame;
}

}  // namespace panocal::recon
