#include "panocal/recon/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "panocal/errors.hpp"

namespace panocal::recon {

namespace {

int nearest_marker(const sim::SceneTruth& truth, const Vec3& p, double* dist) {
  int best = -1;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < truth.markers.size(); ++i) {
    const double d = (truth.markers[i].position - p).norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  *dist = best_d;
  return best;
}

}  // namespace

ReconEvaluation evaluate_reconstruction(const MarkerMap& map, const sim::SceneTruth& truth,
                                        const Pose& init, const EvalParams& params) {
  if (map.points.size() < 4) throw AlignmentFailure("evaluate: map has fewer than 4 points");
  if (truth.markers.empty()) throw AlignmentFailure("evaluate: empty truth");

  RigidTransform align = to_rigid(init);
  for (int iter = 0; iter < params.max_iters; ++iter) {
    std::vector<Vec3> src, dst;
    for (const Vec3& p : map.points) {
      const Vec3 w = align * p;
      double d;
      const int j = nearest_marker(truth, w, &d);
      if (d <= params.trim_radius) {
        src.push_back(p);
        dst.push_back(truth.markers[j].position);
      }
    }
    if (src.size() < 4) throw AlignmentFailure("evaluate: alignment lost the consensus");
    const RigidTransform next = rigid_fit(src, dst);
    const double delta = (next.rotation - align.rotation).norm() +
                         (next.translation - align.translation).norm();
    align = next;
    if (delta < 1e-12) break;
  }

  ReconEvaluation eval;
  double sum = 0;
  for (const Vec3& p : map.points) {
    double d;
    nearest_marker(truth, align * p, &d);
    if (d <= params.consensus_radius) {
      sum += d;
      ++eval.matched;
    }
  }
  eval.consensus_fraction = static_cast<double>(eval.matched) / map.points.size();
  if (eval.consensus_fraction < 0.5) {
    throw AlignmentFailure("evaluate: nearest-neighbour consensus " +
                           std::to_string(eval.consensus_fraction) + " below 50%");
  }
  eval.mean_error_m = sum / eval.matched;
  eval.plane_fit_error_m = mean_plane_fit_error(map);
  eval.t_world_map = align.as_pose("map", "world");
  return eval;
}

}  // namespace panocal::recon
