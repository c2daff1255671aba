#include "panocal/geometry/plane.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"

namespace panocal {

Plane fit_plane_lsq(std::span<const Vec3> points, std::span<const int> subset) {
  std::vector<int> all;
  if (subset.empty()) {
    all.resize(points.size());
    std::iota(all.begin(), all.end(), 0);
    subset = all;
  }
  if (subset.size() < 3) throw DegenerateConfiguration("fit_plane_lsq: < 3 points");
  Vec3 c = Vec3::Zero();
  for (int i : subset) c += points[i];
  c /= static_cast<double>(subset.size());
  Mat3 cov = Mat3::Zero();
  for (int i : subset) cov += (points[i] - c) * (points[i] - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  if (es.eigenvalues()(1) < 1e-18 * std::max(1.0, es.eigenvalues()(2))) {
    throw DegenerateConfiguration("fit_plane_lsq: collinear points");
  }
  const Vec3 n = es.eigenvectors().col(0).normalized();
  return Plane{n, n.dot(c)};
}

std::vector<FittedPlane> extract_planes(std::span<const Vec3> points,
                                        const PlaneRansacParams& params) {
  std::vector<FittedPlane> planes;
  std::vector<int> remaining(points.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  Rng rng(derive_seed(params.seed, "extract_planes"));

  while (static_cast<int>(remaining.size()) >= params.min_support &&
         static_cast<int>(planes.size()) < params.max_planes) {
    Plane best;
    int best_count = 0;
    for (int it = 0; it < params.iterations; ++it) {
      const int i = remaining[rng.uniform_index(remaining.size())];
      const int j = remaining[rng.uniform_index(remaining.size())];
      const int l = remaining[rng.uniform_index(remaining.size())];
      if (i == j || i == l || j == l) continue;
      const Vec3 n = (points[j] - points[i]).cross(points[l] - points[i]);
      if (n.norm() < 1e-12) continue;
      const Plane cand{n.normalized(), n.normalized().dot(points[i])};
      int count = 0;
      for (int idx : remaining) {
        if (std::abs(cand.signed_distance(points[idx])) <= params.dist_tol) ++count;
      }
      if (count > best_count) {
        best_count = count;
        best = cand;
      }
    }
    if (best_count < params.min_support) break;

    // Least-squares refinement on the consensus set, then one re-count.
    FittedPlane fitted;
    for (int pass = 0; pass < 2; ++pass) {
      fitted.support.clear();
      for (int idx : remaining) {
        if (std::abs(best.signed_distance(points[idx])) <= params.dist_tol) {
          fitted.support.push_back(idx);
        }
      }
      if (fitted.support.size() < 3) break;
      best = fit_plane_lsq(points, fitted.support);
    }
    if (static_cast<int>(fitted.support.size()) < params.min_support) break;

    double ss = 0;
    for (int idx : fitted.support) {
      const double r = best.signed_distance(points[idx]);
      ss += r * r;
    }
    fitted.plane = best;
    fitted.rms = std::sqrt(ss / static_cast<double>(fitted.support.size()));
    planes.push_back(fitted);

    std::vector<int> next;
    next.reserve(remaining.size());
    std::vector<char> used(points.size(), 0);
    for (int idx : fitted.support) used[idx] = 1;
    for (int idx : remaining) {
      if (!used[idx]) next.push_back(idx);
    }
    remaining.swap(next);
  }
  if (planes.empty()) throw NoPlanes("extract_planes: no plane reaches min_support");
  return planes;
}

}  // namespace panocal
