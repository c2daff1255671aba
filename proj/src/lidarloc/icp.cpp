#include "panocal/lidarloc/icp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <unordered_set>

#include "panocal/errors.hpp"
#include "panocal/geometry/solvers.hpp"
#include "panocal/threading.hpp"

namespace panocal::lidarloc {

std::vector<Vec3> downsample_scan(std::span<const Vec3> points, double voxel,
                                  std::size_t max_points) {
  std::vector<Vec3> out;
  if (voxel > 0) {
    std::unordered_set<std::int64_t> seen;
    seen.reserve(points.size());
    constexpr std::int64_t bias = 1 << 20;
    constexpr std::int64_t mask = (1 << 21) - 1;
    for (const Vec3& p : points) {
      const std::int64_t x = static_cast<std::int64_t>(std::floor(p.x() / voxel)) + bias;
      const std::int64_t y = static_cast<std::int64_t>(std::floor(p.y() / voxel)) + bias;
      const std::int64_t z = static_cast<std::int64_t>(std::floor(p.z() / voxel)) + bias;
      const std::int64_t key = ((x & mask) << 42) | ((y & mask) << 21) | (z & mask);
      if (seen.insert(key).second) out.push_back(p);
    }
  } else {
    out.assign(points.begin(), points.end());
  }
  if (max_points > 0 && out.size() > max_points) {
    std::vector<Vec3> thinned;
    thinned.reserve(max_points);
    const double stride = static_cast<double>(out.size()) / max_points;
    for (std::size_t i = 0; i < max_points; ++i) {
      thinned.push_back(out[static_cast<std::size_t>(i * stride)]);
    }
    out.swap(thinned);
  }
  return out;
}

namespace {

struct CorrespondenceSums {
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
  double sq_sum = 0;
  long count = 0;
};

}  // namespace

IcpResult icp_refine(std::span<const Vec3> scan_points, const DensePointCloud& reference,
                     const Pose& init, const IcpParams& params) {
  const std::vector<Vec3> scan =
      downsample_scan(scan_points, params.voxel, params.max_points);
  if (scan.size() < 12) throw IcpDiverged("icp_refine: not enough scan points");

  RigidTransform pose = to_rigid(init);
  IcpResult result;
  int rising = 0;
  double prev_rms = -1;

  std::vector<DenseNeighbor> corr(scan.size());
  std::vector<double> abs_r;
  abs_r.reserve(scan.size());

  for (int iter = 0; iter < params.max_iters; ++iter) {
    // pass 1: correspondences (index-addressed, thread-count independent)
    parallel_for(scan.size(), [&](std::size_t i) {
      corr[i] = nearest_dense(reference, pose * scan[i], params.max_corr);
    });
    // trim: wrong-plane matches near room edges carry residuals far above
    // the noise floor; gate at 3x the median |r|
    abs_r.clear();
    for (std::size_t i = 0; i < scan.size(); ++i) {
      if (corr[i].plane < 0) continue;
      const Vec3& n = reference.grids[corr[i].plane].plane.normal;
      abs_r.push_back(std::abs(n.dot(pose * scan[i] - corr[i].point)));
    }
    if (abs_r.size() < 12) throw IcpDiverged("icp_refine: correspondences collapsed");
    std::nth_element(abs_r.begin(), abs_r.begin() + abs_r.size() / 2, abs_r.end());
    const double trim = std::max(3.0 * abs_r[abs_r.size() / 2], 1e-7);

    // pass 2: accumulation in fixed chunks, reduced in chunk order, so the
    // result is identical for any thread count
    constexpr int kChunks = 16;
    std::vector<CorrespondenceSums> partial(kChunks);
    const std::size_t chunk = (scan.size() + kChunks - 1) / kChunks;
    parallel_for(kChunks, [&](std::size_t w) {
      CorrespondenceSums& sums = partial[w];
      const std::size_t lo = w * chunk, hi = std::min(scan.size(), lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        if (corr[i].plane < 0) continue;
        const Vec3 p_map = pose * scan[i];
        const Vec3& n = reference.grids[corr[i].plane].plane.normal;
        const double r = n.dot(p_map - corr[i].point);
        if (std::abs(r) > trim) continue;
        Eigen::Matrix<double, 6, 1> j;
        j.head<3>() = n;                    // d r / d rho
        j.tail<3>() = p_map.cross(n);       // d r / d theta
        sums.h += j * j.transpose();
        sums.g -= j * r;
        sums.sq_sum += r * r;
        ++sums.count;
      }
    });
    CorrespondenceSums total;
    for (const auto& s : partial) {
      total.h += s.h;
      total.g += s.g;
      total.sq_sum += s.sq_sum;
      total.count += s.count;
    }
    if (total.count < 12) throw IcpDiverged("icp_refine: correspondences collapsed");

    Eigen::Matrix<double, 6, 6> h = total.h;
    h.diagonal().array() += 1e-10;
    const Eigen::Matrix<double, 6, 1> delta = h.ldlt().solve(total.g);
    if (!delta.allFinite()) throw IcpDiverged("icp_refine: singular normal equations");

    const Mat3 dr = exp_so3(delta.tail<3>());
    pose.rotation = nearest_rotation(dr * pose.rotation);
    pose.translation = dr * pose.translation + delta.head<3>();
    result.iterations = iter + 1;

    // rms with the new pose and fresh correspondences, same trim gate
    double sq = 0;
    long n_pairs = 0;
    for (const Vec3& p : scan) {
      const Vec3 p_map = pose * p;
      const DenseNeighbor nn = nearest_dense(reference, p_map, params.max_corr);
      if (nn.plane < 0) continue;
      const double r = reference.grids[nn.plane].plane.normal.dot(p_map - nn.point);
      if (std::abs(r) > trim) continue;
      sq += r * r;
      ++n_pairs;
    }
    const double rms = n_pairs ? std::sqrt(sq / n_pairs) : 1e9;
    result.rms_history.push_back(rms);
    // re-association wiggle at the noise floor is not divergence; count
    // only substantive growth
    if (prev_rms >= 0 && rms > prev_rms * 1.001) {
      if (++rising >= 3) throw IcpDiverged("icp_refine: rms rose three iterations in a row");
    } else if (prev_rms >= 0 && rms <= prev_rms) {
      rising = 0;
    }
    prev_rms = rms;
    result.rms_m = rms;
    if (delta.norm() < params.update_tol) {
      result.converged = true;
      break;
    }
  }
  result.pose = pose.as_pose(init.from_frame(), init.to_frame());
  return result;
}

}  // namespace panocal::lidarloc
