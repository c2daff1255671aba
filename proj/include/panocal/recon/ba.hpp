#pragma once

#include <vector>

#include "panocal/recon/map.hpp"
#include "panocal/recon/stereo.hpp"
#include "panocal/sim/rig.hpp"

namespace panocal::recon {

struct BaOptions {
  double huber_px = 2.0;
  int max_iters = 50;
  double lambda_init = 1e-4;
  double lambda_up = 4.0;
  double lambda_down = 3.0;
};

struct BaSummary {
  double final_rms_px = 0;   // per-coordinate RMS of the raw residuals
  bool converged = false;
  int iterations = 0;
  std::vector<double> cost_history;  // robust cost at every accepted state
  int n_observations = 0;
  int n_variable_points = 0;
};

/// Joint refinement of rig poses and map points minimizing the stereo
/// reprojection error, both eyes projected through the fixed stereo
/// extrinsic. Levenberg-Marquardt with a Schur complement on the points,
/// Huber-robustified; the frame-0 pose is frozen as the gauge. Points seen
/// in a single stereo frame stay out of the optimization and are re-anchored
/// to their frame's refined pose afterwards.
class BaProblem {
 public:
  BaProblem(const std::vector<StereoFrame>& frames, const MarkerMap& map,
            const sim::StereoRig& rig, double huber_px = 2.0);

  int n_residuals() const { return 2 * static_cast<int>(observations_.size()); }
  int n_parameters() const {
    return 6 * (static_cast<int>(poses_.size()) - 1) + 3 * static_cast<int>(points_.size());
  }
  int n_variable_points() const { return static_cast<int>(points_.size()); }

  /// Raw residual vector at the current state perturbed by delta
  /// (6 per variable frame, then 3 per variable point); empty delta = none.
  VecX residuals(const VecX& delta = VecX()) const;

  /// Dense analytic Jacobian of residuals() at the current state.
  MatX dense_jacobian() const;

  double robust_cost() const;
  double rms_px() const;

  BaSummary optimize(const BaOptions& opts);

  /// Write the optimized poses and points back.
  void commit(std::vector<StereoFrame>& frames, MarkerMap& map) const;

 private:
  struct Obs {
    int frame;     // index into poses_
    int point;     // index into points_ (variable points only)
    int eye;       // 0 = left, 1 = right
    int detection; // detection index in its eye (deterministic ordering)
    Vec2 z;
  };

  void apply_delta(const VecX& delta);
  void residual_and_jacobian(const Obs& obs, const std::vector<RigidTransform>& poses,
                             const std::vector<Vec3>& points, Vec2* r,
                             Eigen::Matrix<double, 2, 6>* j_pose,
                             Eigen::Matrix<double, 2, 3>* j_point) const;

  std::vector<RigidTransform> poses_;  // rig_k <- map
  std::vector<Vec3> points_;           // variable points
  std::vector<int> map_index_;         // variable point -> map point index
  std::vector<Obs> observations_;
  sim::StereoRig rig_;
  RigidTransform eye_tf_[2];
  double huber_px_;
};

BaSummary global_ba(std::vector<StereoFrame>& frames, MarkerMap& map,
                    const sim::StereoRig& rig, const BaOptions& opts = {});

}  // namespace panocal::recon
