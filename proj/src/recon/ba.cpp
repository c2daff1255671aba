#include "panocal/recon/ba.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "panocal/errors.hpp"

namespace panocal::recon {

namespace {

// pixel of a camera-frame point without the BehindCamera throw; callers
// reject non-positive depths via the `ok` flag
Vec2 soft_project(const CameraIntrinsics& k, const Vec3& q, bool* ok) {
  if (q.z() <= 1e-6) {
    *ok = false;
    return Vec2::Zero();
  }
  *ok = true;
  const Vec2 d = distort_normalized(k, Vec2(q.x() / q.z(), q.y() / q.z()));
  return Vec2(k.fx * d.x() + k.cx, k.fy * d.y() + k.cy);
}

}  // namespace

BaProblem::BaProblem(const std::vector<StereoFrame>& frames, const MarkerMap& map,
                     const sim::StereoRig& rig, double huber_px)
    : rig_(rig), huber_px_(huber_px) {
  eye_tf_[0] = RigidTransform{};
  eye_tf_[1] = to_rigid(rig.t_right_left);
  poses_.reserve(frames.size());
  for (const StereoFrame& f : frames) poses_.push_back(to_rigid(invert(f.pose_world)));

  std::vector<int> var_index(map.points.size(), -1);
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    if (map.frames_observing(static_cast<int>(i)) < 2) continue;
    var_index[i] = static_cast<int>(points_.size());
    points_.push_back(map.points[i]);
    map_index_.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    if (var_index[i] < 0) continue;
    for (const TrackObs& t : map.tracks[i]) {
      const StereoFrame& f = frames[t.frame];
      const Vec2& z = (t.eye == 0) ? f.detections_left[t.detection]
                                   : f.detections_right[t.detection];
      observations_.push_back(Obs{t.frame, var_index[i], t.eye, t.detection, z});
    }
  }
  std::sort(observations_.begin(), observations_.end(), [](const Obs& a, const Obs& b) {
    if (a.point != b.point) return a.point < b.point;
    if (a.frame != b.frame) return a.frame < b.frame;
    if (a.eye != b.eye) return a.eye < b.eye;
    return a.detection < b.detection;
  });
}

void BaProblem::residual_and_jacobian(const Obs& obs, const std::vector<RigidTransform>& poses,
                                      const std::vector<Vec3>& points, Vec2* r,
                                      Eigen::Matrix<double, 2, 6>* j_pose,
                                      Eigen::Matrix<double, 2, 3>* j_point) const {
  const RigidTransform& x = poses[obs.frame];
  const Vec3 q_rig = x * points[obs.point];
  const RigidTransform& eye = eye_tf_[obs.eye];
  const Vec3 q = eye * q_rig;
  const CameraIntrinsics& k = (obs.eye == 0) ? rig_.left : rig_.right;
  bool ok = true;
  const Vec2 px = soft_project(k, q, &ok);
  if (!ok) {
    *r = Vec2(1e6, 1e6);
    if (j_pose) j_pose->setZero();
    if (j_point) j_point->setZero();
    return;
  }
  *r = px - obs.z;
  if (!j_pose && !j_point) return;
  const Eigen::Matrix<double, 2, 3> d_px_dq = projection_jacobian(k, q);
  const Eigen::Matrix<double, 2, 3> d_px_dqrig = d_px_dq * eye.rotation;
  if (j_pose) {
    // left-multiplied update: q_rig(delta) = exp(dtheta) (X p) + drho
    j_pose->leftCols<3>() = d_px_dqrig;
    j_pose->rightCols<3>() = -d_px_dqrig * skew(q_rig);
  }
  if (j_point) *j_point = d_px_dqrig * x.rotation;
}

void BaProblem::apply_delta(const VecX& delta) {
  const int n_pose = 6 * (static_cast<int>(poses_.size()) - 1);
  for (std::size_t k = 1; k < poses_.size(); ++k) {
    const auto d = delta.segment<6>(6 * (k - 1));
    const Mat3 dr = exp_so3(d.tail<3>());
    poses_[k].rotation = dr * poses_[k].rotation;
    poses_[k].translation = dr * poses_[k].translation + d.head<3>();
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    points_[i] += delta.segment<3>(n_pose + 3 * i);
  }
}

VecX BaProblem::residuals(const VecX& delta) const {
  std::vector<RigidTransform> poses = poses_;
  std::vector<Vec3> points = points_;
  if (delta.size() > 0) {
    if (delta.size() != n_parameters()) throw ConfigError("ba: delta size mismatch");
    const int n_pose = 6 * (static_cast<int>(poses.size()) - 1);
    for (std::size_t k = 1; k < poses.size(); ++k) {
      const auto d = delta.segment<6>(6 * (k - 1));
      const Mat3 dr = exp_so3(d.tail<3>());
      poses[k].rotation = dr * poses[k].rotation;
      poses[k].translation = dr * poses[k].translation + d.head<3>();
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      points[i] += delta.segment<3>(n_pose + 3 * i);
    }
  }
  VecX r(n_residuals());
  for (std::size_t o = 0; o < observations_.size(); ++o) {
    Vec2 ri;
    residual_and_jacobian(observations_[o], poses, points, &ri, nullptr, nullptr);
    r.segment<2>(2 * o) = ri;
  }
  return r;
}

MatX BaProblem::dense_jacobian() const {
  MatX j = MatX::Zero(n_residuals(), n_parameters());
  const int n_pose = 6 * (static_cast<int>(poses_.size()) - 1);
  for (std::size_t o = 0; o < observations_.size(); ++o) {
    const Obs& obs = observations_[o];
    Vec2 r;
    Eigen::Matrix<double, 2, 6> jp;
    Eigen::Matrix<double, 2, 3> jx;
    residual_and_jacobian(obs, poses_, points_, &r, &jp, &jx);
    if (obs.frame > 0) j.block<2, 6>(2 * o, 6 * (obs.frame - 1)) = jp;
    j.block<2, 3>(2 * o, n_pose + 3 * obs.point) = jx;
  }
  return j;
}

double BaProblem::robust_cost() const {
  const VecX r = residuals();
  double cost = 0;
  for (int o = 0; o < r.size() / 2; ++o) {
    const double norm = r.segment<2>(2 * o).norm();
    cost += (norm <= huber_px_) ? 0.5 * norm * norm
                                : huber_px_ * (norm - 0.5 * huber_px_);
  }
  return cost;
}

double BaProblem::rms_px() const {
  const VecX r = residuals();
  return r.size() ? std::sqrt(r.squaredNorm() / r.size()) : 0.0;
}

BaSummary BaProblem::optimize(const BaOptions& opts) {
  BaSummary summary;
  summary.n_observations = static_cast<int>(observations_.size());
  summary.n_variable_points = static_cast<int>(points_.size());

  const int n_var_poses = static_cast<int>(poses_.size()) - 1;
  const int n_pts = static_cast<int>(points_.size());
  if (n_var_poses < 0 || observations_.empty()) {
    summary.converged = true;
    summary.final_rms_px = rms_px();
    summary.cost_history.push_back(robust_cost());
    return summary;
  }

  // group observations per point (they are sorted by point)
  std::vector<std::pair<int, int>> point_ranges(n_pts, {0, 0});
  for (int o = 0; o < static_cast<int>(observations_.size());) {
    int e = o;
    while (e < static_cast<int>(observations_.size()) &&
           observations_[e].point == observations_[o].point) {
      ++e;
    }
    point_ranges[observations_[o].point] = {o, e};
    o = e;
  }

  double cost = robust_cost();
  summary.cost_history.push_back(cost);
  double lambda = opts.lambda_init;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    summary.iterations = iter + 1;
    if (cost < 1e-22) {  // already at the global optimum (noiseless fixed point)
      summary.converged = true;
      break;
    }

    // Linearize once per outer iteration.
    struct PointBlocks {
      Mat3 v = Mat3::Zero();
      Vec3 b = Vec3::Zero();
      std::vector<int> frames;                        // variable-pose indices (frame-1)
      std::vector<Eigen::Matrix<double, 6, 3>> w;     // per frames entry
    };
    std::vector<PointBlocks> pts(n_pts);
    VecX rhs = VecX::Zero(6 * n_var_poses);
    std::vector<Eigen::Matrix<double, 6, 6>> u(
        n_var_poses, Eigen::Matrix<double, 6, 6>::Zero());

    for (int i = 0; i < n_pts; ++i) {
      auto [o0, o1] = point_ranges[i];
      PointBlocks& pb = pts[i];
      for (int o = o0; o < o1; ++o) {
        const Obs& obs = observations_[o];
        Vec2 r;
        Eigen::Matrix<double, 2, 6> jp;
        Eigen::Matrix<double, 2, 3> jx;
        residual_and_jacobian(obs, poses_, points_, &r, &jp, &jx);
        const double norm = r.norm();
        const double w = (norm <= huber_px_) ? 1.0 : huber_px_ / norm;
        const double sw = std::sqrt(w);
        r *= sw;
        jp *= sw;
        jx *= sw;

        pb.v += jx.transpose() * jx;
        pb.b -= jx.transpose() * r;
        if (obs.frame > 0) {
          const int pv = obs.frame - 1;
          u[pv] += jp.transpose() * jp;
          rhs.segment<6>(6 * pv) -= jp.transpose() * r;
          int slot = -1;
          for (std::size_t f = 0; f < pb.frames.size(); ++f) {
            if (pb.frames[f] == pv) slot = static_cast<int>(f);
          }
          if (slot < 0) {
            pb.frames.push_back(pv);
            pb.w.emplace_back(Eigen::Matrix<double, 6, 3>::Zero());
            slot = static_cast<int>(pb.frames.size()) - 1;
          }
          pb.w[slot] += jp.transpose() * jx;
        }
      }
    }

    bool accepted = false;
    for (int inner = 0; inner < 10 && !accepted; ++inner) {
      // damp and eliminate points
      MatX sd = MatX::Zero(6 * n_var_poses, 6 * n_var_poses);
      VecX rhsd = rhs;
      for (int pv = 0; pv < n_var_poses; ++pv) {
        Eigen::Matrix<double, 6, 6> ud = u[pv];
        ud.diagonal() *= (1.0 + lambda);
        sd.block<6, 6>(6 * pv, 6 * pv) = ud;
      }
      std::vector<Mat3> v_inv(n_pts);
      for (int i = 0; i < n_pts; ++i) {
        Mat3 vd = pts[i].v;
        vd.diagonal() *= (1.0 + lambda);
        vd.diagonal().array() += 1e-12;
        v_inv[i] = vd.inverse();
        const PointBlocks& pb = pts[i];
        for (std::size_t f1 = 0; f1 < pb.frames.size(); ++f1) {
          const Eigen::Matrix<double, 6, 3> wv = pb.w[f1] * v_inv[i];
          rhsd.segment<6>(6 * pb.frames[f1]) -= wv * pb.b;
          for (std::size_t f2 = 0; f2 < pb.frames.size(); ++f2) {
            sd.block<6, 6>(6 * pb.frames[f1], 6 * pb.frames[f2]) -=
                wv * pb.w[f2].transpose();
          }
        }
      }

      const VecX dp = sd.ldlt().solve(rhsd);
      VecX delta = VecX::Zero(n_parameters());
      delta.head(6 * n_var_poses) = dp;
      for (int i = 0; i < n_pts; ++i) {
        Vec3 acc = pts[i].b;
        for (std::size_t f = 0; f < pts[i].frames.size(); ++f) {
          acc -= pts[i].w[f].transpose() * dp.segment<6>(6 * pts[i].frames[f]);
        }
        delta.segment<3>(6 * n_var_poses + 3 * i) = v_inv[i] * acc;
      }
      if (!delta.allFinite()) {
        lambda *= opts.lambda_up;
        continue;
      }

      // evaluate the candidate
      std::vector<RigidTransform> saved_poses = poses_;
      std::vector<Vec3> saved_points = points_;
      apply_delta(delta);
      const double new_cost = robust_cost();
      if (new_cost < cost) {
        accepted = true;
        const double decrease = cost - new_cost;
        cost = new_cost;
        summary.cost_history.push_back(cost);
        lambda = std::max(lambda / opts.lambda_down, 1e-12);
        if (decrease < 1e-14 * (1.0 + cost) && delta.norm() < 1e-10) {
          summary.converged = true;
        }
      } else {
        poses_ = std::move(saved_poses);
        points_ = std::move(saved_points);
        lambda *= opts.lambda_up;
      }
    }
    if (!accepted) {
      summary.converged = true;  // no descent direction left
      break;
    }
    if (summary.converged) break;
  }
  summary.final_rms_px = rms_px();
  return summary;
}

void BaProblem::commit(std::vector<StereoFrame>& frames, MarkerMap& map) const {
  for (std::size_t k = 0; k < frames.size(); ++k) {
    frames[k].pose_world = invert(poses_[k].as_pose("map", "rig"));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) map.points[map_index_[i]] = points_[i];
  // re-anchor the frozen single-frame points to their refined pose
  std::vector<char> variable(map.points.size(), 0);
  for (int idx : map_index_) variable[idx] = 1;
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    if (variable[i] || map.tracks[i].empty()) continue;
    const int frame = map.tracks[i][0].frame;
    // average the frame's local points that belong to this track
    const StereoFrame& f = frames[frame];
    Vec3 acc = Vec3::Zero();
    int n = 0;
    for (const TrackObs& t : map.tracks[i]) {
      if (t.eye != 0) continue;
      for (std::size_t lp = 0; lp < f.point_obs.size(); ++lp) {
        if (f.point_obs[lp].first == t.detection) {
          acc += to_rigid(f.pose_world) * f.local_points[lp];
          ++n;
        }
      }
    }
    if (n > 0) map.points[i] = acc / n;
  }
}

BaSummary global_ba(std::vector<StereoFrame>& frames, MarkerMap& map,
                    const sim::StereoRig& rig, const BaOptions& opts) {
  BaProblem problem(frames, map, rig, opts.huber_px);
  BaSummary summary = problem.optimize(opts);
  problem.commit(frames, map);
  return summary;
}

}  // namespace panocal::recon
