#pragma once

#include <doctest.h>

#include "panocal/geometry/camera.hpp"
#include "panocal/geometry/pose.hpp"
#include "panocal/geometry/solvers.hpp"
#include "panocal/rng.hpp"

namespace testutil {

using namespace panocal;

inline Vec3 random_unit(Rng& rng) {
  while (true) {
    const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

inline Mat3 random_rotation(Rng& rng) {
  return rotation_about(random_unit(rng), rng.uniform(0, kPi));
}

inline Pose random_pose(Rng& rng, const std::string& from, const std::string& to,
                        double t_scale = 1.0) {
  return Pose(random_rotation(rng),
              Vec3(rng.uniform(-t_scale, t_scale), rng.uniform(-t_scale, t_scale),
                   rng.uniform(-t_scale, t_scale)),
              from, to);
}

inline RigidTransform random_rigid(Rng& rng, double t_scale = 1.0) {
  return {random_rotation(rng),
          Vec3(rng.uniform(-t_scale, t_scale), rng.uniform(-t_scale, t_scale),
               rng.uniform(-t_scale, t_scale))};
}

inline CameraIntrinsics survey_camera(bool distorted = false) {
  CameraIntrinsics k;
  k.fx = k.fy = 1746;
  k.cx = 640;
  k.cy = 512;
  k.width = 1280;
  k.height = 1024;
  if (distorted) {
    k.k1 = -0.05;
    k.k2 = 0.01;
    k.p1 = 5e-4;
    k.p2 = -5e-4;
  }
  return k;
}

}  // namespace testutil
