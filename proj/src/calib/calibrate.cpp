#include "panocal/calib/calibrate.hpp"

#include "panocal/camloc/delaunay.hpp"
#include "panocal/camloc/triangles.hpp"
#include "panocal/errors.hpp"
#include "panocal/rng.hpp"
#include "panocal/threading.hpp"

namespace panocal::calib {

CalibrationResult calibrate_rig(const recon::MarkerMap& map,
                                const std::vector<CameraCapture>& cameras,
                                const std::vector<LidarCapture>& lidars,
                                const CalibrateParams& params) {
  if (map.points.size() < 4) throw ConfigError("calibrate_rig: map too small");

  const auto tri3d = camloc::enumerate_3d_triangles(map, 1.0);

  Vec3 bbox_lo = map.points[0], bbox_hi = map.points[0];
  for (const Vec3& p : map.points) {
    bbox_lo = bbox_lo.cwiseMin(p);
    bbox_hi = bbox_hi.cwiseMax(p);
  }

  std::map<std::string, SensorLocalization> sensors;
  std::map<std::string, std::string> failures;

  // cameras: independent localizations, then joint refinement
  std::vector<int> ok_cameras;
  std::vector<camloc::LocalizationResult> results(cameras.size());
  std::vector<std::string> errors(cameras.size());
  parallel_for(cameras.size(), [&](std::size_t c) {
    const CameraCapture& cam = cameras[c];
    try {
      const auto tri2d = camloc::delaunay_2d(cam.detections);
      camloc::PnpParams pnp = params.pnp;
      pnp.seed = derive_seed(params.seed, cam.name);
      pnp.position_prior = std::make_pair(bbox_lo.array() - 0.75, bbox_hi.array() + 0.75);
      results[c] = camloc::triangle_pnp(cam.detections, tri2d, tri3d, map.points,
                                        cam.intrinsics, pnp);
    } catch (const Error& e) {
      errors[c] = e.what();
    }
  });
  std::vector<camloc::LocalizationResult> refine_results;
  std::vector<camloc::CameraView> views;
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    if (!errors[c].empty()) {
      failures[cameras[c].name] = errors[c];
      continue;
    }
    ok_cameras.push_back(static_cast<int>(c));
    refine_results.push_back(results[c]);
    views.push_back(camloc::CameraView{cameras[c].intrinsics, cameras[c].detections});
  }
  if (!refine_results.empty()) {
    camloc::refine_multi_camera(refine_results, views, map.points, params.refine);
  }
  for (std::size_t i = 0; i < refine_results.size(); ++i) {
    const CameraCapture& cam = cameras[ok_cameras[i]];
    SensorLocalization loc;
    loc.world_from_sensor = invert(refine_results[i].pose).relabeled(cam.name, "map");
    loc.rms_px = refine_results[i].rms_px;
    loc.inliers = refine_results[i].inlier_count;
    loc.converged = refine_results[i].converged;
    sensors.emplace(cam.name, loc);
  }

  // lidars: reference-chained coarse priors
  std::optional<Mat3> reference_rotation;  // map <- reference sensor
  if (!refine_results.empty()) {
    reference_rotation = refine_results[0].pose.rotation().transpose();
  }
  if (!lidars.empty()) {
    lidarloc::DensePointCloud dense;
    try {
      dense = lidarloc::densify_reference(map, params.densify_spacing, params.densify_padding);
    } catch (const Error& e) {
      for (const auto& lidar : lidars) failures[lidar.name] = e.what();
      dense.points.clear();
    }
    for (std::size_t l = 0; l < lidars.size() && !dense.points.empty(); ++l) {
      const LidarCapture& lidar = lidars[l];
      std::optional<Mat3> prior;
      if (reference_rotation) {
        // coarse_rpy maps reference coords into the lidar frame
        const Mat3 lidar_from_ref = rotation_from_euler_xyz(
            lidar.coarse_rpy_deg.x(), lidar.coarse_rpy_deg.y(), lidar.coarse_rpy_deg.z());
        prior = *reference_rotation * lidar_from_ref.transpose();
      }
      try {
        const lidarloc::LidarLocalization loc =
            lidarloc::localize_lidar(lidar.points, map, dense, prior, params.lidar);
        SensorLocalization sensor;
        sensor.world_from_sensor = loc.pose.relabeled(lidar.name, "map");
        sensor.rms_m = loc.rms_m;
        sensor.converged = loc.converged;
        sensors.emplace(lidar.name, sensor);
        if (!reference_rotation) {
          reference_rotation = loc.pose.rotation();  // first lidar anchors the chain
        }
      } catch (const Error& e) {
        failures[lidar.name] = e.what();
      }
    }
  }

  if (sensors.size() < 2) {
    std::string detail = "calibrate_rig: fewer than two sensors localized";
    for (const auto& [name, why] : failures) detail += "; " + name + ": " + why;
    throw LocalizationFailure(detail);
  }
  CalibrationResult result = derive_extrinsics(sensors);
  result.failures = failures;
  return result;
}

}  // namespace panocal::calib
