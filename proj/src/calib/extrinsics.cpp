#include "panocal/calib/extrinsics.hpp"

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"

namespace panocal::calib {

const Pose& CalibrationResult::extrinsic(const std::string& x, const std::string& y) const {
  const auto it = pairwise.find({x, y});
  if (it == pairwise.end()) throw UnknownSensor("no extrinsic " + x + " <- " + y);
  return it->second;
}

CalibrationResult derive_extrinsics(const std::map<std::string, SensorLocalization>& sensors) {
  if (sensors.size() < 2) throw ConfigError("derive_extrinsics: need >= 2 localized sensors");
  CalibrationResult result;
  result.sensors = sensors;
  for (const auto& [x, sx] : sensors) {
    for (const auto& [y, sy] : sensors) {
      if (x == y) continue;
      const Pose pose_x = sx.world_from_sensor.relabeled(x, "map");
      const Pose pose_y = sy.world_from_sensor.relabeled(y, "map");
      result.pairwise.emplace(std::make_pair(x, y), compose(invert(pose_x), pose_y));
    }
  }
  return result;
}

recon::MarkerMap add_map_noise(const recon::MarkerMap& map, double sigma, std::uint64_t seed) {
  if (sigma < 0) throw ConfigError("add_map_noise: sigma must be >= 0");
  recon::MarkerMap noisy = map;
  noisy.meta.map_sigma = sigma;
  if (sigma == 0) return noisy;
  Rng rng(derive_seed(seed, "map_noise"));
  for (Vec3& p : noisy.points) p += rng.gaussian3(sigma);
  if (!map.planes.empty()) {
    recon::MapPlaneParams params;
    params.dist_tol = std::max(0.015, 2.5 * sigma);
    params.seed = derive_seed(seed, "map_noise_planes");
    recon::fit_map_planes(noisy, params);
  }
  return noisy;
}

}  // namespace panocal::calib
