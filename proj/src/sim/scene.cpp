#include "panocal/sim/scene.hpp"

#include <cmath>
#include <string>

#include "panocal/errors.hpp"
#include "panocal/rng.hpp"

namespace panocal::sim {

bool PlanePatch::contains(const Vec3& p, double edge_tol) const {
  const Vec3 rel = p - origin;
  const double u = rel.dot(u_axis);
  const double v = rel.dot(v_axis);
  return u >= -edge_tol && u <= u_len + edge_tol && v >= -edge_tol && v <= v_len + edge_tol;
}

void SceneTruth::validate(double min_spacing) const {
  if (planes.size() < 5) throw ConfigError("scene: expected >= 5 planes");
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const Marker& m = markers[i];
    if (!m.position.allFinite()) throw ConfigError("scene: non-finite marker");
    if (m.plane < 0 || m.plane >= static_cast<int>(planes.size())) {
      throw ConfigError("scene: marker plane index out of range");
    }
    if (std::abs(planes[m.plane].plane.signed_distance(m.position)) > 1e-12) {
      throw ConfigError("scene: marker " + std::to_string(i) + " off its plane");
    }
    for (std::size_t j = i + 1; j < markers.size(); ++j) {
      if ((m.position - markers[j].position).norm() < min_spacing) {
        throw ConfigError("scene: markers closer than min spacing");
      }
    }
  }
}

namespace {

PlanePatch make_patch(const Vec3& normal, const Vec3& origin, const Vec3& u_axis,
                      double u_len, const Vec3& v_axis, double v_len) {
  PlanePatch p;
  p.plane = Plane{normal, normal.dot(origin)};
  p.origin = origin;
  p.u_axis = u_axis;
  p.v_axis = v_axis;
  p.u_len = u_len;
  p.v_len = v_len;
  return p;
}

}  // namespace

SceneTruth build_room(const RoomConfig& config) {
  if (config.marker_count < 4) throw ConfigError("build_room: marker_count must be >= 4");
  if (!(config.room_size.minCoeff() > 0)) throw ConfigError("build_room: room_size must be positive");

  const double x = config.room_size.x(), y = config.room_size.y(), z = config.room_size.z();
  SceneTruth scene;
  scene.room_size = config.room_size;
  scene.seed = config.seed;
  // floor plus four walls, normals facing the interior
  scene.planes = {
      make_patch(Vec3::UnitZ(), Vec3(0, 0, 0), Vec3::UnitX(), x, Vec3::UnitY(), y),
      make_patch(Vec3::UnitX(), Vec3(0, 0, 0), Vec3::UnitY(), y, Vec3::UnitZ(), z),
      make_patch(-Vec3::UnitX(), Vec3(x, 0, 0), Vec3::UnitY(), y, Vec3::UnitZ(), z),
      make_patch(Vec3::UnitY(), Vec3(0, 0, 0), Vec3::UnitX(), x, Vec3::UnitZ(), z),
      make_patch(-Vec3::UnitY(), Vec3(0, y, 0), Vec3::UnitX(), x, Vec3::UnitZ(), z),
  };

  double total_area = 0;
  std::vector<double> cumulative;
  for (const PlanePatch& p : scene.planes) {
    total_area += p.u_len * p.v_len;
    cumulative.push_back(total_area);
  }

  Rng rng(derive_seed(config.seed, "build_room"));
  const long budget = 10L * config.marker_count;
  long attempts = 0;
  while (static_cast<int>(scene.markers.size()) < config.marker_count) {
    if (++attempts > budget) {
      throw PackingFailure("build_room: spacing " + std::to_string(config.min_spacing) +
                           " m not satisfiable within " + std::to_string(budget) + " attempts");
    }
    const double pick = rng.uniform(0, total_area);
    int plane_idx = 0;
    while (plane_idx + 1 < static_cast<int>(cumulative.size()) && pick > cumulative[plane_idx]) {
      ++plane_idx;
    }
    const PlanePatch& patch = scene.planes[plane_idx];
    const double margin = std::min(config.edge_margin, 0.25 * std::min(patch.u_len, patch.v_len));
    const Vec3 pos = patch.point_at(rng.uniform(margin, patch.u_len - margin),
                                    rng.uniform(margin, patch.v_len - margin));
    bool clear = true;
    for (const Marker& m : scene.markers) {
      if ((m.position - pos).norm() < config.min_spacing) {
        clear = false;
        break;
      }
    }
    if (clear) scene.markers.push_back(Marker{pos, plane_idx});
  }
  return scene;
}

}  // namespace panocal::sim
