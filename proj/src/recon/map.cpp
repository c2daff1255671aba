#include "panocal/recon/map.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "panocal/errors.hpp"

namespace panocal::recon {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

int MarkerMap::frames_observing(int i) const {
  std::set<int> frames;
  for (const TrackObs& o : tracks[i]) frames.insert(o.frame);
  return static_cast<int>(frames.size());
}

MarkerMap build_map(const std::vector<StereoFrame>& frames, const TrackingResult& tracking,
                    const std::vector<LoopClosure>& closures, double merge_radius) {
  // flat ids for (frame, local point)
  std::vector<int> offset(frames.size() + 1, 0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    offset[k + 1] = offset[k] + static_cast<int>(frames[k].local_points.size());
  }
  UnionFind uf(offset.back());
  for (std::size_t k = 1; k < tracking.matches.size(); ++k) {
    for (auto [prev, cur] : tracking.matches[k]) {
      uf.unite(offset[k - 1] + prev, offset[k] + cur);
    }
  }
  for (const LoopClosure& lc : closures) {
    for (auto [cur, old] : lc.pairs) {
      uf.unite(offset[lc.current] + cur, offset[lc.partner] + old);
    }
  }

  std::vector<int> root_to_point(offset.back(), -1);
  MarkerMap map;
  std::vector<int> counts;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const RigidTransform world_from_rig = to_rigid(frames[k].pose_world);
    for (std::size_t i = 0; i < frames[k].local_points.size(); ++i) {
      const int id = offset[k] + static_cast<int>(i);
      const int root = uf.find(id);
      int point_idx = root_to_point[root];
      if (point_idx < 0) {
        point_idx = static_cast<int>(map.points.size());
        root_to_point[root] = point_idx;
        map.points.push_back(Vec3::Zero());
        map.tracks.emplace_back();
        counts.push_back(0);
      }
      map.points[point_idx] += world_from_rig * frames[k].local_points[i];
      counts[point_idx] += 1;
      const auto [left, right] = frames[k].point_obs[i];
      map.tracks[point_idx].push_back(TrackObs{static_cast<int>(k), 0, left});
      map.tracks[point_idx].push_back(TrackObs{static_cast<int>(k), 1, right});
    }
  }
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    map.points[i] /= static_cast<double>(counts[i]);
    std::sort(map.tracks[i].begin(), map.tracks[i].end());
    map.tracks[i].erase(std::unique(map.tracks[i].begin(), map.tracks[i].end()),
                        map.tracks[i].end());
  }
  return merge_points(map, merge_radius);
}

MarkerMap merge_points(const MarkerMap& map, double radius) {
  if (!(radius > 0)) throw ConfigError("merge_points: radius must be > 0");
  MarkerMap current = map;
  while (true) {
    const std::size_t n = current.points.size();
    UnionFind uf(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((current.points[i] - current.points[j]).norm() < radius) {
          uf.unite(static_cast<int>(i), static_cast<int>(j));
          any = true;
        }
      }
    }
    if (!any) break;

    MarkerMap next;
    next.meta = current.meta;
    std::vector<int> root_to_point(n, -1);
    std::vector<int> counts;
    for (std::size_t i = 0; i < n; ++i) {
      const int root = uf.find(static_cast<int>(i));
      int idx = root_to_point[root];
      if (idx < 0) {
        idx = static_cast<int>(next.points.size());
        root_to_point[root] = idx;
        next.points.push_back(Vec3::Zero());
        next.tracks.emplace_back();
        counts.push_back(0);
      }
      next.points[idx] += current.points[i];
      counts[idx] += 1;
      next.tracks[idx].insert(next.tracks[idx].end(), current.tracks[i].begin(),
                              current.tracks[i].end());
    }
    for (std::size_t i = 0; i < next.points.size(); ++i) {
      next.points[i] /= static_cast<double>(counts[i]);
      std::sort(next.tracks[i].begin(), next.tracks[i].end());
      next.tracks[i].erase(std::unique(next.tracks[i].begin(), next.tracks[i].end()),
                           next.tracks[i].end());
    }
    current = std::move(next);
  }
  return current;
}

void fit_map_planes(MarkerMap& map, const MapPlaneParams& params) {
  std::vector<int> eligible;
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    if (!params.refined_only || map.tracks[i].empty() ||
        map.frames_observing(static_cast<int>(i)) >= 2) {
      eligible.push_back(static_cast<int>(i));
    }
  }
  std::vector<Vec3> pts;
  pts.reserve(eligible.size());
  for (int i : eligible) pts.push_back(map.points[i]);

  PlaneRansacParams ransac;
  ransac.dist_tol = params.dist_tol;
  ransac.min_support = std::min<int>(params.min_support, std::max<int>(3, pts.size() / 2));
  ransac.max_planes = params.max_planes;
  ransac.seed = params.seed;
  map.planes = extract_planes(pts, ransac);
  for (FittedPlane& fp : map.planes) {
    for (int& idx : fp.support) idx = eligible[idx];
  }
}

double mean_plane_fit_error(const MarkerMap& map) {
  double sum = 0;
  long n = 0;
  for (const FittedPlane& fp : map.planes) {
    for (int idx : fp.support) {
      sum += std::abs(fp.plane.signed_distance(map.points[idx]));
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace panocal::recon
