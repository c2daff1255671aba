#include "panocal/recon/triangle_match.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "panocal/errors.hpp"

namespace panocal::recon {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<double, 3> edge;  // edge[i] is opposite v[i]; sorted ascending
};

// All triangles with every edge <= max_edge, vertices reordered so that the
// opposite-edge lengths come out sorted.
std::vector<Tri> enumerate_triangles(std::span<const Vec3> pts, double max_edge) {
  std::vector<Tri> tris;
  const int n = static_cast<int>(pts.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double ab = (pts[a] - pts[b]).norm();
      if (ab > max_edge) continue;
      for (int c = b + 1; c < n; ++c) {
        const double bc = (pts[b] - pts[c]).norm();
        const double ca = (pts[c] - pts[a]).norm();
        if (bc > max_edge || ca > max_edge) continue;
        Tri t;
        // vertex order (a, b, c); opposite edges (bc, ca, ab)
        std::array<std::pair<double, int>, 3> by_edge = {
            std::make_pair(bc, a), std::make_pair(ca, b), std::make_pair(ab, c)};
        std::sort(by_edge.begin(), by_edge.end());
        for (int i = 0; i < 3; ++i) {
          t.edge[i] = by_edge[i].first;
          t.v[i] = by_edge[i].second;
        }
        tris.push_back(t);
      }
    }
  }
  return tris;
}

constexpr std::array<std::array<int, 3>, 6> kPerms = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

}  // namespace

std::vector<std::pair<int, int>> consensus_pairs(std::span<const Vec3> src,
                                                 std::span<const Vec3> dst,
                                                 const RigidTransform& transform,
                                                 double inlier_tol) {
  struct Cand {
    double dist;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < static_cast<int>(src.size()); ++i) {
    const Vec3 mapped = transform * src[i];
    for (int j = 0; j < static_cast<int>(dst.size()); ++j) {
      const double d = (mapped - dst[j]).norm();
      if (d <= inlier_tol) cands.push_back({d, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<char> used_src(src.size(), 0), used_dst(dst.size(), 0);
  std::vector<std::pair<int, int>> pairs;
  for (const Cand& c : cands) {
    if (used_src[c.i] || used_dst[c.j]) continue;
    used_src[c.i] = used_dst[c.j] = 1;
    pairs.emplace_back(c.i, c.j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

TriangleMatch match_triangles(std::span<const Vec3> src, std::span<const Vec3> dst,
                              const TriangleMatchParams& params) {
  if (src.size() < 3 || dst.size() < 3) {
    throw NoConsensus("match_triangles: need >= 3 points on both sides");
  }
  const std::vector<Tri> src_tris = enumerate_triangles(src, params.max_edge);
  std::vector<Tri> dst_tris = enumerate_triangles(dst, params.max_edge);
  if (src_tris.empty() || dst_tris.empty()) {
    throw NoConsensus("match_triangles: no triangles under the edge cap");
  }
  // sort by shortest edge for range lookup
  std::sort(dst_tris.begin(), dst_tris.end(),
            [](const Tri& a, const Tri& b) { return a.edge[0] < b.edge[0]; });
  std::vector<double> dst_e0(dst_tris.size());
  for (std::size_t i = 0; i < dst_tris.size(); ++i) dst_e0[i] = dst_tris[i].edge[0];

  TriangleMatch best;
  int best_count = 0;
  std::array<Vec3, 3> tri_src, tri_dst;

  for (const Tri& s : src_tris) {
    const auto lo = std::lower_bound(dst_e0.begin(), dst_e0.end(), s.edge[0] - params.edge_tol);
    const auto hi = std::upper_bound(dst_e0.begin(), dst_e0.end(), s.edge[0] + params.edge_tol);
    for (auto it = lo; it != hi; ++it) {
      const Tri& d = dst_tris[it - dst_e0.begin()];
      if (std::abs(s.edge[1] - d.edge[1]) > params.edge_tol ||
          std::abs(s.edge[2] - d.edge[2]) > params.edge_tol) {
        continue;
      }
      // Try every vertex assignment whose matched edges all agree; with the
      // sorted signature the identity permutation is the common case, the
      // rest only fire for near-isosceles triangles.
      for (const auto& perm : kPerms) {
        bool compatible = true;
        for (int i = 0; i < 3 && compatible; ++i) {
          compatible = std::abs(s.edge[i] - d.edge[perm[i]]) <= params.edge_tol;
        }
        if (!compatible) continue;
        for (int i = 0; i < 3; ++i) {
          tri_src[i] = src[s.v[i]];
          tri_dst[i] = dst[d.v[perm[i]]];
        }
        RigidTransform t;
        try {
          t = rigid_fit(tri_src, tri_dst);
        } catch (const DegenerateConfiguration&) {
          continue;
        }
        const auto pairs = consensus_pairs(src, dst, t, params.inlier_tol);
        if (static_cast<int>(pairs.size()) > best_count) {
          best_count = static_cast<int>(pairs.size());
          best.transform = t;
          best.inliers = pairs;
        }
      }
    }
  }
  if (best_count < 3) throw NoConsensus("match_triangles: best consensus below 3");

  // polish on the full inlier set; keep only if the consensus does not shrink
  std::vector<Vec3> in_src, in_dst;
  for (auto [i, j] : best.inliers) {
    in_src.push_back(src[i]);
    in_dst.push_back(dst[j]);
  }
  try {
    const RigidTransform refined = rigid_fit(in_src, in_dst);
    const auto pairs = consensus_pairs(src, dst, refined, params.inlier_tol);
    if (pairs.size() >= best.inliers.size()) {
      best.transform = refined;
      best.inliers = pairs;
    }
  } catch (const DegenerateConfiguration&) {
  }
  return best;
}

}  // namespace panocal::recon
