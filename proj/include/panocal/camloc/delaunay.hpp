#pragma once

#include <array>
#include <span>
#include <vector>

#include "panocal/types.hpp"

namespace panocal::camloc {

struct Triangle2D {
  std::array<int, 3> v;                 // indices into the detection list
  std::array<double, 3> edges_sorted;   // px, ascending
  double min_angle_deg = 0;
  double edge_ratio = 0;                // max/min edge
};

/// Plain Delaunay triangulation (Bowyer-Watson); vertex index triples.
/// Throws DegenerateInput for < 3 or collinear points.
std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Vec2> points);

/// Delaunay triangulation followed by the shape filter: triangles with a
/// minimum inner angle <= min_angle_deg or edge ratio >= max_edge_ratio
/// are removed.
std::vector<Triangle2D> delaunay_2d(std::span<const Vec2> detections,
                                    double min_angle_deg = 20.0,
                                    double max_edge_ratio = 5.0);

}  // namespace panocal::camloc
