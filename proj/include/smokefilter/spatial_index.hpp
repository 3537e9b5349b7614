// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smokefilter/cloud.hpp"

namespace smokefilter {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact kd-tree over a point sequence in 2D (XY projection) or 3D.
///
/// Indices returned by queries are positions in the sequence that was
/// indexed. The tree is immutable after construction, so concurrent
/// queries are safe.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(std::span<const Point> points, int dims);
  SpatialIndex(const PointCloud& cloud, int dims) : SpatialIndex(std::span<const Point>(cloud.points), dims) {}

  int dims() const { return dims_; }
  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }

  /// Indices within Euclidean distance <= radius of q, ascending.
  std::vector<std::size_t> radius_query(const Point& q, double radius) const;
  /// Same, centred on indexed point `member` and excluding it.
  std::vector<std::size_t> radius_query(std::size_t member, double radius) const;

  /// Radius neighbors of an indexed point (self excluded) with distances, ascending by index.
  std::vector<Neighbor> radius_neighbors(std::size_t member, double radius) const;
  /// Neighbor count only; avoids materializing the result.
  std::size_t radius_count(std::size_t member, double radius) const;

  /// k nearest by distance, ties broken by lower index.
  std::vector<Neighbor> knn_query(const Point& q, std::size_t k) const;
  /// Same, for an indexed point, excluding itself.
  std::vector<Neighbor> knn_query(std::size_t member, std::size_t k) const;

 private:
  using Coord = std::array<double, 3>;

  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int dim = 0;
    double split = 0.0;
  };

  static constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);
  static constexpr std::uint32_t kLeafSize = 12;

  Coord project(const Point& p) const;
  double dist2(const Coord& a, const Coord& b) const;
  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  template <typename Visit>
  void radius_visit(const Coord& q, double r2, std::size_t exclude, Visit&& visit) const;
  std::vector<Neighbor> knn_impl(const Coord& q, std::size_t k, std::size_t exclude) const;

  int dims_ = 3;
  std::vector<Coord> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace smokefilter
