// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "smokefilter/errors.hpp"

namespace smokefilter {

SpatialIndex::SpatialIndex(std::span<const Point> points, int dims) : dims_(dims) {
  if (dims != 2 && dims != 3) throw ParameterError("spatial index dimensionality must be 2 or 3");
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError("spatial index: too many points");
  }
  coords_.reserve(points.size());
  for (const Point& p : points) coords_.push_back(project(p));
  order_.resize(coords_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!coords_.empty()) {
    nodes_.reserve(2 * coords_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(coords_.size()));
  }
}

SpatialIndex::Coord SpatialIndex::project(const Point& p) const {
  return dims_ == 2 ? Coord{p.x, p.y, 0.0} : Coord{p.x, p.y, p.z};
}

double SpatialIndex::dist2(const Coord& a, const Coord& b) const {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  // Split on the axis of largest extent.
  Coord lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Coord hi{-lo[0], -lo[1], -lo[2]};
  for (std::uint32_t i = begin; i < end; ++i) {
    const Coord& c = coords_[order_[i]];
    for (int d = 0; d < dims_; ++d) {
      lo[d] = std::min(lo[d], c[d]);
      hi[d] = std::max(hi[d], c[d]);
    }
  }
  int dim = 0;
  for (int d = 1; d < dims_; ++d) {
    if (hi[d] - lo[d] > hi[dim] - lo[dim]) dim = d;
  }
  if (hi[dim] - lo[dim] <= 0.0) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return coords_[a][dim] < coords_[b][dim]; });
  const double split = coords_[order_[mid]][dim];

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.dim = dim;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

template <typename Visit>
void SpatialIndex::radius_visit(const Coord& q, double r2, std::size_t exclude, Visit&& visit) const {
  if (nodes_.empty()) return;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = order_[i];
        if (idx == exclude) continue;
        const double d2 = dist2(q, coords_[idx]);
        if (d2 <= r2) visit(idx, d2);
      }
      continue;
    }
    const double diff = q[node.dim] - node.split;
    // Left holds coords <= split, right holds coords >= split.
    if (diff <= 0.0 || diff * diff <= r2) stack.push_back(node.left);
    if (diff >= 0.0 || diff * diff <= r2) stack.push_back(node.right);
  }
}

std::vector<std::size_t> SpatialIndex::radius_query(const Point& q, double radius) const {
  if (!(radius > 0.0)) throw ParameterError("radius_query: radius must be positive");
  std::vector<std::size_t> out;
  radius_visit(project(q), radius * radius, kNoExclusion, [&](std::size_t i, double) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SpatialIndex::radius_query(std::size_t member, double radius) const {
  if (!(radius > 0.0)) throw ParameterError("radius_query: radius must be positive");
  if (member >= size()) throw ParameterError("radius_query: member index out of range");
  std::vector<std::size_t> out;
  radius_visit(coords_[member], radius * radius, member, [&](std::size_t i, double) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> SpatialIndex::radius_neighbors(std::size_t member, double radius) const {
  if (!(radius > 0.0)) throw ParameterError("radius_neighbors: radius must be positive");
  if (member >= size()) throw ParameterError("radius_neighbors: member index out of range");
  std::vector<Neighbor> out;
  radius_visit(coords_[member], radius * radius, member,
               [&](std::size_t i, double d2) { out.push_back({i, std::sqrt(d2)}); });
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  return out;
}

std::size_t SpatialIndex::radius_count(std::size_t member, double radius) const {
  if (!(radius > 0.0)) throw ParameterError("radius_count: radius must be positive");
  if (member >= size()) throw ParameterError("radius_count: member index out of range");
  std::size_t n = 0;
  radius_visit(coords_[member], radius * radius, member, [&](std::size_t, double) { ++n; });
  return n;
}

std::vector<Neighbor> SpatialIndex::knn_impl(const Coord& q, std::size_t k, std::size_t exclude) const {
  using Entry = std::pair<double, std::size_t>;  // (d2, index), lexicographic
  std::priority_queue<Entry> heap;               // worst candidate on top
  if (!nodes_.empty()) {
    // Each entry carries a lower bound on the squared distance to its cell.
    std::vector<std::pair<std::int32_t, double>> stack{{0, 0.0}};
    while (!stack.empty()) {
      const auto [id, bound] = stack.back();
      stack.pop_back();
      if (heap.size() == k && bound > heap.top().first) continue;
      const Node& node = nodes_[id];
      if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
          const std::uint32_t idx = order_[i];
          if (idx == exclude) continue;
          const Entry e{dist2(q, coords_[idx]), idx};
          if (heap.size() < k) {
            heap.push(e);
          } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
          }
        }
        continue;
      }
      const double diff = q[node.dim] - node.split;
      const std::int32_t near = diff <= 0.0 ? node.left : node.right;
      const std::int32_t far = diff <= 0.0 ? node.right : node.left;
      stack.emplace_back(far, std::max(bound, diff * diff));
      stack.emplace_back(near, bound);
    }
  }
  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = Neighbor{heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

std::vector<Neighbor> SpatialIndex::knn_query(const Point& q, std::size_t k) const {
  if (k == 0) throw ParameterError("knn_query: k must be at least 1");
  return knn_impl(project(q), k, kNoExclusion);
}

std::vector<Neighbor> SpatialIndex::knn_query(std::size_t member, std::size_t k) const {
  if (k == 0) throw ParameterError("knn_query: k must be at least 1");
  if (member >= size()) throw ParameterError("knn_query: member index out of range");
  return knn_impl(coords_[member], k, member);
}

}  // namespace smokefilter
