// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace smokefilter {

/// Cartesian point in the sensor frame (x forward, y left, z up) with
/// the return intensity.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// r: range, theta: inclination from +z in [0, pi], phi: azimuth in (-pi, pi].
struct SphericalPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;
  std::optional<double> timestamp;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }
};

SphericalPoint cart_to_sph(const Point& p);

/// Inverse of cart_to_sph; intensity is not carried by SphericalPoint.
Point sph_to_cart(const SphericalPoint& s, double intensity = 0.0);

/// Distance from the sensor origin.
double range_of(const Point& p);

/// Index-level split of a cloud produced by every filter stage. Both lists
/// are ascending and together cover [0, n) exactly once.
struct Partition {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> rejected;

  static Partition keep_all(std::size_t n);
  /// Builds a partition from a per-point rejection mask.
  static Partition from_mask(const std::vector<bool>& reject);
};

/// Gathers the listed points, preserving frame metadata.
PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices);

/// Materializes (kept, rejected) clouds for a partition.
std::pair<PointCloud, PointCloud> split(const PointCloud& cloud, const Partition& part);

/// Maps indices relative to a subset back to the parent index space.
std::vector<std::size_t> remap(std::span<const std::size_t> local,
                               std::span<const std::size_t> parent_of_local);

}  // namespace smokefilter
