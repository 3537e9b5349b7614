// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/cloud.hpp"

#include <cmath>

namespace smokefilter {

SphericalPoint cart_to_sph(const Point& p) {
  // rho is the squared axial radius.
  const double rho = p.x * p.x + p.y * p.y;
  SphericalPoint s;
  s.r = std::sqrt(rho + p.z * p.z);
  s.theta = std::atan2(std::sqrt(rho), p.z);
  s.phi = std::atan2(p.y, p.x);
  // atan2 yields -pi for (-0.0, x<0); fold onto the half-open interval.
  if (s.phi == -M_PI) s.phi = M_PI;
  return s;
}

Point sph_to_cart(const SphericalPoint& s, double intensity) {
  const double st = std::sin(s.theta);
  return Point{s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi),
               s.r * std::cos(s.theta), intensity};
}

double range_of(const Point& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

Partition Partition::keep_all(std::size_t n) {
  Partition part;
  part.kept.resize(n);
  for (std::size_t i = 0; i < n; ++i) part.kept[i] = i;
  return part;
}

Partition Partition::from_mask(const std::vector<bool>& reject) {
  Partition part;
  for (std::size_t i = 0; i < reject.size(); ++i) {
    (reject[i] ? part.rejected : part.kept).push_back(i);
  }
  return part;
}

PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.timestamp = cloud.timestamp;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(cloud.points[i]);
  return out;
}

std::pair<PointCloud, PointCloud> split(const PointCloud& cloud, const Partition& part) {
  return {select(cloud, part.kept), select(cloud, part.rejected)};
}

std::vector<std::size_t> remap(std::span<const std::size_t> local,
                               std::span<const std::size_t> parent_of_local) {
  std::vector<std::size_t> out;
  out.reserve(local.size());
  for (std::size_t i : local) out.push_back(parent_of_local[i]);
  return out;
}

}  // namespace smokefilter
