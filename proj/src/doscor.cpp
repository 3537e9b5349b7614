// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/doscor.hpp"

#include <cmath>

#include "smokefilter/errors.hpp"

namespace smokefilter {

void validate(const DoscorConfig& cfg) {
  if (!(cfg.query_radius > 0.0)) throw ParameterError("doscor: query_radius must be positive");
  if (!(cfg.c_th >= 0.0)) throw ParameterError("doscor: c_th must be non-negative");
  if (!(cfg.r_th > 0.0)) throw ParameterError("doscor: r_th must be positive");
}

std::vector<Neighborhood> point_neighborhoods(const SpatialIndex& index, double radius) {
  std::vector<Neighborhood> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::vector<Neighbor> nbrs = index.radius_neighbors(i, radius);
    double sum = 0.0;
    for (const Neighbor& n : nbrs) sum += n.distance;
    out[i].count = nbrs.size();
    out[i].mean_distance = nbrs.empty() ? 0.0 : sum / static_cast<double>(nbrs.size());
  }
  return out;
}

NeighborStats neighbor_stats(const PointCloud& cloud, const DoscorConfig& cfg) {
  validate(cfg);
  NeighborStats stats;
  const SpatialIndex index(cloud, 3);
  stats.points = point_neighborhoods(index, cfg.query_radius);
  stats.survives.resize(stats.points.size());

  double sum = 0.0;
  for (std::size_t i = 0; i < stats.points.size(); ++i) {
    stats.survives[i] = stats.points[i].count > cfg.k_min;
    if (stats.survives[i]) {
      ++stats.survivors;
      sum += stats.points[i].mean_distance;
    }
  }
  if (stats.survivors < 2) throw StatsError("doscor: fewer than two points survive the neighbor-count filter");

  const double n = static_cast<double>(stats.survivors);
  stats.mu = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < stats.points.size(); ++i) {
    if (!stats.survives[i]) continue;
    const double d = stats.points[i].mean_distance - stats.mu;
    ss += d * d;
  }
  stats.sigma = std::sqrt(ss / (n - 1.0));
  return stats;
}

double static_threshold(const NeighborStats& stats, const DoscorConfig& cfg) {
  return stats.mu + stats.sigma * cfg.c_th;
}

Partition doscor_filter(const PointCloud& cloud, const DoscorConfig& cfg) {
  const NeighborStats stats = neighbor_stats(cloud, cfg);
  const double s_th = static_threshold(stats, cfg);
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!stats.survives[i]) {
      reject[i] = true;
      continue;
    }
    const double d_th = dynamic_threshold(s_th, range_of(cloud.points[i]), cfg);
    reject[i] = stats.points[i].mean_distance > d_th;
  }
  return Partition::from_mask(reject);
}

}  // namespace smokefilter
