// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "smokefilter/cloud.hpp"
#include "smokefilter/spatial_index.hpp"

namespace smokefilter {

/// Dynamic onboard statistical cluster outlier removal parameters.
struct DoscorConfig {
  double query_radius = 0.05;  ///< ball-search radius [m]
  std::size_t k_min = 6;       ///< points with <= k_min neighbors are dropped first
  double c_th = 0.4;           ///< sigma weight of the global threshold
  double r_th = 0.45;          ///< range scale of the dynamic threshold
};

void validate(const DoscorConfig& cfg);

struct Neighborhood {
  std::size_t count = 0;
  double mean_distance = 0.0;  ///< 0 when count == 0
};

/// Per-point neighbor count and mean neighbor distance within `radius`, self excluded.
std::vector<Neighborhood> point_neighborhoods(const SpatialIndex& index, double radius);

struct NeighborStats {
  std::vector<Neighborhood> points;
  std::vector<bool> survives;  ///< count > k_min
  std::size_t survivors = 0;
  double mu = 0.0;     ///< mean of survivors' mean distances
  double sigma = 0.0;  ///< sample standard deviation of the same
};

/// Throws StatsError when fewer than two points survive the count pre-filter.
NeighborStats neighbor_stats(const PointCloud& cloud, const DoscorConfig& cfg);

/// s_th = mu + sigma * c_th.
double static_threshold(const NeighborStats& stats, const DoscorConfig& cfg);

/// Per-point threshold s_th * range * r_th.
inline double dynamic_threshold(double s_th, double range, const DoscorConfig& cfg) {
  return s_th * range * cfg.r_th;
}

/// Two-phase rejection: sparse points first, then points whose mean
/// neighbor distance exceeds their range-scaled threshold. Propagates
/// StatsError; the pipeline turns it into a pass-through.
Partition doscor_filter(const PointCloud& cloud, const DoscorConfig& cfg);

}  // namespace smokefilter
