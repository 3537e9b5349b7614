// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/spatial_filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "smokefilter/errors.hpp"
#include "smokefilter/spatial_index.hpp"

namespace smokefilter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Mean distance to the k nearest neighbors of every point.
std::vector<double> mean_knn_distances(const SpatialIndex& index, std::size_t k) {
  std::vector<double> out(index.size(), 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto nbrs = index.knn_query(i, k);
    if (nbrs.empty()) continue;
    double sum = 0.0;
    for (const Neighbor& n : nbrs) sum += n.distance;
    out[i] = sum / static_cast<double>(nbrs.size());
  }
  return out;
}

std::pair<double, double> mean_and_stddev(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

Partition ror(const PointCloud& cloud, const RorConfig& cfg) {
  const SpatialIndex index(cloud, 3);
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) reject[i] = index.radius_count(i, cfg.radius) < cfg.min_neighbors;
  return Partition::from_mask(reject);
}

Partition sor(const PointCloud& cloud, const SorConfig& cfg) {
  const SpatialIndex index(cloud, 3);
  const std::vector<double> mean_dist = mean_knn_distances(index, cfg.k);
  const auto [mu, sigma] = mean_and_stddev(mean_dist);
  const double threshold = mu + cfg.std_mul * sigma;
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) reject[i] = mean_dist[i] > threshold;
  return Partition::from_mask(reject);
}

Partition dror(const PointCloud& cloud, const DrorConfig& cfg) {
  const SpatialIndex index(cloud, 3);
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double radius =
        std::max(cfg.min_search_radius, cfg.beta * range_of(cloud.points[i]) * cfg.angular_resolution);
    reject[i] = index.radius_count(i, radius) < cfg.min_neighbors;
  }
  return Partition::from_mask(reject);
}

Partition dsor(const PointCloud& cloud, const DsorConfig& cfg) {
  const SpatialIndex index(cloud, 3);
  const std::vector<double> mean_dist = mean_knn_distances(index, cfg.k);
  const auto [mu, sigma] = mean_and_stddev(mean_dist);
  const double global = mu + cfg.std_mul * sigma;
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    reject[i] = mean_dist[i] > global * cfg.range_mul * range_of(cloud.points[i]);
  }
  return Partition::from_mask(reject);
}

Partition lior(const PointCloud& cloud, const LiorConfig& cfg) {
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    reject[i] = p.intensity < cfg.intensity_threshold && range_of(p) <= cfg.range_bound;
  }
  return Partition::from_mask(reject);
}

}  // namespace

void validate(const Ror2dConfig& cfg) {
  if (!(cfg.r_nn > 0.0)) throw ParameterError("ror2d: r_nn must be positive");
}

Partition ror2d_filter(const PointCloud& cloud, const Ror2dConfig& cfg) {
  validate(cfg);
  const SpatialIndex index(cloud, 2);
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) reject[i] = index.radius_count(i, cfg.r_nn) < cfg.k_nn;
  return Partition::from_mask(reject);
}

BaselineConfig baseline_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ror") return RorConfig{};
  if (lower == "sor") return SorConfig{};
  if (lower == "dror") return DrorConfig{};
  if (lower == "dsor") return DsorConfig{};
  if (lower == "lior") return LiorConfig{};
  throw ParameterError("unknown baseline filter '" + std::string(name) + "'");
}

std::string baseline_name(const BaselineConfig& cfg) {
  return std::visit(overloaded{[](const RorConfig&) { return "ror"; }, [](const SorConfig&) { return "sor"; },
                               [](const DrorConfig&) { return "dror"; }, [](const DsorConfig&) { return "dsor"; },
                               [](const LiorConfig&) { return "lior"; }},
                    cfg);
}

void validate(const BaselineConfig& cfg) {
  std::visit(overloaded{
                 [](const RorConfig& c) {
                   if (!(c.radius > 0.0)) throw ParameterError("ror: radius must be positive");
                 },
                 [](const SorConfig& c) {
                   if (c.k == 0 || !(c.std_mul >= 0.0)) throw ParameterError("sor: k and std_mul must be positive");
                 },
                 [](const DrorConfig& c) {
                   if (!(c.beta > 0.0) || !(c.angular_resolution > 0.0) || !(c.min_search_radius > 0.0)) {
                     throw ParameterError("dror: beta, angular_resolution and min_search_radius must be positive");
                   }
                 },
                 [](const DsorConfig& c) {
                   if (c.k == 0 || !(c.std_mul >= 0.0) || !(c.range_mul > 0.0)) {
                     throw ParameterError("dsor: k, std_mul and range_mul must be positive");
                   }
                 },
                 [](const LiorConfig& c) {
                   if (!(c.intensity_threshold >= 0.0) || !(c.range_bound > 0.0)) {
                     throw ParameterError("lior: threshold and range bound must be positive");
                   }
                 },
             },
             cfg);
}

Partition baseline_filter(const PointCloud& cloud, const BaselineConfig& cfg) {
  validate(cfg);
  return std::visit(overloaded{[&](const RorConfig& c) { return ror(cloud, c); },
                               [&](const SorConfig& c) { return sor(cloud, c); },
                               [&](const DrorConfig& c) { return dror(cloud, c); },
                               [&](const DsorConfig& c) { return dsor(cloud, c); },
                               [&](const LiorConfig& c) { return lior(cloud, c); }},
                    cfg);
}

}  // namespace smokefilter
