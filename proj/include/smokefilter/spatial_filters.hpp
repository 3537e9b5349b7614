// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "smokefilter/cloud.hpp"

namespace smokefilter {

/// Final-stage radius outlier removal on the XY projection.
struct Ror2dConfig {
  double r_nn = 0.15;      ///< [m]
  std::size_t k_nn = 6;    ///< minimum acceptable neighbor count
};

void validate(const Ror2dConfig& cfg);

/// Rejects points with fewer than k_nn XY-neighbors within r_nn.
Partition ror2d_filter(const PointCloud& cloud, const Ror2dConfig& cfg);

// Baselines, with the defaults of their original publications.

struct RorConfig {
  double radius = 0.1;
  std::size_t min_neighbors = 3;
};

struct SorConfig {
  std::size_t k = 10;
  double std_mul = 1.0;
};

/// Search radius max(min_search_radius, beta * range * angular_resolution).
struct DrorConfig {
  double beta = 3.0;
  double angular_resolution = 0.0035;  ///< [rad]
  double min_search_radius = 0.04;
  std::size_t min_neighbors = 3;
};

/// Mean k-NN distance against (mu + std_mul * sigma) * range_mul * range.
struct DsorConfig {
  std::size_t k = 4;
  double std_mul = 0.01;
  double range_mul = 0.05;
};

/// Low-intensity points inside the range bound are rejected.
struct LiorConfig {
  double intensity_threshold = 2.0;
  double range_bound = 20.0;
};

using BaselineConfig = std::variant<RorConfig, SorConfig, DrorConfig, DsorConfig, LiorConfig>;

/// Default configuration for "ror", "sor", "dror", "dsor" or "lior"
/// (case-insensitive). Throws ParameterError for anything else.
BaselineConfig baseline_from_name(std::string_view name);
std::string baseline_name(const BaselineConfig& cfg);

void validate(const BaselineConfig& cfg);

Partition baseline_filter(const PointCloud& cloud, const BaselineConfig& cfg);

}  // namespace smokefilter
