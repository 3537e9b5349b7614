// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smokefilter/cloud.hpp"
#include "smokefilter/intensity.hpp"
#include "smokefilter/pipeline.hpp"

namespace smokefilter {

enum class Label : std::uint8_t { environment, aerosol };

struct LabeledCloud {
  PointCloud cloud;
  std::vector<Label> labels;
};

/// Rectangular tunnel along +x, sampled on a regular grid over its walls,
/// floor and ceiling, optionally closed at both ends. The sensor sits at the origin.
struct TunnelSpec {
  double length = 30.0;
  double width = 4.0;
  double height = 3.0;
  double spacing = 0.1;  ///< grid spacing of wall points [m]
  double x_start = -8.0;
  double floor_z = -1.0;
  bool end_caps = true;  ///< close both ends with a wall
};

struct BlobSpec {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 1.0;
  std::size_t points = 0;
  double falloff = 0.0;  ///< density ~ exp(-falloff * d / radius); 0 = uniform
};

struct IntensitySpec {
  double mean = 30.0;
  double spread = 6.0;  ///< standard deviation; samples are clamped at 0
};

struct SceneSpec {
  TunnelSpec tunnel;
  std::vector<BlobSpec> blobs;
  IntensitySpec environment_intensity;
  WeibullParams aerosol_intensity{0.771938, 3.613051, 0.0};
  double range_noise_sigma = 0.01;  ///< additive range noise of environment points [m]
  std::uint64_t seed = 1;
};

/// Points a blob needs so that its mean spacing is `spacing_ratio` times the wall spacing.
std::size_t blob_point_count(double radius, double wall_spacing, double spacing_ratio);

/// 30 m tunnel with about 40k wall points and three aerosol blobs at twice
/// the wall spacing.
SceneSpec default_scene(std::uint64_t seed, double spacing_ratio = 2.0);

/// Default scene with the grid spacing chosen so that the cloud holds about
/// `total_points` points.
SceneSpec scene_for_size(std::size_t total_points, std::uint64_t seed);

/// Number of environment points the tunnel grid produces.
std::size_t tunnel_point_count(const TunnelSpec& tunnel);

/// Deterministic for a fixed spec. Environment points come first.
LabeledCloud generate_scene(const SceneSpec& spec);

/// Scales the DOSCOR ball-search radius to the scene's grid spacing.
PipelineConfig tune_for_scene(PipelineConfig cfg, const SceneSpec& spec);

inline constexpr double kSceneQueryRadiusFactor = 1.8;

struct EvalMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Rejected = aerosol-positive. Throws DataError for indices outside the cloud.
EvalMetrics score(std::span<const std::size_t> rejected, const LabeledCloud& truth);

/// Derives precision, recall and F1 from the confusion counts.
EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

struct LatencyRow {
  std::size_t size = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double hz = 0.0;
};

/// Median and p95 process_frame latency over a 10 Hz stream of the
/// standard scene at each size. Requires repetitions >= 10.
std::vector<LatencyRow> benchmark(std::span<const std::size_t> sizes, const PipelineConfig& cfg,
                                  std::size_t repetitions, std::uint64_t seed = 1);

void write_latency_csv(std::ostream& out, std::span<const LatencyRow> rows);

struct MetricsRow {
  std::string scene;
  std::string config;
  EvalMetrics metrics;
};

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace smokefilter
