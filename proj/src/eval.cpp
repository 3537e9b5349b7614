// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "smokefilter/errors.hpp"

namespace smokefilter {

namespace {

struct Grid {
  std::size_t along = 0;   // samples along x
  std::size_t around = 0;  // samples around the cross-section perimeter
  double step_around = 0.0;
  std::size_t cap_y = 0;  // interior cap samples across
  std::size_t cap_z = 0;  // interior cap samples up
};

Grid tunnel_grid(const TunnelSpec& t) {
  Grid g;
  g.along = static_cast<std::size_t>(std::floor(t.length / t.spacing + 1e-9)) + 1;
  const double perimeter = 2.0 * (t.width + t.height);
  g.around = std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(perimeter / t.spacing)));
  g.step_around = perimeter / static_cast<double>(g.around);
  if (t.end_caps) {
    // cap interior only; its rim is already part of the perimeter ring
    g.cap_y = static_cast<std::size_t>(std::max(0.0, std::ceil(t.width / t.spacing - 1e-9) - 1.0));
    g.cap_z = static_cast<std::size_t>(std::max(0.0, std::ceil(t.height / t.spacing - 1e-9) - 1.0));
  }
  return g;
}

// Point on the cross-section at arc length s, walking floor, right wall,
// ceiling and left wall.
std::pair<double, double> perimeter_point(const TunnelSpec& t, double s) {
  const double y0 = -0.5 * t.width;
  const double z0 = t.floor_z;
  if (s < t.width) return {y0 + s, z0};
  s -= t.width;
  if (s < t.height) return {-y0, z0 + s};
  s -= t.height;
  if (s < t.width) return {-y0 - s, z0 + t.height};
  s -= t.width;
  return {y0, z0 + t.height - s};
}

void validate(const SceneSpec& spec) {
  const TunnelSpec& t = spec.tunnel;
  if (!(t.length > 0.0 && t.width > 0.0 && t.height > 0.0)) throw ParameterError("scene: tunnel dimensions must be positive");
  if (!(t.spacing > 0.0) || t.spacing >= std::min(t.width, t.height)) {
    throw ParameterError("scene: spacing must be positive and smaller than the tunnel cross-section");
  }
  for (const BlobSpec& b : spec.blobs) {
    if (!(b.radius > 0.0)) throw ParameterError("scene: blob radius must be positive");
    if (!(b.falloff >= 0.0)) throw ParameterError("scene: blob falloff must be non-negative");
  }
  if (!(spec.range_noise_sigma >= 0.0)) throw ParameterError("scene: range noise must be non-negative");
  if (!(spec.environment_intensity.spread >= 0.0)) throw ParameterError("scene: intensity spread must be non-negative");
  smokefilter::validate(spec.aerosol_intensity);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

std::size_t blob_point_count(double radius, double wall_spacing, double spacing_ratio) {
  const double spacing = wall_spacing * spacing_ratio;
  const double volume = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  return static_cast<std::size_t>(std::llround(volume / (spacing * spacing * spacing)));
}

SceneSpec default_scene(std::uint64_t seed, double spacing_ratio) {
  SceneSpec spec;
  spec.seed = seed;
  const double radius = 1.2;
  const std::size_t n = blob_point_count(radius, spec.tunnel.spacing, spacing_ratio);
  spec.blobs = {
      BlobSpec{{10.0, 0.0, 0.5}, radius, n, 0.0},
      BlobSpec{{14.0, 0.3, 0.4}, radius, n, 0.0},
      BlobSpec{{18.0, -0.3, 0.6}, radius, n, 0.0},
  };
  return spec;
}

std::size_t tunnel_point_count(const TunnelSpec& tunnel) {
  const Grid g = tunnel_grid(tunnel);
  return g.along * g.around + 2 * g.cap_y * g.cap_z;
}

SceneSpec scene_for_size(std::size_t total_points, std::uint64_t seed) {
  SceneSpec spec = default_scene(seed);
  const double reference = static_cast<double>(tunnel_point_count(spec.tunnel) + 3 * spec.blobs[0].points);
  // Point count scales with 1/spacing^2 for walls; blobs keep the same spacing ratio.
  spec.tunnel.spacing *= std::sqrt(reference / static_cast<double>(std::max<std::size_t>(total_points, 1)));
  for (BlobSpec& b : spec.blobs) b.points = blob_point_count(b.radius, spec.tunnel.spacing, 2.0);
  return spec;
}

LabeledCloud generate_scene(const SceneSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> standard_normal(0.0, 1.0);
  std::weibull_distribution<double> aerosol_intensity(spec.aerosol_intensity.gamma, spec.aerosol_intensity.alpha);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> accept(0.0, 1.0);

  LabeledCloud out;
  const TunnelSpec& t = spec.tunnel;
  const Grid g = tunnel_grid(t);
  out.cloud.frame_id = "sensor";
  out.cloud.points.reserve(tunnel_point_count(t));

  auto emit = [&](double x, double y, double z) {
    Point p{x, y, z, 0.0};
    const double r = range_of(p);
    if (r > 0.0 && spec.range_noise_sigma > 0.0) {
      const double scale = (r + spec.range_noise_sigma * standard_normal(rng)) / r;
      p.x *= scale;
      p.y *= scale;
      p.z *= scale;
    }
    p.intensity =
        std::max(0.0, spec.environment_intensity.mean + spec.environment_intensity.spread * standard_normal(rng));
    out.cloud.points.push_back(p);
    out.labels.push_back(Label::environment);
  };

  for (std::size_t i = 0; i < g.along; ++i) {
    const double x = t.x_start + static_cast<double>(i) * t.spacing;
    for (std::size_t j = 0; j < g.around; ++j) {
      const auto [y, z] = perimeter_point(t, static_cast<double>(j) * g.step_around);
      emit(x, y, z);
    }
  }
  if (g.cap_y > 0 && g.cap_z > 0) {
    const double step_y = t.width / static_cast<double>(g.cap_y + 1);
    const double step_z = t.height / static_cast<double>(g.cap_z + 1);
    const double x_end = t.x_start + static_cast<double>(g.along - 1) * t.spacing;
    for (const double x : {t.x_start, x_end}) {
      for (std::size_t a = 1; a <= g.cap_y; ++a) {
        for (std::size_t b = 1; b <= g.cap_z; ++b) {
          emit(x, -0.5 * t.width + static_cast<double>(a) * step_y, t.floor_z + static_cast<double>(b) * step_z);
        }
      }
    }
  }

  for (const BlobSpec& b : spec.blobs) {
    std::size_t made = 0;
    while (made < b.points) {
      const double dx = unit(rng);
      const double dy = unit(rng);
      const double dz = unit(rng);
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (d > 1.0) continue;
      if (b.falloff > 0.0 && accept(rng) > std::exp(-b.falloff * d)) continue;
      Point p{b.center[0] + b.radius * dx, b.center[1] + b.radius * dy, b.center[2] + b.radius * dz,
              spec.aerosol_intensity.mu + aerosol_intensity(rng)};
      out.cloud.points.push_back(p);
      out.labels.push_back(Label::aerosol);
      ++made;
    }
  }
  return out;
}

PipelineConfig tune_for_scene(PipelineConfig cfg, const SceneSpec& spec) {
  cfg.doscor.query_radius = kSceneQueryRadiusFactor * spec.tunnel.spacing;
  return cfg;
}

EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalMetrics m{tp, fp, fn, tn};
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

EvalMetrics score(std::span<const std::size_t> rejected, const LabeledCloud& truth) {
  const std::size_t n = truth.labels.size();
  if (truth.cloud.size() != n) throw DataError("score: cloud and labels differ in length");
  std::vector<bool> is_rejected(n, false);
  for (std::size_t i : rejected) {
    if (i >= n) throw DataError("score: rejected index " + std::to_string(i) + " is out of range");
    is_rejected[i] = true;
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool aerosol = truth.labels[i] == Label::aerosol;
    if (is_rejected[i]) {
      (aerosol ? tp : fp) += 1;
    } else {
      (aerosol ? fn : tn) += 1;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

std::vector<LatencyRow> benchmark(std::span<const std::size_t> sizes, const PipelineConfig& cfg,
                                  std::size_t repetitions, std::uint64_t seed) {
  if (repetitions < 10) throw ParameterError("benchmark: at least 10 repetitions are required");
  std::vector<LatencyRow> rows;
  for (std::size_t size : sizes) {
    PointCloud frame;
    PipelineConfig run_cfg = cfg;
    if (size > 0) {
      const SceneSpec spec = scene_for_size(size, seed);
      frame = generate_scene(spec).cloud;
      run_cfg = tune_for_scene(cfg, spec);
    }
    PipelineState state = initial_state(run_cfg);
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      frame.timestamp = 0.1 * static_cast<double>(rep);
      const auto start = std::chrono::steady_clock::now();
      FrameOutput result = process_frame(frame, run_cfg, state);
      samples.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
      state = std::move(result.state);
    }
    LatencyRow row;
    row.size = size;
    row.median_ms = percentile(samples, 0.5);
    row.p95_ms = percentile(samples, 0.95);
    row.hz = row.median_ms > 0.0 ? 1000.0 / row.median_ms : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

void write_latency_csv(std::ostream& out, std::span<const LatencyRow> rows) {
  out << "size,median_ms,p95_ms,hz\n";
  for (const LatencyRow& r : rows) out << r.size << ',' << r.median_ms << ',' << r.p95_ms << ',' << r.hz << '\n';
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "scene,config,tp,fp,fn,tn,precision,recall,f1\n";
  for (const MetricsRow& r : rows) {
    const EvalMetrics& m = r.metrics;
    out << r.scene << ',' << r.config << ',' << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.tn << ','
        << m.precision << ',' << m.recall << ',' << m.f1 << '\n';
  }
}

}  // namespace smokefilter
