// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "smokefilter/errors.hpp"

namespace smokefilter {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_interval(const char* name, double value, double lo, double hi) {
  if (!(value >= lo && value <= hi)) {
    std::ostringstream msg;
    msg << name << " = " << value << " is outside its permitted interval [" << lo << ", " << hi << "]";
    throw ParameterError(msg.str());
  }
}

struct BranchResult {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> rejected;
  std::vector<StageReport> stages;
};

using Stage = std::function<Partition(const PointCloud&)>;

BranchResult run_branch(std::vector<Point>& working, const PointCloud& frame, std::vector<std::size_t> indices,
                        const StageFlags& flags, const SgConfig& sg, const PipelineConfig& cfg, double i_th,
                        const char* branch) {
  BranchResult out;
  auto run = [&](const char* name, const Stage& stage) {
    const auto start = Clock::now();
    StageReport report{name, branch, indices.size(), 0, 0, 0.0, {}};
    PointCloud sub;
    sub.frame_id = frame.frame_id;
    sub.timestamp = frame.timestamp;
    sub.points.reserve(indices.size());
    for (std::size_t i : indices) sub.points.push_back(working[i]);
    Partition part;
    try {
      part = stage(sub);
    } catch (const std::exception& e) {
      part = Partition::keep_all(sub.size());
      report.error = e.what();
    }
    const std::vector<std::size_t> rejected = remap(part.rejected, indices);
    out.rejected.insert(out.rejected.end(), rejected.begin(), rejected.end());
    indices = remap(part.kept, indices);
    report.kept = indices.size();
    report.rejected = rejected.size();
    report.ms = elapsed_ms(start);
    out.stages.push_back(std::move(report));
  };

  if (flags.intensity) {
    run("intensity", [&](const PointCloud& c) { return filter_by_intensity(c, i_th); });
  }
  if (flags.sg) {
    run("savitzky_golay", [&](const PointCloud& c) {
      SgResult r = sg_smooth_and_reject(c, sg);
      // Sub-cloud positions map back through the branch's current indices.
      for (const auto& [local, p] : r.replaced) working[indices[local]] = p;
      return r.partition;
    });
  }
  if (flags.doscor) {
    run("doscor", [&](const PointCloud& c) { return doscor_filter(c, cfg.doscor); });
  }
  if (flags.ror2d) {
    run("ror2d", [&](const PointCloud& c) { return ror2d_filter(c, cfg.ror2d); });
  }
  out.kept = std::move(indices);
  return out;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  check_interval("r_max", cfg.r_max, kRMaxLower, kRMaxUpper);
  check_interval("r_min", cfg.r_min, kRMinLower, kRMinUpper);
  if (!(cfg.intensity.initial_threshold >= 0.0)) throw ParameterError("I_th must be non-negative");
  check_interval("p", cfg.intensity.p, kQuantileLower, kQuantileUpper);
  // r_max - 10 can fall below r_min - 1; the interval then collapses to its lower end
  const double rd_lo = cfg.r_min - 1.0;
  const double rd_hi = std::max(cfg.r_max - 10.0, rd_lo);
  check_interval("r_d (close)", cfg.sg_close.r_d, rd_lo, rd_hi);
  check_interval("r_d (long)", cfg.sg_long.r_d, rd_lo, rd_hi);
  check_interval("K_nn", static_cast<double>(cfg.doscor.k_min), 3.0, 6.0);
  check_interval("r_th", cfg.doscor.r_th, 0.2, 0.6);
  check_interval("c_th", cfg.doscor.c_th, 0.1, 0.5);
  check_interval("r_nn", cfg.ror2d.r_nn, 0.1, 0.16);
  check_interval("ror2d.k_nn", static_cast<double>(cfg.ror2d.k_nn), 3.0, 6.0);

  if (cfg.close_budget == 0) throw ParameterError("close_budget must be positive");
  if (!(cfg.intensity.clip_fraction > 0.0 && cfg.intensity.clip_fraction <= 1.0)) {
    throw ParameterError("intensity.clip_fraction must be in (0, 1]");
  }
  if (cfg.intensity.histogram_bins == 0) throw ParameterError("intensity.histogram_bins must be positive");
  validate(cfg.rss);
  validate(cfg.sg_close);
  validate(cfg.sg_long);
  validate(cfg.doscor);
  validate(cfg.ror2d);
}

PipelineState initial_state(const PipelineConfig& cfg) {
  PipelineState state;
  state.gate.r_max = cfg.rss_envelope.empty() ? cfg.r_max : compute_r_max(cfg.rss, cfg.rss_envelope);
  state.gate.r_min = cfg.r_min;
  state.gate.close_budget = cfg.close_budget;
  state.threshold.i_th = cfg.intensity.initial_threshold;
  state.threshold.p = cfg.intensity.p;
  state.threshold.histogram_bins = cfg.intensity.histogram_bins;
  return state;
}

FrameOutput process_frame(const PointCloud& cloud, const PipelineConfig& cfg, const PipelineState& state) {
  const auto start = Clock::now();
  FrameOutput out;
  out.state = state;
  FilterReport& report = out.report;
  report.timestamp = cloud.timestamp;
  report.input = cloud.size();

  // Adaptive samplers: at most once per second of stream time. Frames
  // without a stamp only sample when nothing has been sampled yet.
  const bool due = !state.gate.last_sample_time || (cloud.timestamp && sample_due(state.gate, *cloud.timestamp));
  if (due) {
    const double now = cloud.timestamp.value_or(0.0);
    const auto gate_start = Clock::now();
    out.state.gate = update_r_min(state.gate, cloud, now);
    // update_r_min is a no-op for undue samples; force the stamp for unstamped frames.
    out.state.gate.last_sample_time = now;

    std::vector<double> intensities;
    intensities.reserve(cloud.size());
    for (const Point& p : cloud.points) intensities.push_back(p.intensity);
    try {
      const std::vector<double> population = low_intensity_population(intensities, cfg.intensity.clip_fraction);
      const WeibullParams fit =
          fit_weibull(population, WeibullFitOptions{cfg.intensity.location, cfg.intensity.min_samples});
      out.state.threshold = intensity_threshold(fit, cfg.intensity.p);
      out.state.threshold.histogram_bins = cfg.intensity.histogram_bins;
    } catch (const std::exception& e) {
      report.fit_error = e.what();  // keep the previous threshold
    }
    ++out.state.adaptive_updates;
    report.adaptive_update = true;
    report.stages.push_back(StageReport{"adaptive_update", "frame", cloud.size(), cloud.size(), 0, elapsed_ms(gate_start), {}});
  }
  ++out.state.frames;

  const auto split_start = Clock::now();
  const RangeSplit parts = split_by_range(cloud, out.state.gate);
  report.close = parts.close.size();
  report.long_range = parts.long_range.size();
  report.dropped = parts.dropped.size();
  report.stages.push_back(StageReport{"range_gate", "frame", cloud.size(), parts.close.size() + parts.long_range.size(),
                                      parts.dropped.size(), elapsed_ms(split_start), {}});

  std::vector<Point> working = cloud.points;
  const double i_th = out.state.threshold.i_th;
  BranchResult close =
      run_branch(working, cloud, parts.close, cfg.close_stages, cfg.sg_close, cfg, i_th, "close");
  BranchResult far =
      run_branch(working, cloud, parts.long_range, cfg.long_stages, cfg.sg_long, cfg, i_th, "long");

  out.filtered_indices = std::move(close.kept);
  out.filtered_indices.insert(out.filtered_indices.end(), far.kept.begin(), far.kept.end());
  std::sort(out.filtered_indices.begin(), out.filtered_indices.end());

  out.rejected_indices = parts.dropped;
  out.rejected_indices.insert(out.rejected_indices.end(), close.rejected.begin(), close.rejected.end());
  out.rejected_indices.insert(out.rejected_indices.end(), far.rejected.begin(), far.rejected.end());
  std::sort(out.rejected_indices.begin(), out.rejected_indices.end());

  out.filtered.frame_id = cloud.frame_id;
  out.filtered.timestamp = cloud.timestamp;
  out.filtered.points.reserve(out.filtered_indices.size());
  for (std::size_t i : out.filtered_indices) out.filtered.points.push_back(working[i]);
  out.rejected = select(cloud, out.rejected_indices);

  report.stages.insert(report.stages.end(), close.stages.begin(), close.stages.end());
  report.stages.insert(report.stages.end(), far.stages.begin(), far.stages.end());
  report.filtered = out.filtered_indices.size();
  report.rejected = out.rejected_indices.size();
  report.r_min = out.state.gate.r_min;
  report.r_max = out.state.gate.r_max;
  report.i_th = out.state.threshold.i_th;
  report.fit = out.state.threshold.fit;
  report.latency_ms = elapsed_ms(start);
  return out;
}

std::vector<FrameOutput> run_stream(std::span<const PointCloud> frames, const PipelineConfig& cfg) {
  std::optional<double> previous;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].timestamp) throw StreamError("frame " + std::to_string(i) + " has no timestamp");
    if (previous && *frames[i].timestamp < *previous) {
      throw StreamError("frame " + std::to_string(i) + " goes back in time");
    }
    previous = frames[i].timestamp;
  }

  std::vector<FrameOutput> out;
  out.reserve(frames.size());
  PipelineState state = initial_state(cfg);
  for (const PointCloud& frame : frames) {
    out.push_back(process_frame(frame, cfg, state));
    state = out.back().state;
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  state_ = initial_state(cfg_);
}

FrameOutput Pipeline::process(const PointCloud& cloud) {
  FrameOutput out = process_frame(cloud, cfg_, state_);
  state_ = out.state;
  return out;
}

}  // namespace smokefilter
