// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smokefilter/cloud.hpp"
#include "smokefilter/doscor.hpp"
#include "smokefilter/intensity.hpp"
#include "smokefilter/range_gate.hpp"
#include "smokefilter/savitzky_golay.hpp"
#include "smokefilter/spatial_filters.hpp"

namespace smokefilter {

/// Which stages run on a branch. Range gating always runs.
struct StageFlags {
  bool intensity = true;
  bool sg = true;
  bool doscor = false;
  bool ror2d = false;

  friend bool operator==(const StageFlags&, const StageFlags&) = default;
};

struct IntensityConfig {
  double initial_threshold = kIntensityThresholdDefault;  ///< I_th before the first fit
  double p = kQuantileDefault;
  double clip_fraction = 0.25;  ///< share of the intensity range that feeds the fit
  std::size_t histogram_bins = 51;
  WeibullLocation location = WeibullLocation::zero;
  std::size_t min_samples = 50;
};

struct PipelineConfig {
  double r_max = kRMaxDefault;
  double r_min = kRMinDefault;
  std::size_t close_budget = kCloseBudgetDefault;
  RssConfig rss;
  /// When non-empty, r_max is derived from the RSS model over these cases.
  std::vector<VelocityCase> rss_envelope;

  IntensityConfig intensity;
  SgConfig sg_close = sg_preset(Segment::close);
  SgConfig sg_long = sg_preset(Segment::long_range);
  DoscorConfig doscor;
  Ror2dConfig ror2d;

  StageFlags close_stages{true, true, false, false};
  StageFlags long_stages{true, true, true, true};
};

/// Checks every parameter against its permitted interval; the message of the
/// thrown ParameterError names the offending parameter and the interval.
void validate(const PipelineConfig& cfg);

struct PipelineState {
  RangeGateState gate;
  IntensityThreshold threshold;
  std::size_t frames = 0;
  std::size_t adaptive_updates = 0;
};

PipelineState initial_state(const PipelineConfig& cfg);

struct StageReport {
  std::string stage;
  std::string branch;
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  double ms = 0.0;
  std::string error;  ///< non-empty when the stage fell back to pass-through
};

struct FilterReport {
  std::optional<double> timestamp;
  std::size_t input = 0;
  std::size_t close = 0;
  std::size_t long_range = 0;
  std::size_t dropped = 0;
  std::size_t filtered = 0;
  std::size_t rejected = 0;
  std::vector<StageReport> stages;
  double latency_ms = 0.0;

  bool adaptive_update = false;
  double r_min = 0.0;
  double r_max = 0.0;
  double i_th = 0.0;
  std::optional<WeibullParams> fit;
  std::string fit_error;
};

struct FrameOutput {
  PointCloud filtered;
  PointCloud rejected;
  std::vector<std::size_t> filtered_indices;  ///< positions in the input frame, ascending
  std::vector<std::size_t> rejected_indices;
  FilterReport report;
  PipelineState state;  ///< state to pass to the next frame
};

/// Runs range gating, intensity filtering, SG smoothing, DOSCOR and 2D ROR
/// on one frame and merges the branches. Stage failures degrade to
/// pass-through and are recorded in the report.
FrameOutput process_frame(const PointCloud& cloud, const PipelineConfig& cfg, const PipelineState& state);

/// Threads adaptive state through a sequence of timestamped frames.
/// Throws StreamError on missing or decreasing timestamps.
std::vector<FrameOutput> run_stream(std::span<const PointCloud> frames, const PipelineConfig& cfg);

/// Convenience owner of config and state for frame-by-frame use.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  FrameOutput process(const PointCloud& cloud);

  const PipelineConfig& config() const { return cfg_; }
  const PipelineState& state() const { return state_; }

 private:
  PipelineConfig cfg_;
  PipelineState state_;
};

}  // namespace smokefilter
