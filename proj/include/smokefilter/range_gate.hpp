// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "smokefilter/cloud.hpp"

namespace smokefilter {

/// Kinematic constants of the responsibility-sensitive-safety distance model.
struct RssConfig {
  double v_r = 1.2;          ///< robot velocity [m/s]
  double v_f = 0.0;          ///< dynamic obstacle velocity [m/s]
  double a_accel = 1.0;      ///< max robot acceleration [m/s^2]
  double a_min_brake = 2.0;  ///< min robot deceleration [m/s^2]
  double a_max_brake = 4.0;  ///< max obstacle deceleration [m/s^2]
  double eta = 1.0;          ///< obstacle response time [s]
};

/// One (robot, obstacle) velocity case considered when choosing r_max.
struct VelocityCase {
  double v_r = 0.0;
  double v_f = 0.0;
};

inline constexpr double kRMaxLower = 10.0;
inline constexpr double kRMaxUpper = 100.0;
inline constexpr double kRMaxDefault = 30.0;
inline constexpr double kRMinLower = 2.0;
inline constexpr double kRMinUpper = 10.0;
inline constexpr double kRMinDefault = 5.0;
inline constexpr std::size_t kCloseBudgetDefault = 30000;
inline constexpr double kSamplePeriod = 1.0;
/// The controller caps r_min so that the sampled frame fills at most this
/// share of the budget; frames between samples fluctuate around it.
inline constexpr double kBudgetHeadroom = 0.95;

struct RangeGateState {
  double r_max = kRMaxDefault;
  double r_min = kRMinDefault;
  std::size_t close_budget = kCloseBudgetDefault;
  std::optional<double> last_sample_time;
};

/// Throws ParameterError on non-positive braking or negative velocities/eta.
void validate(const RssConfig& cfg);

/// Longitudinal safe distance, clamped below at 0.
double longitudinal_safe_distance(const RssConfig& cfg);

/// Largest safe distance over the envelope, clamped into [10, 100] m.
/// An empty envelope yields the 30 m default.
double compute_r_max(const RssConfig& cfg, std::span<const VelocityCase> envelope = {});

/// True when the sampler is due at `now`.
bool sample_due(const RangeGateState& state, double now);

/// 1 Hz close-range budget controller. Returns the state unchanged when
/// less than a second has passed since the previous sample.
RangeGateState update_r_min(const RangeGateState& state, const PointCloud& cloud, double now);

struct RangeSplit {
  std::vector<std::size_t> close;    ///< r <= r_min
  std::vector<std::size_t> long_range;  ///< r_min < r <= r_max
  std::vector<std::size_t> dropped;  ///< r > r_max
};

RangeSplit split_by_range(const PointCloud& cloud, const RangeGateState& state);

}  // namespace smokefilter
