// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/range_gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smokefilter/errors.hpp"

namespace smokefilter {

namespace {

// Sample times come from frame stamps such as k * 0.1 s.
constexpr double kTimeSlack = 1e-9;

// Largest radius that holds at most `budget` of the given ranges.
double budget_radius(std::vector<double> ranges, std::size_t budget) {
  if (ranges.size() <= budget) return std::numeric_limits<double>::infinity();
  std::nth_element(ranges.begin(), ranges.begin() + static_cast<std::ptrdiff_t>(budget), ranges.end());
  return std::nextafter(ranges[budget], 0.0);
}

}  // namespace

void validate(const RssConfig& cfg) {
  if (!(cfg.a_min_brake > 0.0)) throw ParameterError("rss: a_min_brake must be positive");
  if (!(cfg.a_max_brake > 0.0)) throw ParameterError("rss: a_max_brake must be positive");
  if (!(cfg.v_r >= 0.0)) throw ParameterError("rss: v_r must be non-negative");
  if (!(cfg.v_f >= 0.0)) throw ParameterError("rss: v_f must be non-negative");
  if (!(cfg.eta >= 0.0)) throw ParameterError("rss: eta must be non-negative");
  if (!std::isfinite(cfg.a_accel)) throw ParameterError("rss: a_accel must be finite");
}

double longitudinal_safe_distance(const RssConfig& cfg) {
  validate(cfg);
  const double reach = cfg.v_r + cfg.eta * cfg.a_accel;
  const double d = cfg.v_r * cfg.eta + 0.5 * cfg.a_accel * cfg.eta * cfg.eta +
                   reach * reach / (2.0 * cfg.a_min_brake) - cfg.v_f * cfg.v_f / (2.0 * cfg.a_max_brake);
  return std::max(0.0, d);
}

double compute_r_max(const RssConfig& cfg, std::span<const VelocityCase> envelope) {
  if (envelope.empty()) return kRMaxDefault;
  double best = 0.0;
  for (const VelocityCase& c : envelope) {
    RssConfig candidate = cfg;
    candidate.v_r = c.v_r;
    candidate.v_f = c.v_f;
    best = std::max(best, longitudinal_safe_distance(candidate));
  }
  return std::clamp(best, kRMaxLower, kRMaxUpper);
}

bool sample_due(const RangeGateState& state, double now) {
  return !state.last_sample_time || now - *state.last_sample_time >= kSamplePeriod - kTimeSlack;
}

RangeGateState update_r_min(const RangeGateState& state, const PointCloud& cloud, double now) {
  if (!sample_due(state, now)) return state;

  RangeGateState next = state;
  next.last_sample_time = now;

  std::vector<double> ranges;
  ranges.reserve(cloud.size());
  std::size_t count = 0;
  for (const Point& p : cloud.points) {
    const double r = range_of(p);
    ranges.push_back(r);
    if (r <= state.r_min) ++count;
  }

  const double budget = static_cast<double>(state.close_budget);
  double proposal = state.r_min;
  if (count > state.close_budget) {
    proposal = state.r_min * std::cbrt(budget / static_cast<double>(count));
  } else if (static_cast<double>(count) < 0.5 * budget) {
    // Aim for the middle of the [0.5, 1] x budget band.
    proposal = count == 0 ? kRMinUpper
                          : state.r_min * std::cbrt(0.75 * budget / static_cast<double>(count));
  } else {
    return next;
  }
  const auto target = static_cast<std::size_t>(kBudgetHeadroom * budget);
  proposal = std::min(proposal, budget_radius(std::move(ranges), target));
  next.r_min = std::clamp(proposal, kRMinLower, kRMinUpper);
  return next;
}

RangeSplit split_by_range(const PointCloud& cloud, const RangeGateState& state) {
  RangeSplit out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r = range_of(cloud.points[i]);
    if (r <= state.r_min) {
      out.close.push_back(i);
    } else if (r <= state.r_max) {
      out.long_range.push_back(i);
    } else {
      out.dropped.push_back(i);
    }
  }
  return out;
}

}  // namespace smokefilter
