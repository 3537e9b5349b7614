// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "smokefilter/errors.hpp"
#include "smokefilter/range_gate.hpp"

using namespace smokefilter;

namespace {

// n points uniformly inside a ball of radius r_out around the origin
PointCloud ball(std::size_t n, double r_out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud c;
  while (c.size() < n) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z > 1.0) continue;
    c.points.push_back({r_out * x, r_out * y, r_out * z, 10.0});
  }
  return c;
}

std::size_t close_count(const PointCloud& c, double r_min) {
  std::size_t n = 0;
  for (const Point& p : c.points) n += range_of(p) <= r_min;
  return n;
}

}  // namespace

TEST(SafeDistance, Stationary) {
  RssConfig cfg;
  cfg.v_r = 0.0;
  cfg.v_f = 0.0;
  cfg.eta = 0.0;
  cfg.a_accel = 3.7;
  EXPECT_EQ(longitudinal_safe_distance(cfg), 0.0);
}

TEST(SafeDistance, HandComputedExample) {
  // 1.2*1 + 0.5*1*1 + (1.2 + 1)^2 / 4 = 2.91
  const RssConfig cfg;
  EXPECT_NEAR(longitudinal_safe_distance(cfg), 2.91, 1e-9);
  RssConfig oncoming = cfg;
  oncoming.v_f = 2.0;
  EXPECT_NEAR(longitudinal_safe_distance(oncoming), 2.41, 1e-9);
}

TEST(SafeDistance, ClampsAtZero) {
  RssConfig cfg;
  cfg.v_f = 100.0;
  EXPECT_EQ(longitudinal_safe_distance(cfg), 0.0);
}

TEST(SafeDistance, RejectsZeroBraking) {
  RssConfig cfg;
  cfg.a_min_brake = 0.0;
  EXPECT_THROW(longitudinal_safe_distance(cfg), ParameterError);
  cfg = RssConfig{};
  cfg.a_max_brake = 0.0;
  EXPECT_THROW(longitudinal_safe_distance(cfg), ParameterError);
}

TEST(SafeDistance, Monotone) {
  RssConfig base;
  double prev = 0.0;
  for (double v = 0.0; v <= 10.0; v += 0.5) {
    RssConfig c = base;
    c.v_r = v;
    const double d = longitudinal_safe_distance(c);
    EXPECT_GE(d, prev);
    prev = d;
  }
  prev = 1e9;
  for (double v = 0.0; v <= 5.0; v += 0.5) {
    RssConfig c = base;
    c.v_f = v;
    const double d = longitudinal_safe_distance(c);
    EXPECT_LE(d, prev);
    prev = d;
  }
}

TEST(RMax, DefaultsAndClamps) {
  const RssConfig cfg;
  EXPECT_EQ(compute_r_max(cfg), 30.0);
  const std::vector<VelocityCase> slow{{1.2, 0.0}};
  EXPECT_EQ(compute_r_max(cfg, slow), 10.0);
  // v_r = 15: 15 + 0.5 + 256/4 = 79.5
  const std::vector<VelocityCase> mid{{1.2, 0.0}, {15.0, 0.0}};
  EXPECT_NEAR(compute_r_max(cfg, mid), 79.5, 1e-9);
  const std::vector<VelocityCase> fast{{20.0, 0.0}};  // 20 + 0.5 + 441/4 = 130.75
  EXPECT_EQ(compute_r_max(cfg, fast), 100.0);
}

TEST(RMin, HalfSecondLaterIsUnchanged) {
  RangeGateState s;
  s.last_sample_time = 10.0;
  const PointCloud c = ball(50000, 5.0, 1);
  const RangeGateState next = update_r_min(s, c, 10.5);
  EXPECT_EQ(next.r_min, s.r_min);
  EXPECT_EQ(next.last_sample_time, s.last_sample_time);
}

TEST(RMin, ShrinksUnderLoad) {
  const RangeGateState s;
  const PointCloud c = ball(50000, 5.0, 2);
  const RangeGateState next = update_r_min(s, c, 0.0);
  EXPECT_LT(next.r_min, 5.0);
  EXPECT_GE(next.r_min, 2.0);
  EXPECT_LE(close_count(c, next.r_min), 30000u);
  EXPECT_LE(close_count(c, next.r_min), static_cast<std::size_t>(kBudgetHeadroom * 30000));
  EXPECT_EQ(next.last_sample_time, 0.0);
}

TEST(RMin, GrowsWhenSparse) {
  const RangeGateState s;
  const PointCloud c = ball(1000, 5.0, 3);
  const RangeGateState next = update_r_min(s, c, 0.0);
  EXPECT_GT(next.r_min, 5.0);
  EXPECT_LE(next.r_min, 10.0);
}

TEST(RMin, HoldsInsideHysteresisBand) {
  const RangeGateState s;
  const PointCloud c = ball(20000, 5.0, 4);
  EXPECT_EQ(update_r_min(s, c, 0.0).r_min, 5.0);
}

TEST(RMin, FloorsAtTwoMetres) {
  const RangeGateState s;
  const PointCloud c = ball(40000, 1.0, 5);  // everything inside 2 m
  const RangeGateState next = update_r_min(s, c, 0.0);
  EXPECT_EQ(next.r_min, 2.0);
}

TEST(RMin, ConvergesOnStaticCloud) {
  RangeGateState s;
  const PointCloud c = ball(120000, 8.0, 6);
  for (int k = 0; k < 10; ++k) s = update_r_min(s, c, double(k));
  EXPECT_TRUE(close_count(c, s.r_min) <= 30000u || s.r_min == 2.0);
}

TEST(Split, Partition) {
  RangeGateState s;
  s.r_min = 5.0;
  s.r_max = 30.0;
  PointCloud c;
  c.points = {{3, 0, 0, 1}, {31, 0, 0, 1}, {10, 0, 0, 1}, {5, 0, 0, 1}, {0, 30, 0, 1}};
  const RangeSplit split = split_by_range(c, s);
  EXPECT_EQ(split.close, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(split.long_range, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(split.dropped, (std::vector<std::size_t>{1}));

  const PointCloud r = ball(100, 40.0, 7);
  const RangeSplit parts = split_by_range(r, s);
  EXPECT_EQ(parts.close.size() + parts.long_range.size() + parts.dropped.size(), 100u);
}
