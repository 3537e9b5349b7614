// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "smokefilter/cloud.hpp"

namespace smokefilter {

enum class Segment { close, long_range };

enum class SgMode {
  reject,   ///< drop points whose range residual exceeds the tolerance
  replace,  ///< keep them, moved along their ray to the smoothed range
};

struct SgConfig {
  int degree = 2;
  int half_window = 7;              ///< window length is 2 * half_window + 1
  double residual_tolerance = 0.3;  ///< [m]
  double r_d = 20.0;                ///< only points at range >= r_d are smoothed [m]
  bool use_optimal_window = false;
  int max_half_window = 15;
  double max_azimuth_gap = 0.05;    ///< sequences break across larger gaps [rad]
  std::size_t sample_count = 0;     ///< L for the derivative estimate; 0 = sequence length
  SgMode mode = SgMode::reject;

  int window() const { return 2 * half_window + 1; }
};

/// Close range: cubic over 9 samples from 4 m; long range: quadratic over 15 samples from 20 m.
SgConfig sg_preset(Segment segment);

void validate(const SgConfig& cfg);

/// Centre-point weights of the least-squares polynomial of `degree` over
/// offsets -half_window..half_window.
std::vector<double> sg_coefficients(int degree, int half_window);

/// Least-squares polynomial coefficients b_0..b_n for a centred window.
std::vector<double> sg_fit(std::span<const double> window, int degree);

/// Sum over the window of (p_i - r_i)^2 with p_i = sum_k b_k i^k, i centred at 0.
double sg_cost(std::span<const double> window, std::span<const double> coeffs);

/// Mean squared (degree + 2)-th finite difference of the sequence, divided by
/// `sample_count` (or the number of differences when 0).
double estimate_nu(std::span<const double> ranges, int degree, std::size_t sample_count = 0);

/// Real-valued optimal window length for noise variance sigma2 and
/// derivative power nu.
double optimal_window_length(int degree, double sigma2, double nu);

/// Optimal half window, rounded to the nearest odd length of at least
/// degree + 2 and at most 2 * max_half_window + 1.
int optimal_half_window(int degree, double sigma2, std::span<const double> ranges, std::size_t sample_count,
                        int max_half_window);

/// Points of one inclination ring ordered by azimuth.
struct ScanSequence {
  std::vector<std::size_t> index;  ///< positions in the source cloud
  std::vector<double> phi;
  std::vector<double> range;

  std::size_t size() const { return index.size(); }
};

/// Groups the listed points into rings by inclination and orders each ring
/// by azimuth, splitting where consecutive azimuths are further apart than
/// `max_azimuth_gap`.
std::vector<ScanSequence> build_scan_sequences(const PointCloud& cloud, std::span<const std::size_t> subset,
                                               double max_azimuth_gap);

/// Convolves the interior of the sequence with centred weights; the first
/// and last half-window samples are returned unchanged.
std::vector<double> smooth_sequence(std::span<const double> ranges, std::span<const double> weights);

struct SgResult {
  Partition partition;
  /// Replaced points (replace mode only), by source index.
  std::vector<std::pair<std::size_t, Point>> replaced;
};

/// Smooths range sequences of points at range >= r_d and flags points whose
/// residual exceeds the tolerance. Kept points keep their coordinates in
/// reject mode.
SgResult sg_smooth_and_reject(const PointCloud& cloud, const SgConfig& cfg);

}  // namespace smokefilter
