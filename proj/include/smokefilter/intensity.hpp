// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "smokefilter/cloud.hpp"

namespace smokefilter {

/// Three-parameter Weibull: scale alpha, shape gamma, location mu (support x >= mu).
struct WeibullParams {
  double alpha = 1.0;
  double gamma = 1.0;
  double mu = 0.0;
};

void validate(const WeibullParams& params);

double weibull_pdf(double x, const WeibullParams& params);
double weibull_cdf(double x, const WeibullParams& params);
/// mu + alpha * (-ln(1 - p))^(1 / gamma), for p in [0, 1).
double weibull_quantile(double p, const WeibullParams& params);

enum class WeibullLocation {
  zero,        ///< mu = 0
  sample_min,  ///< mu = smallest sample
};

struct WeibullFitOptions {
  WeibullLocation location = WeibullLocation::zero;
  std::size_t min_samples = 50;
};

/// Maximum-likelihood (alpha, gamma) with the location held fixed.
///
/// Samples at or below the location are discarded first. The shape is the
/// root of the profile-likelihood equation, found by safeguarded Newton
/// iteration; the scale follows in closed form. Throws FitError when fewer
/// than `min_samples` remain or the samples have no spread.
WeibullParams fit_weibull(std::span<const double> samples, const WeibullFitOptions& options = {});

/// Values in the lowest `clip_fraction` of [min, max] of the input.
std::vector<double> low_intensity_population(std::span<const double> intensities, double clip_fraction);

inline constexpr double kQuantileLower = 0.1;
inline constexpr double kQuantileUpper = 0.15;
inline constexpr double kQuantileDefault = 0.15;
inline constexpr double kIntensityThresholdDefault = 2.0;

struct IntensityThreshold {
  double i_th = kIntensityThresholdDefault;
  double p = kQuantileDefault;
  std::optional<WeibullParams> fit;  ///< absent for the initial value
  std::size_t histogram_bins = 51;
};

/// Threshold at the p-quantile of the fitted distribution; p must lie in [0.1, 0.15].
IntensityThreshold intensity_threshold(const WeibullParams& fit, double p = kQuantileDefault);

/// Rejects points with intensity strictly below i_th.
Partition filter_by_intensity(const PointCloud& cloud, double i_th);
inline Partition filter_by_intensity(const PointCloud& cloud, const IntensityThreshold& th) {
  return filter_by_intensity(cloud, th.i_th);
}

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 ascending edges
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t bin) const { return edges[bin + 1] - edges[bin]; }
  double density(std::size_t bin) const;
};

/// Equal-width histogram spanning [min, max] of the values.
Histogram make_histogram(std::span<const double> values, std::size_t bins);

/// CSV with one row per bin and the fitted density at the bin centre.
void write_histogram_csv(std::ostream& out, const Histogram& hist, const std::optional<WeibullParams>& fit);

}  // namespace smokefilter
