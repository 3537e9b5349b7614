// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "smokefilter/errors.hpp"

namespace smokefilter {

void validate(const WeibullParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) throw ParameterError("weibull: alpha must be positive");
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) throw ParameterError("weibull: gamma must be positive");
  if (!(params.mu >= 0.0) || !std::isfinite(params.mu)) throw ParameterError("weibull: mu must be non-negative");
}

double weibull_pdf(double x, const WeibullParams& params) {
  validate(params);
  if (x < params.mu) return 0.0;
  const double z = (x - params.mu) / params.alpha;
  return params.gamma / params.alpha * std::pow(z, params.gamma - 1.0) * std::exp(-std::pow(z, params.gamma));
}

double weibull_cdf(double x, const WeibullParams& params) {
  validate(params);
  if (x <= params.mu) return 0.0;
  const double z = (x - params.mu) / params.alpha;
  return -std::expm1(-std::pow(z, params.gamma));
}

double weibull_quantile(double p, const WeibullParams& params) {
  validate(params);
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("weibull_quantile: p must be in [0, 1)");
  return params.mu + params.alpha * std::pow(-std::log1p(-p), 1.0 / params.gamma);
}

namespace {

struct PowerSums {
  double s0 = 0.0;  // sum y^k
  double s1 = 0.0;  // sum y^k ln y
  double s2 = 0.0;  // sum y^k ln^2 y
};

PowerSums power_sums(std::span<const double> log_y, double k) {
  PowerSums s;
  for (double ly : log_y) {
    const double w = std::exp(k * ly);
    s.s0 += w;
    s.s1 += w * ly;
    s.s2 += w * ly * ly;
  }
  return s;
}

}  // namespace

WeibullParams fit_weibull(std::span<const double> samples, const WeibullFitOptions& options) {
  double location = 0.0;
  if (options.location == WeibullLocation::sample_min && !samples.empty()) {
    location = *std::min_element(samples.begin(), samples.end());
    location = std::max(location, 0.0);
  }

  std::vector<double> shifted;
  shifted.reserve(samples.size());
  for (double v : samples) {
    if (std::isfinite(v) && v > location) shifted.push_back(v - location);
  }
  if (shifted.size() < std::max<std::size_t>(options.min_samples, 2)) {
    std::ostringstream msg;
    msg << "fit_weibull: " << shifted.size() << " usable samples, need " << options.min_samples;
    throw FitError(msg.str());
  }

  // Work on y = x / max(x) so that y^k stays in (0, 1].
  const double scale = *std::max_element(shifted.begin(), shifted.end());
  std::vector<double> log_y(shifted.size());
  std::transform(shifted.begin(), shifted.end(), log_y.begin(), [&](double v) { return std::log(v / scale); });
  const double n = static_cast<double>(log_y.size());
  const double mean_log = std::accumulate(log_y.begin(), log_y.end(), 0.0) / n;
  double var_log = 0.0;
  for (double ly : log_y) var_log += (ly - mean_log) * (ly - mean_log);
  var_log /= n;
  if (!(var_log > 1e-24)) throw FitError("fit_weibull: samples have no spread");

  // Profile equation g(k) = S1/S0 - 1/k - mean(ln y); g is increasing in k.
  auto g = [&](double k, PowerSums& s) {
    s = power_sums(log_y, k);
    return s.s1 / s.s0 - 1.0 / k - mean_log;
  };

  double lo = 1e-3;
  double hi = 1e3;
  PowerSums sums;
  if (g(lo, sums) > 0.0 || g(hi, sums) < 0.0) throw FitError("fit_weibull: shape outside [1e-3, 1e3]");

  double k = std::clamp(1.2825 / std::sqrt(var_log), lo, hi);  // moment estimate on ln x
  for (int iter = 0; iter < 200; ++iter) {
    const double value = g(k, sums);
    if (value > 0.0) {
      hi = k;
    } else {
      lo = k;
    }
    const double slope = (sums.s2 * sums.s0 - sums.s1 * sums.s1) / (sums.s0 * sums.s0) + 1.0 / (k * k);
    double next = k - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - k) <= 1e-13 * k) {
      k = next;
      break;
    }
    k = next;
  }

  sums = power_sums(log_y, k);
  WeibullParams out;
  out.gamma = k;
  out.alpha = scale * std::pow(sums.s0 / n, 1.0 / k);
  out.mu = location;
  return out;
}

std::vector<double> low_intensity_population(std::span<const double> intensities, double clip_fraction) {
  if (!(clip_fraction > 0.0 && clip_fraction <= 1.0)) {
    throw ParameterError("low_intensity_population: clip fraction must be in (0, 1]");
  }
  if (intensities.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(intensities.begin(), intensities.end());
  const double cut = *lo_it + clip_fraction * (*hi_it - *lo_it);
  std::vector<double> out;
  for (double v : intensities) {
    if (v <= cut) out.push_back(v);
  }
  return out;
}

IntensityThreshold intensity_threshold(const WeibullParams& fit, double p) {
  if (!(p >= kQuantileLower && p <= kQuantileUpper)) {
    throw ParameterError("intensity_threshold: p must be in [0.1, 0.15]");
  }
  IntensityThreshold th;
  th.i_th = weibull_quantile(p, fit);
  th.p = p;
  th.fit = fit;
  return th;
}

Partition filter_by_intensity(const PointCloud& cloud, double i_th) {
  std::vector<bool> reject(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) reject[i] = cloud.points[i].intensity < i_th;
  return Partition::from_mask(reject);
}

double Histogram::density(std::size_t bin) const {
  const double w = width(bin);
  if (total == 0 || !(w > 0.0)) return 0.0;
  return static_cast<double>(counts[bin]) / (static_cast<double>(total) * w);
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ParameterError("make_histogram: bins must be positive");
  Histogram hist;
  hist.counts.assign(bins, 0);
  double lo = 0.0;
  double hi = 1.0;
  if (!values.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    lo = *lo_it;
    hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1.0;
  }
  hist.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    hist.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    hist.counts[std::min(bin, bins - 1)] += 1;
  }
  hist.total = values.size();
  return hist;
}

void write_histogram_csv(std::ostream& out, const Histogram& hist, const std::optional<WeibullParams>& fit) {
  out.precision(9);
  if (fit) out << "# weibull alpha=" << fit->alpha << " gamma=" << fit->gamma << " mu=" << fit->mu << '\n';
  out << "bin_left,bin_right,count,density,fitted_pdf\n";
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    const double centre = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    out << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.counts[b] << ',' << hist.density(b) << ',';
    if (fit) {
      out << weibull_pdf(centre, *fit);
    } else {
      out << "nan";
    }
    out << '\n';
  }
}

}  // namespace smokefilter
