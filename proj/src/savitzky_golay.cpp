// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include "smokefilter/savitzky_golay.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smokefilter/errors.hpp"

namespace smokefilter {

namespace {

// Gaps below this are rounding noise between points of the same beam.
constexpr double kThetaNoise = 1e-9;

Eigen::MatrixXd vandermonde(int degree, int half_window) {
  const int w = 2 * half_window + 1;
  Eigen::MatrixXd a(w, degree + 1);
  for (int row = 0; row < w; ++row) {
    const double i = row - half_window;
    double v = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(row, k) = v;
      v *= i;
    }
  }
  return a;
}

void check_window(int degree, int half_window) {
  if (degree < 0) throw ParameterError("savitzky-golay: degree must be non-negative");
  if (half_window < 0 || 2 * half_window + 1 <= degree) {
    throw ParameterError("savitzky-golay: window length must exceed the polynomial degree");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

SgConfig sg_preset(Segment segment) {
  SgConfig cfg;
  if (segment == Segment::close) {
    cfg.degree = 3;
    cfg.half_window = 4;
    cfg.r_d = 4.0;
  } else {
    cfg.degree = 2;
    cfg.half_window = 7;
    cfg.r_d = 20.0;
  }
  return cfg;
}

void validate(const SgConfig& cfg) {
  check_window(cfg.degree, cfg.half_window);
  if (!(cfg.residual_tolerance > 0.0)) throw ParameterError("savitzky-golay: residual_tolerance must be positive");
  if (!(cfg.r_d >= 0.0)) throw ParameterError("savitzky-golay: r_d must be non-negative");
  if (cfg.max_half_window < cfg.half_window) {
    throw ParameterError("savitzky-golay: max_half_window must be at least half_window");
  }
  if (!(cfg.max_azimuth_gap > 0.0)) throw ParameterError("savitzky-golay: max_azimuth_gap must be positive");
}

std::vector<double> sg_coefficients(int degree, int half_window) {
  check_window(degree, half_window);
  const Eigen::MatrixXd a = vandermonde(degree, half_window);
  // Row 0 of (A^T A)^-1 A^T evaluates the fitted polynomial at offset 0.
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(degree + 1, 0);
  const Eigen::VectorXd c = ata.ldlt().solve(e0);
  const Eigen::VectorXd weights = a * c;
  return {weights.data(), weights.data() + weights.size()};
}

std::vector<double> sg_fit(std::span<const double> window, int degree) {
  if (window.size() % 2 == 0) throw ParameterError("sg_fit: window length must be odd");
  const int half_window = static_cast<int>(window.size() / 2);
  check_window(degree, half_window);
  const Eigen::MatrixXd a = vandermonde(degree, half_window);
  const Eigen::Map<const Eigen::VectorXd> r(window.data(), static_cast<Eigen::Index>(window.size()));
  const Eigen::VectorXd b = (a.transpose() * a).ldlt().solve(a.transpose() * r);
  return {b.data(), b.data() + b.size()};
}

double sg_cost(std::span<const double> window, std::span<const double> coeffs) {
  const auto half_window = static_cast<std::ptrdiff_t>(window.size() / 2);
  double cost = 0.0;
  for (std::size_t row = 0; row < window.size(); ++row) {
    const double i = static_cast<double>(static_cast<std::ptrdiff_t>(row) - half_window);
    double p = 0.0;
    double v = 1.0;
    for (double b : coeffs) {
      p += b * v;
      v *= i;
    }
    cost += (p - window[row]) * (p - window[row]);
  }
  return cost;
}

double estimate_nu(std::span<const double> ranges, int degree, std::size_t sample_count) {
  const auto order = static_cast<std::size_t>(degree + 2);
  if (ranges.size() <= order) throw ParameterError("estimate_nu: sequence too short for the derivative order");
  std::vector<double> diff(ranges.begin(), ranges.end());
  for (std::size_t pass = 0; pass < order; ++pass) {
    for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
    diff.pop_back();
  }
  double sum = 0.0;
  for (double d : diff) sum += d * d;
  const double l = static_cast<double>(sample_count == 0 ? diff.size() : sample_count);
  return sum / l;
}

double optimal_window_length(int degree, double sigma2, double nu) {
  if (degree < 0) throw ParameterError("optimal_window_length: degree must be non-negative");
  if (!(sigma2 >= 0.0) || !(nu >= 0.0)) throw ParameterError("optimal_window_length: negative variance");
  if (nu == 0.0) return std::numeric_limits<double>::infinity();
  if (sigma2 == 0.0) return 0.0;
  const double n = degree;
  const double log_factor = std::log(2.0 * (n + 2.0)) + 2.0 * std::lgamma(2.0 * n + 4.0) -
                            2.0 * std::lgamma(n + 2.0) + std::log(sigma2) - std::log(nu);
  return std::exp(log_factor / (2.0 * n + 5.0));
}

int optimal_half_window(int degree, double sigma2, std::span<const double> ranges, std::size_t sample_count,
                        int max_half_window) {
  const int min_length = (degree + 2) % 2 == 1 ? degree + 2 : degree + 3;
  const int max_length = std::max(2 * max_half_window + 1, min_length);
  const double nu = estimate_nu(ranges, degree, sample_count);
  const double w = optimal_window_length(degree, sigma2, nu);
  int length = max_length;
  if (std::isfinite(w)) {
    const double half = std::round((w - 1.0) / 2.0);
    length = half >= max_length ? max_length : 2 * static_cast<int>(std::max(half, 0.0)) + 1;
  }
  length = std::clamp(length, min_length, max_length);
  return (length - 1) / 2;
}

std::vector<ScanSequence> build_scan_sequences(const PointCloud& cloud, std::span<const std::size_t> subset,
                                               double max_azimuth_gap) {
  struct Entry {
    std::size_t index;
    SphericalPoint s;
  };
  std::vector<Entry> entries;
  entries.reserve(subset.size());
  for (std::size_t i : subset) entries.push_back({i, cart_to_sph(cloud.points[i])});
  if (entries.empty()) return {};

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.s.theta != b.s.theta ? a.s.theta < b.s.theta : a.index < b.index;
  });

  std::vector<double> gaps;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const double gap = entries[i].s.theta - entries[i - 1].s.theta;
    if (gap > kThetaNoise) gaps.push_back(gap);
  }
  const double ring_break = gaps.empty() ? std::numeric_limits<double>::infinity() : 0.5 * median(gaps);

  std::vector<ScanSequence> out;
  auto flush_ring = [&](std::size_t begin, std::size_t end) {
    std::sort(entries.begin() + static_cast<std::ptrdiff_t>(begin), entries.begin() + static_cast<std::ptrdiff_t>(end),
              [](const Entry& a, const Entry& b) { return a.s.phi != b.s.phi ? a.s.phi < b.s.phi : a.index < b.index; });
    ScanSequence seq;
    for (std::size_t i = begin; i < end; ++i) {
      if (!seq.index.empty() && entries[i].s.phi - seq.phi.back() > max_azimuth_gap) {
        out.push_back(std::move(seq));
        seq = ScanSequence{};
      }
      seq.index.push_back(entries[i].index);
      seq.phi.push_back(entries[i].s.phi);
      seq.range.push_back(entries[i].s.r);
    }
    out.push_back(std::move(seq));
  };

  std::size_t ring_begin = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].s.theta - entries[i - 1].s.theta > ring_break) {
      flush_ring(ring_begin, i);
      ring_begin = i;
    }
  }
  flush_ring(ring_begin, entries.size());
  return out;
}

std::vector<double> smooth_sequence(std::span<const double> ranges, std::span<const double> weights) {
  std::vector<double> out(ranges.begin(), ranges.end());
  const std::size_t w = weights.size();
  if (w == 0 || w % 2 == 0) throw ParameterError("smooth_sequence: weights must have odd length");
  if (ranges.size() < w) return out;
  const std::size_t m = w / 2;
  for (std::size_t i = m; i + m < ranges.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += weights[j] * ranges[i - m + j];
    out[i] = acc;
  }
  return out;
}

SgResult sg_smooth_and_reject(const PointCloud& cloud, const SgConfig& cfg) {
  validate(cfg);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (range_of(cloud.points[i]) >= cfg.r_d) eligible.push_back(i);
  }

  const std::vector<double> base_weights = sg_coefficients(cfg.degree, cfg.half_window);
  std::vector<bool> reject(cloud.size(), false);
  SgResult result;

  for (const ScanSequence& seq : build_scan_sequences(cloud, eligible, cfg.max_azimuth_gap)) {
    std::vector<double> weights = base_weights;
    if (seq.size() < weights.size()) continue;

    if (cfg.use_optimal_window && seq.size() > static_cast<std::size_t>(cfg.degree + 2)) {
      // Noise variance from a pilot pass with the configured window.
      const std::vector<double> pilot = smooth_sequence(seq.range, weights);
      std::vector<double> sq;
      const std::size_t m = weights.size() / 2;
      for (std::size_t i = m; i + m < seq.size(); ++i) sq.push_back((pilot[i] - seq.range[i]) * (pilot[i] - seq.range[i]));
      const int half = optimal_half_window(cfg.degree, median(sq), seq.range, cfg.sample_count, cfg.max_half_window);
      weights = sg_coefficients(cfg.degree, half);
      if (seq.size() < weights.size()) continue;
    }

    const std::vector<double> smoothed = smooth_sequence(seq.range, weights);
    const std::size_t m = weights.size() / 2;
    for (std::size_t i = m; i + m < seq.size(); ++i) {
      if (std::abs(seq.range[i] - smoothed[i]) <= cfg.residual_tolerance) continue;
      const std::size_t src = seq.index[i];
      if (cfg.mode == SgMode::reject) {
        reject[src] = true;
      } else {
        SphericalPoint s = cart_to_sph(cloud.points[src]);
        s.r = std::max(smoothed[i], 0.0);
        result.replaced.emplace_back(src, sph_to_cart(s, cloud.points[src].intensity));
      }
    }
  }
  result.partition = Partition::from_mask(reject);
  std::sort(result.replaced.begin(), result.replaced.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return result;
}

}  // namespace smokefilter
