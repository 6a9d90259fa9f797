// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The lfisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfi/peaks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "lfi/errors.hpp"

namespace lfi {

std::string_view to_string(InterpMethod method) {
  return method == InterpMethod::kGaussian ? "gaussian" : "weighted_average";
}

InterpMethod parse_interp_method(std::string_view text) {
  if (text == "gaussian") return InterpMethod::kGaussian;
  if (text == "weighted_average") return InterpMethod::kWeightedAverage;
  throw ParameterError("unknown interpolation method '" + std::string(text) + "'");
}

std::optional<std::size_t> find_max_bin(const RampSpectrum& spectrum) {
  const auto& m = spectrum.magnitudes;
  if (m.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k] > m[best]) best = k;
  }
  if (!(m[best] > 0.0)) return std::nullopt;
  return best;
}

namespace {

struct WindowBounds {
  std::size_t lo;
  std::size_t hi;  // inclusive
};

WindowBounds window_bounds(const RampSpectrum& spectrum, std::size_t center, std::size_t window) {
  if (spectrum.magnitudes.empty()) throw FramingError("peak window on an empty spectrum");
  if (center >= spectrum.magnitudes.size()) throw ParameterError("peak window centre outside the spectrum");
  if (window == 0 || window % 2 == 0) throw ParameterError("interpolation window must be odd");
  const std::size_t half = window / 2;
  return {center >= half ? center - half : 0, std::min(center + half, spectrum.magnitudes.size() - 1)};
}

}  // namespace

std::optional<PeakEstimate> weighted_average_interpolate(const RampSpectrum& spectrum, std::size_t center_bin,
                                                         std::size_t window) {
  const auto [lo, hi] = window_bounds(spectrum, center_bin, window);
  double weight = 0.0;
  double moment = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    weight += spectrum.magnitudes[k];
    moment += spectrum.magnitudes[k] * spectrum.frequency(k);
  }
  if (!(weight > 0.0)) return std::nullopt;
  PeakEstimate est;
  est.ramp_index = spectrum.ramp_index;
  est.beat_frequency_hz = moment / weight;
  est.intensity = spectrum.magnitudes[center_bin];
  est.method = InterpMethod::kWeightedAverage;
  est.valid = true;
  est.center_bin = center_bin;
  return est;
}

std::optional<PeakEstimate> gaussian_interpolate(const RampSpectrum& spectrum, std::size_t center_bin,
                                                 std::size_t window) {
  constexpr int kMaxIterations = 50;
  constexpr double kRelTol = 1e-9;

  const auto [lo, hi] = window_bounds(spectrum, center_bin, window);
  const std::size_t n = hi - lo + 1;
  // Work in bin units relative to the centre bin for conditioning.
  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[static_cast<Eigen::Index>(i)] = static_cast<double>(lo + i) - static_cast<double>(center_bin);
    y[static_cast<Eigen::Index>(i)] = spectrum.magnitudes[lo + i];
  }
  if (!(y.maxCoeff() > 0.0)) return std::nullopt;

  auto residuals = [&](const Eigen::Vector3d& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const double a = p[0], b = p[1], c = p[2];
    const double c2 = c * c;
    r.resize(x.size());
    if (jac) jac->resize(x.size(), 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double d = x[i] - b;
      const double g = std::exp(-d * d / (2.0 * c2));
      r[i] = y[i] - a * g;
      if (jac) {
        (*jac)(i, 0) = g;
        (*jac)(i, 1) = a * g * d / c2;
        (*jac)(i, 2) = a * g * d * d / (c2 * c);
      }
    }
    return r.squaredNorm();
  };

  Eigen::Vector3d p(y.maxCoeff(), 0.0, 2.0);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double cost = residuals(p, r, &jac);
  double lambda = 1e-3;
  bool diverged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
    const Eigen::Vector3d step = damped.ldlt().solve(jtr);
    if (!step.allFinite()) {
      diverged = true;
      break;
    }
    const Eigen::Vector3d trial = p + step;
    Eigen::VectorXd r_trial;
    const double trial_cost = residuals(trial, r_trial, nullptr);
    if (std::isfinite(trial_cost) && trial_cost <= cost) {
      p = trial;
      cost = residuals(p, r, &jac);
      lambda = std::max(lambda * 0.1, 1e-12);
      const double scale = p.cwiseAbs().maxCoeff();
      if (step.cwiseAbs().maxCoeff() <= kRelTol * std::max(scale, 1e-300)) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;  // stalled at a minimum
    }
  }

  const double b = p[1];
  if (diverged || !p.allFinite() || !(p[0] > 0.0) || p[2] == 0.0 || b < x[0] || b > x[x.size() - 1]) {
    return weighted_average_interpolate(spectrum, center_bin, window);
  }
  PeakEstimate est;
  est.ramp_index = spectrum.ramp_index;
  est.beat_frequency_hz = spectrum.frequency(center_bin) + b * spectrum.bin_width_hz;
  est.intensity = p[0];
  est.method = InterpMethod::kGaussian;
  est.valid = true;
  est.center_bin = center_bin;
  return est;
}

double median_nonzero(const RampSpectrum& spectrum) {
  std::vector<double> positive;
  positive.reserve(spectrum.magnitudes.size());
  for (double m : spectrum.magnitudes) {
    if (m > 0.0) positive.push_back(m);
  }
  if (positive.empty()) return 0.0;
  const auto mid = positive.begin() + static_cast<std::ptrdiff_t>(positive.size() / 2);
  std::nth_element(positive.begin(), mid, positive.end());
  if (positive.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(positive.begin(), mid);
  return 0.5 * (lower + upper);
}

double validity_threshold(const RampSpectrum& spectrum, double floor_sigma, const ValidityRule& rule) {
  return std::max({rule.abs_floor, rule.kappa_median * median_nonzero(spectrum), rule.kappa_sigma * floor_sigma});
}

PeakEstimate estimate_peak(const RampSpectrum& spectrum, const PeakConfig& config,
                           std::span<const double> floor_sigma) {
  PeakEstimate invalid;
  invalid.ramp_index = spectrum.ramp_index;
  invalid.method = config.method;
  invalid.valid = false;

  const auto center = find_max_bin(spectrum);
  if (!center) return invalid;
  auto est = config.method == InterpMethod::kGaussian ? gaussian_interpolate(spectrum, *center, config.window)
                                                      : weighted_average_interpolate(spectrum, *center, config.window);
  if (!est) return invalid;
  const double sigma = floor_sigma.empty() ? 0.0 : floor_sigma[*center];
  est->valid = est->intensity > validity_threshold(spectrum, sigma, config.validity);
  return *est;
}

}  // namespace lfi
