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

#include "lfi/analysis.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "lfi/constants.hpp"
#include "lfi/errors.hpp"
#include "lfi/keyvalue.hpp"

namespace lfi {

int blind_count(const WorkingPoint& wp, const GroundTruth& gt) {
  int count = 0;
  for (double f : signed_beats(wp, gt)) {
    if (std::abs(f) < wp.hp_cutoff_hz) ++count;
  }
  return count;
}

std::vector<double> make_axis(const AxisRange& range) {
  if (range.points == 0) throw ParameterError("axis needs at least one point");
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) throw ParameterError("axis bounds must be finite");
  if (range.points == 1) return {range.min};
  if (!(range.max > range.min)) throw ParameterError("axis must be strictly increasing (max > min)");
  std::vector<double> axis(range.points);
  const double step = (range.max - range.min) / static_cast<double>(range.points - 1);
  for (std::size_t i = 0; i < range.points; ++i) axis[i] = range.min + step * static_cast<double>(i);
  axis.back() = range.max;
  return axis;
}

BlindMap blind_map(const WorkingPoint& wp, const AxisRange& v_range, const AxisRange& r_range) {
  validate(wp);
  BlindMap map;
  map.v_axis = make_axis(v_range);
  map.r_axis = make_axis(r_range);
  map.blind_count.resize(map.v_axis.size() * map.r_axis.size());
  for (std::size_t r = 0; r < map.r_axis.size(); ++r) {
    for (std::size_t v = 0; v < map.v_axis.size(); ++v) {
      map.blind_count[r * map.v_axis.size() + v] =
          static_cast<std::uint8_t>(blind_count(wp, GroundTruth{map.r_axis[r], map.v_axis[v]}));
    }
  }
  return map;
}

void write_blind_map_csv(std::ostream& out, const BlindMap& map) {
  out << "v_mps,R_m,blind_count\n";
  for (std::size_t r = 0; r < map.r_axis.size(); ++r) {
    for (std::size_t v = 0; v < map.v_axis.size(); ++v) {
      out << format_double(map.v_axis[v]) << ',' << format_double(map.r_axis[r]) << ',' << map.at(v, r) << '\n';
    }
  }
}

void write_blind_map_grid(std::ostream& out, const BlindMap& map) {
  out << "R_m\\v_mps";
  for (double v : map.v_axis) out << ' ' << format_double(v);
  out << '\n';
  for (std::size_t r = 0; r < map.r_axis.size(); ++r) {
    out << format_double(map.r_axis[r]);
    for (std::size_t v = 0; v < map.v_axis.size(); ++v) out << ' ' << map.at(v, r);
    out << '\n';
  }
}

bool has_blind_overlap(const WorkingPoint& wp, double distance_m, double v_max_mps) {
  const double h = wp.hp_cutoff_hz;
  const double d_max = wp.emitted_frequency_hz * std::abs(v_max_mps) / kSpeedOfLight;
  const auto slopes = ramp_slopes(wp);
  // Ramp i is blind for Doppler terms d in the open interval (-a_i - h, -a_i + h).
  std::array<double, 4> shift{};
  for (std::size_t i = 0; i < 4; ++i) shift[i] = 2.0 * distance_m * slopes[i] / kSpeedOfLight;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double lo = std::max(-shift[i], -shift[j]) - h;
      const double hi = std::min(-shift[i], -shift[j]) + h;
      if (lo < hi && lo < d_max && hi > -d_max) return true;
    }
  }
  return false;
}

std::optional<double> min_reliable_distance(const WorkingPoint& wp, double v_max_mps, double search_max_m) {
  validate(wp);
  if (!(v_max_mps > 0.0)) throw ParameterError("min_reliable_distance: v_max must be > 0");
  if (!(search_max_m > 0.0)) throw ParameterError("min_reliable_distance: search range must be > 0");
  if (!has_blind_overlap(wp, 0.0, v_max_mps)) return 0.0;
  if (has_blind_overlap(wp, search_max_m, v_max_mps)) return std::nullopt;

  constexpr std::size_t kGrid = 1000;
  double bad = 0.0;
  double good = search_max_m;
  for (std::size_t i = 1; i <= kGrid; ++i) {
    const double r = search_max_m * static_cast<double>(i) / kGrid;
    if (has_blind_overlap(wp, r, v_max_mps)) {
      bad = r;
    }
  }
  good = std::min(search_max_m, bad + search_max_m / kGrid);
  while (good - bad > kMinDistanceTolerance) {
    const double mid = 0.5 * (bad + good);
    (has_blind_overlap(wp, mid, v_max_mps) ? bad : good) = mid;
  }
  return good;
}

// ---------------------------------------------------------------------------

namespace {

void check_positive(const NoiseRegressors& r) {
  const std::array<double, 6> values = {r.ramp_rate_hz, r.slope_hz_per_s, r.beat_hz, r.velocity_mps,
                                        r.distance_m,   r.n_avg};
  constexpr std::array<std::string_view, 6> names = {"f_ramp_rate", "slope_S",    "beat_f_b",
                                                     "velocity_v",  "distance_R", "n_avg"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw FitError("noise model: " + std::string(names[i]) + " must be finite and > 0 (log domain)");
    }
  }
}

std::array<double, 5> log_regressors(const NoiseRegressors& r) {
  return {std::log10(r.ramp_rate_hz), std::log10(r.slope_hz_per_s), std::log10(r.beat_hz),
          std::log10(r.velocity_mps), std::log10(r.distance_m)};
}

Eigen::Index rank_of(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-9);
  return qr.rank();
}

}  // namespace

NoiseModelCoefficients fit_noise_model(std::span<const NoiseObservation> observations) {
  if (observations.size() < kMinNoiseObservations) {
    throw FitError("noise model: need at least " + std::to_string(kMinNoiseObservations) + " observations, got " +
                   std::to_string(observations.size()));
  }
  const auto n = static_cast<Eigen::Index>(observations.size());
  Eigen::MatrixXd design(n, 6);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = observations[static_cast<std::size_t>(i)];
    check_positive(obs.regressors);
    if (!(obs.observed_sigma_fb_hz > 0.0) || !std::isfinite(obs.observed_sigma_fb_hz)) {
      throw FitError("noise model: observed_sigma_fb must be finite and > 0 (log domain)");
    }
    const auto x = log_regressors(obs.regressors);
    for (Eigen::Index j = 0; j < 5; ++j) design(i, j) = x[static_cast<std::size_t>(j)];
    design(i, 5) = 1.0;
    target[i] = std::log10(std::sqrt(obs.regressors.n_avg) * obs.observed_sigma_fb_hz);
  }

  // Name the first regressor that adds no rank to the intercept and the
  // regressors before it.
  for (Eigen::Index j = 0; j < 5; ++j) {
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < n; ++i) distinct.insert(design(i, j));
    if (distinct.size() < 2) {
      throw FitError("noise model: regressor " + std::string(kNoiseRegressorNames[static_cast<std::size_t>(j)]) +
                     " needs at least two distinct values");
    }
  }
  Eigen::MatrixXd partial(n, 1);
  partial.col(0) = design.col(5);
  for (Eigen::Index j = 0; j < 5; ++j) {
    Eigen::MatrixXd next(n, partial.cols() + 1);
    next << partial, design.col(j);
    if (rank_of(next) <= rank_of(partial)) {
      throw FitError("noise model: regressor " + std::string(kNoiseRegressorNames[static_cast<std::size_t>(j)]) +
                     " is collinear with the intercept and earlier regressors (rank-deficient design)");
    }
    partial = std::move(next);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd beta = qr.solve(target);
  const Eigen::VectorXd resid = target - design * beta;
  const double rss = resid.squaredNorm();

  NoiseModelCoefficients coeffs;
  for (std::size_t j = 0; j < 5; ++j) coeffs.slopes[j] = beta[static_cast<Eigen::Index>(j)];
  coeffs.intercept = beta[5];
  coeffs.fit_residual = std::sqrt(rss / static_cast<double>(n));
  coeffs.n_observations = observations.size();
  const double sigma2 = rss / static_cast<double>(n - 6);
  const Eigen::MatrixXd cov = sigma2 * (design.transpose() * design).inverse();
  for (std::size_t j = 0; j < 6; ++j) {
    coeffs.standard_errors[j] = std::sqrt(std::max(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)), 0.0));
  }
  return coeffs;
}

double predict_sigma_fb(const NoiseModelCoefficients& coeffs, const NoiseRegressors& regressors) {
  check_positive(regressors);
  const auto x = log_regressors(regressors);
  double log_scaled = coeffs.intercept;
  for (std::size_t j = 0; j < 5; ++j) log_scaled += coeffs.slopes[j] * x[j];
  return std::pow(10.0, log_scaled) / std::sqrt(regressors.n_avg);
}

namespace {
constexpr std::string_view kObservationHeader =
    "f_ramp_rate,slope_S,beat_f_b,velocity_v,distance_R,n_avg,observed_sigma_fb";
}

std::vector<NoiseObservation> read_noise_observations(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("noise observations: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kObservationHeader) {
    throw FormatError("noise observations: header must be '" + std::string(kObservationHeader) + "'");
  }
  std::vector<NoiseObservation> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 7> v{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= v.size()) throw FormatError("noise observations line " + std::to_string(line_no) + ": too many columns");
      v[col++] = parse_double(cell);
    }
    if (col != v.size()) throw FormatError("noise observations line " + std::to_string(line_no) + ": expected 7 columns");
    out.push_back(NoiseObservation{NoiseRegressors{v[0], v[1], v[2], v[3], v[4], v[5]}, v[6]});
  }
  return out;
}

void write_noise_observations(std::ostream& out, std::span<const NoiseObservation> observations) {
  out << kObservationHeader << '\n';
  for (const auto& o : observations) {
    const auto& r = o.regressors;
    out << format_double(r.ramp_rate_hz) << ',' << format_double(r.slope_hz_per_s) << ',' << format_double(r.beat_hz)
        << ',' << format_double(r.velocity_mps) << ',' << format_double(r.distance_m) << ',' << format_double(r.n_avg)
        << ',' << format_double(o.observed_sigma_fb_hz) << '\n';
  }
}

void write_noise_model(std::ostream& out, const NoiseModelCoefficients& coeffs) {
  nlohmann::ordered_json j;
  j["format"] = "lfi-noise-model";
  j["version"] = 1;
  j["log_base"] = 10;
  for (std::size_t i = 0; i < 5; ++i) j["a" + std::to_string(i + 1)] = coeffs.slopes[i];
  j["b"] = coeffs.intercept;
  j["fit_residual"] = coeffs.fit_residual;
  j["standard_errors"] = coeffs.standard_errors;
  j["n_observations"] = coeffs.n_observations;
  out << j.dump(2) << '\n';
}

NoiseModelCoefficients read_noise_model(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "lfi-noise-model") throw FormatError("not a noise model file");
    NoiseModelCoefficients c;
    for (std::size_t i = 0; i < 5; ++i) c.slopes[i] = j.at("a" + std::to_string(i + 1)).get<double>();
    c.intercept = j.at("b").get<double>();
    c.fit_residual = j.value("fit_residual", 0.0);
    if (j.contains("standard_errors")) c.standard_errors = j.at("standard_errors").get<std::array<double, 6>>();
    c.n_observations = j.value("n_observations", std::size_t{0});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("noise model: ") + e.what());
  }
}

}  // namespace lfi
