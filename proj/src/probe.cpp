// Copyright 2026 The xferbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xferbound/probe.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "xferbound/signal.hpp"

namespace xferbound::probe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Fewer samples per period than this cannot resolve the sinusoid.
constexpr double kMinSamplesPerPeriod = 8.0;

}  // namespace

void ProbeConfig::validate() const {
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || !std::isfinite(omega_max)) {
    throw std::invalid_argument(
        fmt::format("ProbeConfig: need 0 < omega_min < omega_max, got [{}, {}]", omega_min, omega_max));
  }
  if (!(amplitude > 0.0)) throw std::invalid_argument("ProbeConfig: amplitude must be positive");
  if (settle_periods < 3) throw std::invalid_argument("ProbeConfig: settle_periods must be >= 3");
  if (measure_periods < 2) throw std::invalid_argument("ProbeConfig: measure_periods must be >= 2");
  if (!(sample_period > 0.0)) throw std::invalid_argument("ProbeConfig: sample_period must be positive");
  if (!(noise_stddev >= 0.0)) throw std::invalid_argument("ProbeConfig: noise_stddev must be >= 0");
}

bool ProbeConfig::in_window(double omega) const {
  const double slack = 1e-12 * omega_max;
  return omega >= omega_min - slack && omega <= omega_max + slack;
}

FrequencyPoint::FrequencyPoint(double omega, Complex response) : omega_(omega), response_(response) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument(fmt::format("FrequencyPoint: omega must be positive and finite, got {}", omega));
  }
  if (!std::isfinite(response.real()) || !std::isfinite(response.imag())) {
    throw std::invalid_argument("FrequencyPoint: non-finite response");
  }
}

FrequencyPoint FrequencyPoint::polar(double omega, double magnitude, double phase) {
  return FrequencyPoint(omega, std::polar(magnitude, phase));
}

double probe_duration(double omega, const ProbeConfig& cfg) {
  return static_cast<double>(cfg.settle_periods + cfg.measure_periods) * kTwoPi / omega;
}

FrequencyPoint probe_system(const lti::TransferFunction& g, double omega, const ProbeConfig& cfg,
                            std::uint64_t noise_seed) {
  cfg.validate();
  if (!cfg.in_window(omega)) {
    throw std::invalid_argument(fmt::format("probe_system: omega {} outside window [{}, {}]", omega,
                                            cfg.omega_min, cfg.omega_max));
  }
  if (!g.is_proper() || !lti::is_bibo_stable(g)) {
    throw std::invalid_argument("probe_system: plant must be proper and stable: " + g.to_string());
  }
  const double period = kTwoPi / omega;
  const double dt = cfg.sample_period;
  if (period / dt < kMinSamplesPerPeriod) {
    throw std::invalid_argument(fmt::format(
        "probe_system: sample period {} s is too coarse for omega {} rad/s", dt, omega));
  }
  const auto settle = static_cast<size_t>(std::llround(cfg.settle_periods * period / dt));
  const auto measure = static_cast<size_t>(std::llround(cfg.measure_periods * period / dt));
  if (static_cast<double>(measure) * dt < period) {
    throw std::invalid_argument("probe_system: measurement window shorter than one period");
  }

  lti::DiscreteRealization sys(g, dt);
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_stddev > 0.0 ? cfg.noise_stddev : 1.0);

  // The phasor exp(j omega k dt) is advanced by rotation and re-anchored
  // every 1024 samples.
  const Complex rotation = std::polar(1.0, omega * dt);
  Complex phasor(1.0, 0.0);
  double ss = 0.0, cc = 0.0, sc = 0.0, ys = 0.0, yc = 0.0;
  const size_t total = settle + measure;
  for (size_t k = 0; k < total; ++k) {
    if ((k & 1023u) == 0) phasor = std::polar(1.0, omega * dt * static_cast<double>(k));
    const double s = phasor.imag();
    const double c = phasor.real();
    double y = sys.step(cfg.amplitude * s);
    if (k >= settle) {
      if (cfg.noise_stddev > 0.0) y += noise(rng);
      ss += s * s;
      cc += c * c;
      sc += s * c;
      ys += y * s;
      yc += y * c;
    }
    phasor *= rotation;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  return FrequencyPoint::polar(omega, std::hypot(a, b) / cfg.amplitude, std::atan2(b, a));
}

FrequencyPoint estimate_inverse_response(const FrequencyPoint& p) {
  if (!(p.magnitude() > 0.0)) {
    throw std::domain_error(fmt::format("estimate_inverse_response: zero response at omega {}", p.omega()));
  }
  return FrequencyPoint::polar(p.omega(), 1.0 / p.magnitude(), -p.phase());
}

std::vector<double> evaluate_objective(std::span<const FrequencyPoint> sources,
                                       const FrequencyPoint& target) {
  std::vector<double> out;
  out.reserve(sources.size());
  for (const FrequencyPoint& s : sources) {
    if (std::abs(s.omega() - target.omega()) > 1e-12 * target.omega()) {
      throw std::invalid_argument(fmt::format("evaluate_objective: frequency mismatch ({} vs {})",
                                              s.omega(), target.omega()));
    }
    const Complex inverse = estimate_inverse_response(s).response();
    out.push_back(std::abs(inverse * target.response() - 1.0));
  }
  return out;
}

std::string probe_csv_header() { return "omega,source_name,M,theta,objective_value"; }

std::string probe_csv_row(const FrequencyPoint& p, const std::string& name,
                          std::optional<double> objective) {
  return fmt::format("{:.12g},{},{:.12g},{:.12g},{}", p.omega(), name, p.magnitude(), p.phase(),
                     objective ? fmt::format("{:.12g}", *objective) : std::string());
}

}  // namespace xferbound::probe
