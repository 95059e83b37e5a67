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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xferbound/transfer_function.hpp"

namespace xferbound::probe {

using lti::Complex;

// Sinusoidal experiment settings and the frequency window they cover.
struct ProbeConfig {
  double omega_min = 0.05;
  double omega_max = 2.0;
  double amplitude = 0.25;
  int settle_periods = 5;
  int measure_periods = 3;
  double sample_period = 1e-3;
  // Standard deviation of additive Gaussian noise on measured outputs.
  double noise_stddev = 0.0;

  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
  bool in_window(double omega) const;
};

// A measured or analytic value G(j omega) at omega > 0.
class FrequencyPoint {
 public:
  FrequencyPoint(double omega, Complex response);
  static FrequencyPoint polar(double omega, double magnitude, double phase);

  double omega() const { return omega_; }
  Complex response() const { return response_; }
  double magnitude() const { return std::abs(response_); }
  double phase() const { return std::arg(response_); }

 private:
  double omega_;
  Complex response_;
};

// One probe round at a single frequency.
struct ProbeResult {
  double omega = 0.0;
  std::vector<FrequencyPoint> source_responses;
  FrequencyPoint target_response{1.0, Complex(1.0)};
  std::vector<double> objective_values;
};

// Drives g with amplitude * sin(omega t), discards settle_periods periods,
// then least-squares fits a sin + b cos over measure_periods periods.
// Returns (sqrt(a^2 + b^2) / amplitude) exp(j atan2(b, a)). Noise (if
// configured) is drawn from a generator seeded with `noise_seed`.
FrequencyPoint probe_system(const lti::TransferFunction& g, double omega, const ProbeConfig& cfg,
                            std::uint64_t noise_seed = 0);

// M^-1 exp(-j theta).
FrequencyPoint estimate_inverse_response(const FrequencyPoint& p);

// |source_n^-1 * target - 1| for each source.
std::vector<double> evaluate_objective(std::span<const FrequencyPoint> sources,
                                       const FrequencyPoint& target);

// Seconds of simulated data consumed by one probe at omega.
double probe_duration(double omega, const ProbeConfig& cfg);

// CSV row omega,source_name,M,theta,objective_value (objective blank when
// absent, e.g. for the target row).
std::string probe_csv_header();
std::string probe_csv_row(const FrequencyPoint& p, const std::string& name,
                          std::optional<double> objective);

}  // namespace xferbound::probe
