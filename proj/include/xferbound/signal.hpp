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

#include <cstddef>
#include <span>
#include <vector>

#include "xferbound/transfer_function.hpp"

namespace xferbound::lti {

// Uniformly sampled, finite-length real signal. Sample k sits at t = k * dt.
class SampledSignal {
 public:
  SampledSignal(std::vector<double> samples, double sample_period);

  // Samples f(k * dt) for k = 0 .. count - 1.
  template <typename Fn>
  static SampledSignal generate(size_t count, double sample_period, Fn&& f) {
    std::vector<double> v(count);
    for (size_t k = 0; k < count; ++k) v[k] = f(static_cast<double>(k) * sample_period);
    return SampledSignal(std::move(v), sample_period);
  }

  const std::vector<double>& samples() const { return samples_; }
  double sample_period() const { return dt_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration() const { return static_cast<double>(samples_.size()) * dt_; }
  double operator[](size_t k) const { return samples_[k]; }

 private:
  std::vector<double> samples_;
  double dt_;
};

// a - b sample by sample; both must share length and sample period.
SampledSignal operator-(const SampledSignal& a, const SampledSignal& b);
SampledSignal operator+(const SampledSignal& a, const SampledSignal& b);
SampledSignal operator*(double k, const SampledSignal& a);

// sqrt(sum x_k^2 * dt).
double l2_norm(const SampledSignal& x);

// Zero-order-hold discretization of the controllable canonical realization
// of a proper transfer function:
//   x[k+1] = Ad x[k] + Bd u[k],  y[k] = C x[k] + D u[k].
class DiscreteRealization {
 public:
  DiscreteRealization(const TransferFunction& g, double sample_period);

  size_t order() const { return n_; }
  double sample_period() const { return dt_; }

  // Advances one sample and returns y[k] for input u[k].
  double step(double u) {
    double y = d_ * u;
    for (size_t i = 0; i < n_; ++i) y += c_[i] * x_[i];
    for (size_t i = 0; i < n_; ++i) {
      double acc = bd_[i] * u;
      const double* row = &ad_[i * n_];
      for (size_t j = 0; j < n_; ++j) acc += row[j] * x_[j];
      next_[i] = acc;
    }
    x_.swap(next_);
    return y;
  }

  void reset();

 private:
  size_t n_ = 0;
  double dt_ = 0.0;
  std::vector<double> ad_;  // row-major n x n
  std::vector<double> bd_;
  std::vector<double> c_;
  double d_ = 0.0;
  std::vector<double> x_;
  std::vector<double> next_;
};

// Response of g to the input from zero initial state. Throws
// std::invalid_argument for improper or unstable g, or an empty input.
SampledSignal simulate(const TransferFunction& g, const SampledSignal& input);

}  // namespace xferbound::lti
