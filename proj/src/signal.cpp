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

#include "xferbound/signal.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace xferbound::lti {

SampledSignal::SampledSignal(std::vector<double> samples, double sample_period)
    : samples_(std::move(samples)), dt_(sample_period) {
  if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
    throw std::invalid_argument("SampledSignal: sample period must be positive and finite");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SampledSignal: non-finite sample");
  }
}

namespace {

void check_compatible(const SampledSignal& a, const SampledSignal& b) {
  if (a.size() != b.size() || a.sample_period() != b.sample_period()) {
    throw std::invalid_argument("SampledSignal: length or sample period mismatch");
  }
}

}  // namespace

SampledSignal operator-(const SampledSignal& a, const SampledSignal& b) {
  check_compatible(a, b);
  std::vector<double> out(a.size());
  for (size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return SampledSignal(std::move(out), a.sample_period());
}

SampledSignal operator+(const SampledSignal& a, const SampledSignal& b) {
  check_compatible(a, b);
  std::vector<double> out(a.size());
  for (size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return SampledSignal(std::move(out), a.sample_period());
}

SampledSignal operator*(double k, const SampledSignal& a) {
  std::vector<double> out(a.samples());
  for (double& v : out) v *= k;
  return SampledSignal(std::move(out), a.sample_period());
}

double l2_norm(const SampledSignal& x) {
  if (x.empty()) throw std::invalid_argument("l2_norm: empty signal");
  double acc = 0.0;
  for (double v : x.samples()) acc += v * v;
  return std::sqrt(acc * x.sample_period());
}

DiscreteRealization::DiscreteRealization(const TransferFunction& g, double sample_period)
    : dt_(sample_period) {
  if (!g.is_proper()) {
    throw std::invalid_argument("DiscreteRealization: improper transfer function " + g.to_string());
  }
  if (!(sample_period > 0.0)) {
    throw std::invalid_argument("DiscreteRealization: sample period must be positive");
  }
  const Coeffs& den = g.denominator();  // monic
  n_ = den.size() - 1;
  Coeffs num(den.size(), 0.0);
  const size_t offset = den.size() - g.numerator().size();
  for (size_t i = 0; i < g.numerator().size(); ++i) num[offset + i] = g.numerator()[i];

  d_ = num[0];
  c_.resize(n_);
  for (size_t i = 0; i < n_; ++i) c_[i] = num[i + 1] - d_ * den[i + 1];

  if (n_ > 0) {
    // exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, 1]]
    const int n = static_cast<int>(n_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) m(0, j) = -den[static_cast<size_t>(j) + 1];
    for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    m(0, n) = 1.0;
    const Eigen::MatrixXd e = (m * dt_).exp();
    ad_.resize(n_ * n_);
    bd_.resize(n_);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) ad_[static_cast<size_t>(i * n + j)] = e(i, j);
      bd_[static_cast<size_t>(i)] = e(i, n);
    }
  }
  x_.assign(n_, 0.0);
  next_.assign(n_, 0.0);
}

void DiscreteRealization::reset() { x_.assign(n_, 0.0); }

SampledSignal simulate(const TransferFunction& g, const SampledSignal& input) {
  if (input.empty()) throw std::invalid_argument("simulate: empty input");
  if (!g.is_proper()) throw std::invalid_argument("simulate: improper system " + g.to_string());
  if (!is_bibo_stable(g)) throw std::invalid_argument("simulate: unstable system " + g.to_string());
  DiscreteRealization sys(g, input.sample_period());
  std::vector<double> out(input.size());
  for (size_t k = 0; k < input.size(); ++k) out[k] = sys.step(input[k]);
  return SampledSignal(std::move(out), input.sample_period());
}

}  // namespace xferbound::lti
