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

#include <stdexcept>
#include <string>
#include <vector>

#include "xferbound/polynomial.hpp"

namespace xferbound::lti {

// Raised when a composition would be improper (relative degree < 0).
class ImproperCompositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Continuous-time SISO transfer function n(s)/d(s).
//
// Stored canonically: leading zeros trimmed, leading denominator coefficient
// equal to one, and the zero function stored as 0/1. Improper values are
// representable (a bare inverse is improper in general) and reported by
// is_proper(); simulation refuses them.
class TransferFunction {
 public:
  TransferFunction(Coeffs numerator, Coeffs denominator);

  // Static gain k.
  static TransferFunction gain(double k);

  const Coeffs& numerator() const { return num_; }
  const Coeffs& denominator() const { return den_; }

  int numerator_degree() const { return static_cast<int>(num_.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(den_.size()) - 1; }
  bool is_proper() const { return numerator_degree() <= denominator_degree(); }
  bool is_zero() const;

  std::vector<Complex> poles() const;
  std::vector<Complex> zeros() const;

  std::string to_string() const;

  friend bool operator==(const TransferFunction&, const TransferFunction&) = default;

 private:
  Coeffs num_;
  Coeffs den_;
};

int relative_degree(const TransferFunction& g);

bool is_bibo_stable(const TransferFunction& g);

// All zeros strictly in the open left half-plane. A zero numerator is not
// minimum phase.
bool is_minimum_phase(const TransferFunction& g);

// d(s)/n(s). Throws std::invalid_argument for a zero numerator.
TransferFunction invert(const TransferFunction& g);

// Product a(s) b(s) with pole/zero pairs matching within `cancel_tol`
// relative distance removed.
TransferFunction series(const TransferFunction& a, const TransferFunction& b,
                        double cancel_tol = 1e-8);

TransferFunction add(const TransferFunction& a, const TransferFunction& b);
TransferFunction subtract(const TransferFunction& a, const TransferFunction& b);

// E(s) = source^-1(s) target(s) - 1, the map from desired output to tracking
// error when the source inverse is pre-cascaded to the target.
// Throws ImproperCompositionError unless
// relative_degree(target) >= relative_degree(source).
TransferFunction error_tf(const TransferFunction& source, const TransferFunction& target);

// g(j omega). Throws std::domain_error when omega sits on an imaginary-axis
// pole and std::invalid_argument for negative or non-finite omega.
Complex freq_response(const TransferFunction& g, double omega);

// Largest |g(j w)| over the given frequencies, with its location.
struct PeakGain {
  double omega = 0.0;
  double magnitude = 0.0;
};
PeakGain peak_gain(const TransferFunction& g, std::span<const double> omegas);

// n points log-spaced over [lo, hi], endpoints included.
std::vector<double> logspace(double lo, double hi, size_t n);

}  // namespace xferbound::lti
