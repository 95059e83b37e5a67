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

#include "xferbound/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace xferbound::lti {

namespace {

// Poles and zeros closer to the imaginary axis than this (relative to their
// magnitude) count as marginal.
constexpr double kAxisTol = 1e-12;

bool all_in_open_lhp(const std::vector<Complex>& rts) {
  return std::all_of(rts.begin(), rts.end(), [](const Complex& r) {
    return r.real() < -kAxisTol * std::max(1.0, std::abs(r));
  });
}

std::string poly_to_string(const Coeffs& p) {
  std::string out;
  const int n = static_cast<int>(p.size()) - 1;
  for (int i = 0; i <= n; ++i) {
    const int power = n - i;
    if (i > 0) out += " + ";
    out += fmt::format("{:.6g}", p[static_cast<size_t>(i)]);
    if (power == 1) out += " s";
    if (power > 1) out += fmt::format(" s^{}", power);
  }
  return out;
}

}  // namespace

TransferFunction::TransferFunction(Coeffs numerator, Coeffs denominator) {
  for (double c : numerator) {
    if (!std::isfinite(c)) throw std::invalid_argument("TransferFunction: non-finite numerator");
  }
  for (double c : denominator) {
    if (!std::isfinite(c)) throw std::invalid_argument("TransferFunction: non-finite denominator");
  }
  if (denominator.empty()) throw std::invalid_argument("TransferFunction: empty denominator");
  Coeffs den = trim_leading(denominator);
  if (lti::is_zero(den)) throw std::invalid_argument("TransferFunction: zero denominator");
  Coeffs num = numerator.empty() ? Coeffs{0.0} : trim_leading(numerator);
  if (lti::is_zero(num)) {
    num_ = {0.0};
    den_ = {1.0};
    return;
  }
  const double lead = den[0];
  num_ = scale(num, 1.0 / lead);
  den_ = scale(den, 1.0 / lead);
}

TransferFunction TransferFunction::gain(double k) { return TransferFunction({k}, {1.0}); }

bool TransferFunction::is_zero() const { return lti::is_zero(num_); }

std::vector<Complex> TransferFunction::poles() const { return roots(den_); }

std::vector<Complex> TransferFunction::zeros() const {
  if (is_zero()) return {};
  return roots(num_);
}

std::string TransferFunction::to_string() const {
  return "(" + poly_to_string(num_) + ") / (" + poly_to_string(den_) + ")";
}

int relative_degree(const TransferFunction& g) {
  return g.denominator_degree() - g.numerator_degree();
}

bool is_bibo_stable(const TransferFunction& g) { return all_in_open_lhp(g.poles()); }

bool is_minimum_phase(const TransferFunction& g) {
  if (g.is_zero()) return false;
  return all_in_open_lhp(g.zeros());
}

TransferFunction invert(const TransferFunction& g) {
  if (g.is_zero()) throw std::invalid_argument("invert: zero numerator has no inverse");
  return TransferFunction(g.denominator(), g.numerator());
}

TransferFunction series(const TransferFunction& a, const TransferFunction& b, double cancel_tol) {
  if (a.is_zero() || b.is_zero()) return TransferFunction::gain(0.0);

  std::vector<Complex> zeros = a.zeros();
  const std::vector<Complex> zb = b.zeros();
  zeros.insert(zeros.end(), zb.begin(), zb.end());
  std::vector<Complex> poles = a.poles();
  const std::vector<Complex> pb = b.poles();
  poles.insert(poles.end(), pb.begin(), pb.end());

  std::vector<bool> pole_used(poles.size(), false);
  std::vector<Complex> kept_zeros;
  bool cancelled = false;
  for (const Complex& z : zeros) {
    size_t best = poles.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < poles.size(); ++i) {
      if (pole_used[i]) continue;
      const double dist = std::abs(z - poles[i]);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < poles.size() &&
        best_dist <= cancel_tol * std::max(std::abs(z), std::abs(poles[best]))) {
      pole_used[best] = true;
      cancelled = true;
    } else {
      kept_zeros.push_back(z);
    }
  }

  if (!cancelled) {
    return TransferFunction(multiply(a.numerator(), b.numerator()),
                            multiply(a.denominator(), b.denominator()));
  }

  std::vector<Complex> kept_poles;
  for (size_t i = 0; i < poles.size(); ++i) {
    if (!pole_used[i]) kept_poles.push_back(poles[i]);
  }
  // Denominators are monic, so the overall gain is the numerator leads.
  const double k = a.numerator().front() * b.numerator().front();
  return TransferFunction(from_roots(kept_zeros, k), from_roots(kept_poles, 1.0));
}

TransferFunction add(const TransferFunction& a, const TransferFunction& b) {
  if (a.denominator() == b.denominator()) {
    return TransferFunction(lti::add(a.numerator(), b.numerator()), a.denominator());
  }
  return TransferFunction(lti::add(multiply(a.numerator(), b.denominator()),
                                   multiply(b.numerator(), a.denominator())),
                          multiply(a.denominator(), b.denominator()));
}

TransferFunction subtract(const TransferFunction& a, const TransferFunction& b) {
  return add(a, TransferFunction(scale(b.numerator(), -1.0), b.denominator()));
}

TransferFunction error_tf(const TransferFunction& source, const TransferFunction& target) {
  const int rs = relative_degree(source);
  const int rt = relative_degree(target);
  if (rt < rs) {
    throw ImproperCompositionError(fmt::format(
        "error_tf: target relative degree {} is below source relative degree {}; "
        "source^-1 * target would be improper",
        rt, rs));
  }
  return subtract(series(invert(source), target), TransferFunction::gain(1.0));
}

Complex freq_response(const TransferFunction& g, double omega) {
  if (!std::isfinite(omega) || omega < 0.0) {
    throw std::invalid_argument(fmt::format("freq_response: invalid frequency {}", omega));
  }
  const Complex s(0.0, omega);
  const Complex d = evaluate(g.denominator(), s);
  double scale_d = 0.0;
  double power = 1.0;
  for (auto it = g.denominator().rbegin(); it != g.denominator().rend(); ++it) {
    scale_d += std::abs(*it) * power;
    power *= omega;
  }
  if (std::abs(d) <= 1e-14 * scale_d) {
    throw std::domain_error(fmt::format("freq_response: pole on the imaginary axis at omega = {}", omega));
  }
  return evaluate(g.numerator(), s) / d;
}

PeakGain peak_gain(const TransferFunction& g, std::span<const double> omegas) {
  PeakGain best;
  best.magnitude = -1.0;
  for (double w : omegas) {
    const double m = std::abs(freq_response(g, w));
    if (m > best.magnitude) best = {w, m};
  }
  return best;
}

std::vector<double> logspace(double lo, double hi, size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
    throw std::invalid_argument("logspace: need 0 < lo <= hi and n >= 1");
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace xferbound::lti
