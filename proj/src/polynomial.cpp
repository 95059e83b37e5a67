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

#include "xferbound/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace xferbound::lti {

Coeffs trim_leading(std::span<const double> p, double rel_tol) {
  double largest = 0.0;
  for (double c : p) largest = std::max(largest, std::abs(c));
  if (largest == 0.0) return {0.0};
  const double cutoff = rel_tol * largest;
  size_t first = 0;
  while (first + 1 < p.size() && std::abs(p[first]) <= cutoff) ++first;
  return Coeffs(p.begin() + static_cast<std::ptrdiff_t>(first), p.end());
}

int degree(std::span<const double> p) {
  const Coeffs t = trim_leading(p);
  return static_cast<int>(t.size()) - 1;
}

bool is_zero(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

Coeffs multiply(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {0.0};
  Coeffs out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Coeffs add(std::span<const double> a, std::span<const double> b) {
  const size_t n = std::max(a.size(), b.size());
  Coeffs out(n, 0.0);
  // align on the constant term
  for (size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
  return out;
}

Coeffs subtract(std::span<const double> a, std::span<const double> b) {
  return add(a, scale(b, -1.0));
}

Coeffs scale(std::span<const double> p, double k) {
  Coeffs out(p.begin(), p.end());
  for (double& c : out) c *= k;
  return out;
}

Complex evaluate(std::span<const double> p, Complex s) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

std::vector<Complex> roots(std::span<const double> p) {
  for (double c : p) {
    if (!std::isfinite(c)) {
      throw std::runtime_error("roots: polynomial has non-finite coefficients");
    }
  }
  const Coeffs t = trim_leading(p);
  const int n = static_cast<int>(t.size()) - 1;
  if (n <= 0) return {};
  if (t[0] == 0.0) {
    throw std::runtime_error("roots: degenerate polynomial (zero polynomial)");
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -t[j + 1] / t[0];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("roots: companion eigenvalue iteration failed to converge");
  }
  std::vector<Complex> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = solver.eigenvalues()[i];
  return out;
}

Coeffs from_roots(std::span<const Complex> rts, double gain) {
  std::vector<Complex> acc{Complex(1.0)};
  for (const Complex& r : rts) {
    std::vector<Complex> next(acc.size() + 1, Complex(0.0));
    for (size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  Coeffs out(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) out[i] = gain * acc[i].real();
  return out;
}

DivisionResult divide(std::span<const double> num, std::span<const double> den) {
  const Coeffs d = trim_leading(den);
  if (is_zero(d)) throw std::invalid_argument("divide: zero divisor");
  Coeffs r = trim_leading(num);
  if (r.size() < d.size()) return {{0.0}, r};
  Coeffs q(r.size() - d.size() + 1, 0.0);
  for (size_t i = 0; i < q.size(); ++i) {
    const double c = r[i] / d[0];
    q[i] = c;
    for (size_t j = 0; j < d.size(); ++j) r[i + j] -= c * d[j];
  }
  Coeffs rem(r.end() - static_cast<std::ptrdiff_t>(d.size() - 1), r.end());
  if (rem.empty()) rem = {0.0};
  return {q, trim_leading(rem)};
}

}  // namespace xferbound::lti
