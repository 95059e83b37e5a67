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

#include <complex>
#include <span>
#include <vector>

namespace xferbound::lti {

// Real polynomial coefficients, highest degree first: {a0, a1, ..., an}
// represents a0 s^n + a1 s^(n-1) + ... + an.
using Coeffs = std::vector<double>;
using Complex = std::complex<double>;

// Drops leading coefficients that are zero relative to the largest
// coefficient magnitude. The zero polynomial comes back as {0}.
Coeffs trim_leading(std::span<const double> p, double rel_tol = 1e-12);

// Degree of a trimmed polynomial; the zero polynomial has degree 0.
int degree(std::span<const double> p);

bool is_zero(std::span<const double> p);

Coeffs multiply(std::span<const double> a, std::span<const double> b);
Coeffs add(std::span<const double> a, std::span<const double> b);
Coeffs subtract(std::span<const double> a, std::span<const double> b);
Coeffs scale(std::span<const double> p, double k);

// Horner evaluation at a complex point.
Complex evaluate(std::span<const double> p, Complex s);

// Roots from the eigenvalues of the companion matrix. Throws
// std::runtime_error for non-finite coefficients or when the eigensolver
// does not converge.
std::vector<Complex> roots(std::span<const double> p);

// Monic polynomial with the given roots, scaled by `gain`. Conjugate pairs
// are expected; residual imaginary parts are discarded.
Coeffs from_roots(std::span<const Complex> rts, double gain);

struct DivisionResult {
  Coeffs quotient;
  Coeffs remainder;
};

// Polynomial long division: num = quotient * den + remainder.
DivisionResult divide(std::span<const double> num, std::span<const double> den);

}  // namespace xferbound::lti
