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

#include <string>
#include <vector>

#include "json.hpp"
#include "xferbound/signal.hpp"
#include "xferbound/transfer_function.hpp"

namespace xferbound::analysis {

using lti::SampledSignal;
using lti::TransferFunction;

// e_star * ||yd||_2. Throws std::invalid_argument for negative or
// non-finite e_star.
double tracking_error_bound(double e_star, const SampledSignal& yd);

enum class Verdict { Positive, NotGuaranteed };
std::string to_string(Verdict v);

struct AxisEstimate {
  std::string axis;
  double e_star = 0.0;
};

struct AxisSignal {
  std::string axis;
  SampledSignal yd;
};

struct AxisBound {
  std::string axis;
  double e_star = 0.0;
  double yd_norm = 0.0;
  double bound = 0.0;
};

struct BoundCertificate {
  std::string source_name;
  std::vector<AxisBound> per_axis;
  double combined_bound = 0.0;
  double baseline_error = 0.0;
  double margin = 1.0;
  Verdict verdict = Verdict::NotGuaranteed;
};

// Per-axis bounds in the order of `yd`, their root-sum-square, and
// Positive iff margin * combined < baseline. Throws std::invalid_argument
// when the axis names of `estimates` and `yd` differ, for a negative
// baseline or a margin below one.
BoundCertificate verdict(const std::string& source_name, const std::vector<AxisEstimate>& estimates,
                         const std::vector<AxisSignal>& yd, double baseline_error, double margin = 1.0);

nlohmann::json to_json_value(const BoundCertificate& c);

// y_a - y_d for the target alone.
SampledSignal baseline_error(const TransferFunction& target, const SampledSignal& yd);
// y_a - y_d with the source inverse in series in front of the target.
SampledSignal transfer_error(const TransferFunction& source, const TransferFunction& target,
                             const SampledSignal& yd);
// amplitude * sin(omega t + phase).
struct Sinusoid {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  SampledSignal sample(size_t count, double sample_period) const;
};

// Reference y_r = G_s^-1 y_d the source inverse feeds into the target. The
// inverse is split into a polynomial part, applied through the analytic
// derivatives of the sinusoid, and a strictly proper part that is simulated.
// Throws std::invalid_argument unless the source is minimum phase.
SampledSignal inverse_reference(const TransferFunction& source, const Sinusoid& yd, size_t count,
                                double sample_period);

struct TransferErrors {
  SampledSignal e_transfer;
  SampledSignal e_baseline;
};

// First-order pair 1/(tau s + 1): target baseline and source-inverse errors
// on the same desired trajectory.
TransferErrors first_order_transfer_error(double tau_source, double tau_target, const SampledSignal& yd);

// Chordal distance between the stereographic projections of a and b.
double chordal_distance(lti::Complex a, lti::Complex b);

struct AsymmetryReport {
  std::vector<double> omega_grid;
  std::vector<double> chordal;
  std::vector<double> asym_factor;
  std::vector<double> error_mag;
  double nu_gap = 0.0;
  bool winding_condition_ok = false;
};

// psi(G1, G2), Psi(G1, G2) = sqrt(1 + |G1|^2) / psi(G2, 0) and
// |G1 / G2 - 1| on the grid. The gap is the grid supremum of psi, so it is
// restricted to the grid's span. winding_condition_ok reports
// |G2(-jw) G1(jw)| < 1 at every grid point. Throws std::invalid_argument
// unless both plants are stable and minimum phase, and std::domain_error if
// G2 vanishes on the grid.
AsymmetryReport nu_gap_report(const TransferFunction& g1, const TransferFunction& g2,
                              const std::vector<double>& grid);

nlohmann::json to_json_value(const AsymmetryReport& r);

}  // namespace xferbound::analysis
