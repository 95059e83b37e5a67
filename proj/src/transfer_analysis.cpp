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


#include "xferbound/transfer_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace xferbound::analysis {

double tracking_error_bound(double e_star, const SampledSignal& yd) {
  if (!(e_star >= 0.0) || !std::isfinite(e_star)) {
    throw std::invalid_argument(fmt::format("tracking_error_bound: e_star must be >= 0, got {}", e_star));
  }
  return e_star * lti::l2_norm(yd);
}

std::string to_string(Verdict v) { return v == Verdict::Positive ? "Positive" : "NotGuaranteed"; }

BoundCertificate verdict(const std::string& source_name, const std::vector<AxisEstimate>& estimates,
                         const std::vector<AxisSignal>& yd, double baseline_error, double margin) {
  if (!(baseline_error >= 0.0)) throw std::invalid_argument("verdict: baseline error must be >= 0");
  if (!(margin >= 1.0) || !std::isfinite(margin)) throw std::invalid_argument("verdict: margin must be >= 1");
  if (estimates.size() != yd.size()) {
    throw std::invalid_argument(fmt::format("verdict: {} estimates for {} trajectory axes", estimates.size(), yd.size()));
  }
  BoundCertificate cert;
  cert.source_name = source_name;
  cert.baseline_error = baseline_error;
  cert.margin = margin;
  double sq = 0.0;
  for (const AxisSignal& s : yd) {
    const auto it = std::find_if(estimates.begin(), estimates.end(),
                                 [&](const AxisEstimate& e) { return e.axis == s.axis; });
    if (it == estimates.end()) throw std::invalid_argument("verdict: no estimate for axis " + s.axis);
    if (std::count_if(yd.begin(), yd.end(), [&](const AxisSignal& o) { return o.axis == s.axis; }) != 1) {
      throw std::invalid_argument("verdict: duplicate trajectory axis " + s.axis);
    }
    AxisBound b{s.axis, it->e_star, lti::l2_norm(s.yd), 0.0};
    b.bound = tracking_error_bound(b.e_star, s.yd);
    sq += b.bound * b.bound;
    cert.per_axis.push_back(b);
  }
  cert.combined_bound = std::sqrt(sq);
  cert.verdict = margin * cert.combined_bound < baseline_error ? Verdict::Positive : Verdict::NotGuaranteed;
  return cert;
}

nlohmann::json to_json_value(const BoundCertificate& c) {
  nlohmann::json axes = nlohmann::json::array();
  for (const AxisBound& b : c.per_axis) {
    axes.push_back({{"axis", b.axis}, {"e_star", b.e_star}, {"yd_norm", b.yd_norm}, {"bound", b.bound}});
  }
  return {{"source", c.source_name},     {"per_axis", axes},
          {"combined_bound", c.combined_bound}, {"baseline_error", c.baseline_error},
          {"margin", c.margin},          {"verdict", to_string(c.verdict)}};
}

SampledSignal baseline_error(const TransferFunction& target, const SampledSignal& yd) {
  return lti::simulate(target, yd) - yd;
}

SampledSignal transfer_error(const TransferFunction& source, const TransferFunction& target,
                             const SampledSignal& yd) {
  return lti::simulate(lti::series(lti::invert(source), target), yd) - yd;
}

SampledSignal Sinusoid::sample(size_t count, double sample_period) const {
  return SampledSignal::generate(count, sample_period,
                                 [this](double t) { return amplitude * std::sin(omega * t + phase); });
}

SampledSignal inverse_reference(const TransferFunction& source, const Sinusoid& yd, size_t count,
                                double sample_period) {
  if (!lti::is_minimum_phase(source)) {
    throw std::invalid_argument("inverse_reference: source must be minimum phase: " + source.to_string());
  }
  const auto [quotient, remainder] = lti::divide(source.denominator(), source.numerator());
  const SampledSignal desired = yd.sample(count, sample_period);
  std::vector<double> out(count, 0.0);
  if (!lti::is_zero(remainder)) {
    const SampledSignal tail = lti::simulate(TransferFunction(remainder, source.numerator()), desired);
    out = tail.samples();
  }
  // Coefficient of s^k applied to the k-th derivative of the sinusoid.
  const size_t degree = quotient.size() - 1;
  for (size_t i = 0; i < quotient.size(); ++i) {
    const double q = quotient[i];
    if (q == 0.0) continue;
    const auto k = static_cast<double>(degree - i);
    const double gain = q * yd.amplitude * std::pow(yd.omega, k);
    const double shift = yd.phase + k * std::numbers::pi / 2.0;
    for (size_t n = 0; n < count; ++n) {
      out[n] += gain * std::sin(yd.omega * static_cast<double>(n) * sample_period + shift);
    }
  }
  return SampledSignal(std::move(out), sample_period);
}

TransferErrors first_order_transfer_error(double tau_source, double tau_target, const SampledSignal& yd) {
  if (!(tau_source > 0.0) || !(tau_target > 0.0) || !std::isfinite(tau_source) || !std::isfinite(tau_target)) {
    throw std::invalid_argument("first_order_transfer_error: time constants must be positive");
  }
  const TransferFunction source({1.0}, {tau_source, 1.0});
  const TransferFunction target({1.0}, {tau_target, 1.0});
  return {transfer_error(source, target, yd), baseline_error(target, yd)};
}

double chordal_distance(lti::Complex a, lti::Complex b) {
  return std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

AsymmetryReport nu_gap_report(const TransferFunction& g1, const TransferFunction& g2,
                              const std::vector<double>& grid) {
  for (const auto* g : {&g1, &g2}) {
    if (!lti::is_bibo_stable(*g) || !lti::is_minimum_phase(*g)) {
      throw std::invalid_argument("nu_gap_report: plants must be stable and minimum phase: " + g->to_string());
    }
  }
  AsymmetryReport r;
  r.omega_grid = grid;
  r.winding_condition_ok = true;
  for (double w : grid) {
    const lti::Complex a = lti::freq_response(g1, w);
    const lti::Complex b = lti::freq_response(g2, w);
    const double aggressiveness = chordal_distance(b, 0.0);
    if (!(aggressiveness > 0.0)) {
      throw std::domain_error(fmt::format("nu_gap_report: second plant vanishes at omega {}", w));
    }
    const double psi = chordal_distance(a, b);
    r.chordal.push_back(psi);
    r.asym_factor.push_back(std::sqrt(1.0 + std::norm(a)) / aggressiveness);
    r.error_mag.push_back(std::abs(a / b - 1.0));
    r.nu_gap = std::max(r.nu_gap, psi);
    // G2(-jw) = conj(G2(jw)) for real coefficients.
    if (!(std::abs(std::conj(b) * a) < 1.0)) r.winding_condition_ok = false;
  }
  return r;
}

nlohmann::json to_json_value(const AsymmetryReport& r) {
  return {{"omega", r.omega_grid},   {"psi", r.chordal},
          {"Psi", r.asym_factor},    {"error_mag", r.error_mag},
          {"nu_gap", r.nu_gap},      {"winding_condition_ok", r.winding_condition_ok}};
}

}  // namespace xferbound::analysis
