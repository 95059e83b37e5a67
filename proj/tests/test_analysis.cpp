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


#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "xferbound/transfer_analysis.hpp"

using namespace xferbound;
using namespace xferbound::analysis;
using xferbound::testing::uniform;

namespace {

constexpr double kDt = 1e-3;

SampledSignal sinusoid(double amplitude, double omega, double duration, double phase = 0.0) {
  return SampledSignal::generate(static_cast<size_t>(std::llround(duration / kDt)), kDt,
                                 [&](double t) { return amplitude * std::sin(omega * t + phase); });
}

TransferFunction first_order(double tau) { return TransferFunction({1.0}, {tau, 1.0}); }

SampledSignal random_trajectory(std::mt19937_64& rng) {
  const double w1 = uniform(rng, 0.05, 2.0), w2 = uniform(rng, 0.05, 2.0), p = uniform(rng, 0.0, 6.3);
  return SampledSignal::generate(20000, kDt, [&](double t) {
    return 0.25 * std::sin(w1 * t + p) + 0.1 * std::cos(w2 * t);
  });
}

}  // namespace

TEST_CASE("tracking_error_bound") {
  const auto yd = sinusoid(0.25, 1.0, 40.0 * std::numbers::pi);
  CHECK(tracking_error_bound(0.0, yd) == 0.0);
  const double want = 0.5 * 0.25 * std::sqrt(20.0 * std::numbers::pi);
  CHECK(std::abs(tracking_error_bound(0.5, yd) - want) < 1e-3 * want);
  const auto unit = SampledSignal(std::vector<double>(1000, 1.0), kDt);
  CHECK(tracking_error_bound(0.22, unit) == doctest::Approx(0.22).epsilon(1e-12));
  CHECK_THROWS_AS(tracking_error_bound(-0.1, unit), std::invalid_argument);
}

TEST_CASE("verdict") {
  const auto unit = SampledSignal(std::vector<double>(1000, 1.0), kDt);
  SUBCASE("zero estimates are positive against a nonzero baseline") {
    const auto c = verdict("s", {{"x", 0.0}}, {{"x", unit}}, 0.1);
    CHECK(c.verdict == Verdict::Positive);
    CHECK(c.combined_bound == 0.0);
  }
  SUBCASE("equality is not a guarantee") {
    const auto c = verdict("s", {{"x", 0.3}}, {{"x", unit}}, 0.3);
    CHECK(c.per_axis[0].bound == doctest::Approx(0.3).epsilon(1e-14));
    const auto exact = verdict("s", {{"x", 0.3}}, {{"x", unit}}, c.combined_bound);
    CHECK(exact.verdict == Verdict::NotGuaranteed);
  }
  SUBCASE("root-sum-square across axes") {
    const auto c = verdict("s", {{"z", 0.0}, {"x", 0.3}, {"y", 0.4}}, {{"x", unit}, {"y", unit}, {"z", unit}}, 0.6);
    REQUIRE(c.per_axis.size() == 3);
    CHECK(c.per_axis[0].axis == "x");
    CHECK(c.per_axis[2].bound == 0.0);
    CHECK(c.combined_bound == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.verdict == Verdict::Positive);
    for (const auto& b : c.per_axis) CHECK(b.bound == b.e_star * b.yd_norm);
  }
  SUBCASE("margin") {
    const auto c = verdict("s", {{"x", 0.3}}, {{"x", unit}}, 0.5, 2.0);
    CHECK(c.verdict == Verdict::NotGuaranteed);
    CHECK_THROWS_AS(verdict("s", {{"x", 0.3}}, {{"x", unit}}, 0.5, 0.5), std::invalid_argument);
  }
  SUBCASE("axis mismatch") {
    CHECK_THROWS_AS(verdict("s", {{"x", 0.1}}, {{"y", unit}}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(verdict("s", {{"x", 0.1}, {"y", 0.1}}, {{"x", unit}}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(verdict("s", {{"x", 0.1}, {"y", 0.1}}, {{"x", unit}, {"x", unit}}, 0.5), std::invalid_argument);
  }
  SUBCASE("zero trajectory") {
    const auto zero = SampledSignal(std::vector<double>(1000, 0.0), kDt);
    const auto c = verdict("s", {{"x", 0.4}}, {{"x", zero}}, 0.0);
    CHECK(c.combined_bound == 0.0);
    CHECK(c.verdict == Verdict::NotGuaranteed);
  }
  const auto j = to_json_value(verdict("s", {{"x", 0.1}}, {{"x", unit}}, 0.5));
  CHECK(j.at("verdict") == "Positive");
  CHECK(j.at("per_axis").size() == 1);
}

TEST_CASE("first_order_transfer_error") {
  const auto yd = sinusoid(0.25, 1.0, 40.0 * std::numbers::pi);
  SUBCASE("identical time constants") {
    const auto e = first_order_transfer_error(0.7, 0.7, yd);
    for (double v : e.e_transfer.samples()) CHECK(std::abs(v) < 1e-6);
  }
  SUBCASE("agile source on a slow target") {
    const auto e = first_order_transfer_error(0.5, 1.0, yd);
    CHECK(std::abs(lti::l2_norm(e.e_transfer) / lti::l2_norm(e.e_baseline) - 0.5) < 0.005);
  }
  SUBCASE("slow source on an agile target sits on the boundary") {
    const auto e = first_order_transfer_error(1.0, 0.5, yd);
    CHECK(std::abs(lti::l2_norm(e.e_transfer) / lti::l2_norm(e.e_baseline) - 1.0) < 0.02);
  }
  CHECK_THROWS_AS(first_order_transfer_error(0.0, 1.0, yd), std::invalid_argument);
  CHECK_THROWS_AS(first_order_transfer_error(1.0, -1.0, yd), std::invalid_argument);
}

TEST_CASE("first-order transfer error is a scaled baseline error") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 20; ++i) {
    const double t1 = uniform(rng, 0.2, 2.0), t2 = uniform(rng, 0.2, 2.0);
    const auto yd = random_trajectory(rng);
    const auto e = first_order_transfer_error(t2, t1, yd);
    const double factor = 1.0 - t2 / t1;
    double worst = 0.0, scale = 0.0;
    for (size_t k = 0; k < yd.size(); ++k) {
      worst = std::max(worst, std::abs(e.e_transfer[k] - factor * e.e_baseline[k]));
      scale = std::max(scale, std::abs(e.e_baseline[k]));
    }
    CHECK(worst < 1e-9 * std::max(1.0, scale));
    CHECK(std::abs(lti::l2_norm(e.e_transfer) / lti::l2_norm(e.e_baseline) - std::abs(factor)) <
          0.01 * std::max(std::abs(factor), 1e-3));
  }
}

TEST_CASE("first-order positive transfer follows the factor-of-two rule") {
  const auto yd = sinusoid(0.25, 1.3, 30.0);
  int mismatches_off_boundary = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double tt = 0.2 * (i + 1), ts = 0.2 * (j + 1);
      const auto e = first_order_transfer_error(ts, tt, yd);
      const bool positive = lti::l2_norm(e.e_transfer) < lti::l2_norm(e.e_baseline);
      const bool rule = ts < 2.0 * tt;
      const bool near = std::abs(ts - 2.0 * tt) <= 0.2 + 1e-12;
      if (positive != rule && !near) ++mismatches_off_boundary;
    }
  }
  CHECK(mismatches_off_boundary == 0);
}

TEST_CASE("simulated transfer error matches the error transfer function route") {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 10; ++i) {
    const auto t = testing::random_stable_tf(rng, 2);
    const auto s = testing::random_stable_tf(rng, static_cast<int>(i % 3));
    const auto yd = random_trajectory(rng);
    const auto a = transfer_error(s, t, yd);
    const auto b = lti::simulate(lti::error_tf(s, t), yd);
    double worst = 0.0;
    for (size_t k = 0; k < yd.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("inverse_reference") {
  const Sinusoid yd{0.25, 1.0, 0.0};
  const size_t n = 125664;
  const auto ref = inverse_reference(first_order(1.0), yd, n, kDt);
  // (s + 1) applied to 0.25 sin t is 0.25 (sin t + cos t).
  for (size_t k = 0; k < n; k += 997) {
    const double t = static_cast<double>(k) * kDt;
    CHECK(std::abs(ref[k] - 0.25 * (std::sin(t) + std::cos(t))) < 1e-12);
  }
  CHECK(lti::l2_norm(ref) > lti::l2_norm(yd.sample(n, kDt)));
  CHECK(lti::l2_norm(ref) / lti::l2_norm(yd.sample(n, kDt)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  // A proper remainder: (0.5 s + 1)/(0.1 s + 1) inverse is simulated after
  // the constant quotient; steady state must match |G^-1(j)|.
  const TransferFunction lead({0.1, 1.0}, {0.5, 1.0});
  const auto r2 = inverse_reference(lead, yd, n, kDt);
  const double tail = lti::l2_norm(SampledSignal(std::vector<double>(r2.samples().end() - 62832, r2.samples().end()), kDt));
  const double want = std::abs(lti::freq_response(lti::invert(lead), 1.0)) * 0.25 * std::sqrt(31.416);
  CHECK(tail == doctest::Approx(want).epsilon(2e-3));
  CHECK_THROWS_AS(inverse_reference(TransferFunction({-1, 1}, {1, 1}), yd, 10, kDt), std::invalid_argument);
}

TEST_CASE("chordal_distance") {
  CHECK(chordal_distance({0.3, -0.2}, {0.3, -0.2}) == 0.0);
  CHECK(chordal_distance({1.0, 0.0}, {0.0, 0.0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
  std::mt19937_64 rng(53);
  for (int i = 0; i < 1000; ++i) {
    const lti::Complex a(uniform(rng, -5, 5), uniform(rng, -5, 5)), b(uniform(rng, -5, 5), uniform(rng, -5, 5));
    CHECK(std::abs(chordal_distance(a, b) - chordal_distance(b, a)) < 1e-12);
    CHECK(chordal_distance(a, b) <= 1.0);
  }
}

TEST_CASE("nu_gap_report") {
  const auto grid = lti::logspace(0.05, 2.0, 200);
  SUBCASE("self") {
    const auto r = nu_gap_report(first_order(1.0), first_order(1.0), grid);
    CHECK(r.nu_gap == 0.0);
    for (size_t k = 0; k < grid.size(); ++k) {
      CHECK(r.chordal[k] == 0.0);
      CHECK(r.error_mag[k] < 1e-15);
    }
    CHECK(r.winding_condition_ok);
  }
  SUBCASE("identity against the error transfer function") {
    const auto g1 = first_order(1.0), g2 = first_order(0.5);
    const auto r = nu_gap_report(g1, g2, grid);
    const auto e = lti::error_tf(g2, g1);
    for (size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(r.chordal[k] * r.asym_factor[k] - std::abs(lti::freq_response(e, grid[k]))) < 1e-9);
    }
  }
  SUBCASE("swap") {
    const auto a = nu_gap_report(first_order(1.0), first_order(0.4), grid);
    const auto b = nu_gap_report(first_order(0.4), first_order(1.0), grid);
    bool differs = false;
    for (size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(a.chordal[k] - b.chordal[k]) < 1e-12);
      differs = differs || std::abs(a.asym_factor[k] - b.asym_factor[k]) > 1e-6;
    }
    CHECK(differs);
    CHECK(a.nu_gap == doctest::Approx(b.nu_gap));
  }
  SUBCASE("winding condition") {
    const TransferFunction big({2.0}, {1.0, 1.0});
    CHECK_FALSE(nu_gap_report(big, big, grid).winding_condition_ok);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(nu_gap_report(TransferFunction({1}, {1, -1}), first_order(1.0), grid), std::invalid_argument);
    CHECK_THROWS_AS(nu_gap_report(first_order(1.0), TransferFunction({-1, 1}, {1, 1}), grid), std::invalid_argument);
  }
  const auto j = to_json_value(nu_gap_report(first_order(1.0), first_order(0.4), grid));
  CHECK(j.at("psi").size() == grid.size());
}

TEST_CASE("decomposition identity on random minimum-phase pairs") {
  std::mt19937_64 rng(54);
  const auto grid = lti::logspace(1e-2, 1e2, 1000);
  for (int i = 0; i < 10; ++i) {
    const auto g1 = testing::random_stable_tf(rng);
    const auto g2 = testing::random_stable_tf(rng);
    const auto r = nu_gap_report(g1, g2, grid);
    const auto swapped = nu_gap_report(g2, g1, grid);
    CHECK(r.nu_gap >= 0.0);
    CHECK(r.nu_gap <= 1.0);
    for (size_t k = 0; k < grid.size(); ++k) {
      const double direct = std::abs(lti::freq_response(g1, grid[k]) / lti::freq_response(g2, grid[k]) - 1.0);
      CHECK(std::abs(r.chordal[k] * r.asym_factor[k] - direct) < 1e-9 * std::max(1.0, direct));
      CHECK(std::abs(r.chordal[k] - swapped.chordal[k]) < 1e-12);
    }
  }
}
