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
#include "xferbound/probe.hpp"

using namespace xferbound;
using namespace xferbound::probe;
using lti::TransferFunction;

namespace {

TransferFunction first_order(double tau) { return TransferFunction({1.0}, {tau, 1.0}); }

ProbeConfig window(double lo, double hi) {
  ProbeConfig cfg;
  cfg.omega_min = lo;
  cfg.omega_max = hi;
  return cfg;
}

FrequencyPoint analytic(const TransferFunction& g, double w) {
  return FrequencyPoint(w, lti::freq_response(g, w));
}

}  // namespace

TEST_CASE("ProbeConfig validation") {
  CHECK_NOTHROW(ProbeConfig{}.validate());
  auto bad = ProbeConfig{};
  bad.omega_min = 3.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ProbeConfig{};
  bad.settle_periods = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ProbeConfig{};
  bad.measure_periods = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ProbeConfig{};
  bad.amplitude = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("probe_system") {
  const auto cfg = window(0.1, 10.0);
  SUBCASE("identity plant") {
    for (double w : {0.1, 1.0, 7.3}) {
      const auto p = probe_system(TransferFunction::gain(1.0), w, cfg);
      CHECK(std::abs(p.response() - lti::Complex(1.0, 0.0)) < 1e-9);
    }
  }
  SUBCASE("first-order tau = 1 at omega = 1") {
    const auto p = probe_system(first_order(1.0), 1.0, cfg);
    CHECK(std::abs(p.magnitude() / (1.0 / std::sqrt(2.0)) - 1.0) < 0.01);
    CHECK(std::abs(p.phase() + std::numbers::pi / 4) < 0.01);
  }
  SUBCASE("first-order tau = 0.5 at omega = 2") {
    const auto p = probe_system(first_order(0.5), 2.0, cfg);
    CHECK(std::abs(p.magnitude() / (1.0 / std::sqrt(2.0)) - 1.0) < 0.01);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(probe_system(TransferFunction({1}, {1, -1}), 1.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(probe_system(first_order(1.0), 20.0, cfg), std::invalid_argument);
    auto coarse = cfg;
    coarse.sample_period = 0.2;
    CHECK_THROWS_AS(probe_system(first_order(1.0), 10.0, coarse), std::invalid_argument);
  }
}

TEST_CASE("probe agrees with the analytic response") {
  std::mt19937_64 rng(21);
  const auto cfg = window(0.05, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = testing::random_stable_tf(rng);
    const double w = std::pow(10.0, testing::uniform(rng, std::log10(0.05), 1.0));
    const auto want = lti::freq_response(g, w);
    const auto got = probe_system(g, w, cfg).response();
    CHECK(std::abs(got - want) < 0.02 * std::abs(want));
  }
}

TEST_CASE("probe noise is seed-controlled") {
  auto cfg = window(0.1, 10.0);
  cfg.noise_stddev = 0.01;
  const auto a = probe_system(first_order(1.0), 1.0, cfg, 7);
  const auto b = probe_system(first_order(1.0), 1.0, cfg, 7);
  const auto c = probe_system(first_order(1.0), 1.0, cfg, 8);
  CHECK(a.response() == b.response());
  CHECK(a.response() != c.response());
  CHECK(std::abs(a.magnitude() - 1.0 / std::sqrt(2.0)) < 0.05);
}

TEST_CASE("estimate_inverse_response") {
  const auto one = estimate_inverse_response(FrequencyPoint(1.0, {1.0, 0.0}));
  CHECK(std::abs(one.response() - lti::Complex(1.0, 0.0)) < 1e-15);

  const auto half = estimate_inverse_response(FrequencyPoint::polar(2.0, 0.5, -std::numbers::pi / 4));
  CHECK(half.magnitude() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(half.phase() == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(half.omega() == 2.0);

  const auto probed = probe_system(first_order(1.0), 1.0, window(0.1, 10.0));
  const auto inv = estimate_inverse_response(probed).response();
  const auto want = std::polar(std::sqrt(2.0), std::numbers::pi / 4);
  CHECK(std::abs(inv - want) < 0.01 * std::abs(want));

  CHECK_THROWS_AS(estimate_inverse_response(FrequencyPoint(1.0, {0.0, 0.0})), std::domain_error);
}

TEST_CASE("estimate_inverse_response is an involution") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const FrequencyPoint p = FrequencyPoint::polar(testing::uniform(rng, 0.01, 100.0),
                                                   testing::uniform(rng, 1e-3, 1e3),
                                                   testing::uniform(rng, -3.1, 3.1));
    const auto pp = estimate_inverse_response(estimate_inverse_response(p));
    CHECK(std::abs(pp.response() - p.response()) < 1e-12 * std::max(1.0, p.magnitude()));
  }
}

TEST_CASE("evaluate_objective") {
  const FrequencyPoint self(3.0, std::polar(0.4, -1.1));
  CHECK(evaluate_objective(std::vector{self}, self)[0] < 1e-15);

  // Dense-route oracle: |E(jw)| from the composed error transfer function.
  const auto fast = first_order(0.5);
  const auto slow = first_order(1.0);
  const double f_fast_source =
      evaluate_objective(std::vector{analytic(fast, 2.0)}, analytic(slow, 2.0))[0];
  CHECK(f_fast_source == doctest::Approx(std::abs(lti::freq_response(lti::error_tf(fast, slow), 2.0))));
  CHECK(std::abs(f_fast_source - 1.0 / std::sqrt(5.0)) < 1e-12);

  const double f_slow_source =
      evaluate_objective(std::vector{analytic(slow, 2.0)}, analytic(fast, 2.0))[0];
  CHECK(std::abs(f_slow_source - 1.0 / std::sqrt(2.0)) < 1e-12);

  CHECK_THROWS_AS(evaluate_objective(std::vector{analytic(slow, 2.0)}, analytic(fast, 2.5)),
                  std::invalid_argument);
}

TEST_CASE("analytic objective matches the symbolic error transfer function") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = testing::random_stable_tf(rng, 1);
    const auto t = testing::random_stable_tf(rng, 2);
    const auto e = lti::error_tf(s, t);
    for (double w : lti::logspace(0.05, 10.0, 25)) {
      const double f = evaluate_objective(std::vector{analytic(s, w)}, analytic(t, w))[0];
      CHECK(std::abs(f - std::abs(lti::freq_response(e, w))) < 1e-9);
    }
  }
}

TEST_CASE("probe CSV rows") {
  CHECK(probe_csv_header() == "omega,source_name,M,theta,objective_value");
  const auto row = probe_csv_row(FrequencyPoint::polar(1.5, 0.5, -0.25), "Rs1", 0.125);
  CHECK(row == "1.5,Rs1,0.5,-0.25,0.125");
  CHECK(probe_csv_row(FrequencyPoint(1.5, {1.0, 0.0}), "Rt", std::nullopt) == "1.5,Rt,1,0,");
}
