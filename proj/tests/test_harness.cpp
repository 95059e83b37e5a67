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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "xferbound/commands.hpp"
#include "xferbound/harness.hpp"

using namespace xferbound;
using namespace xferbound::harness;
using nlohmann::json;

namespace {

TransferFunction first_order(double tau) { return TransferFunction({1.0}, {tau, 1.0}); }

Catalog single_axis(double tau_target, std::vector<std::pair<std::string, double>> sources) {
  Catalog c;
  c.axes = {"x"};
  c.target = {"T", "", {{"x", first_order(tau_target)}}};
  for (const auto& [name, tau] : sources) c.sources.push_back({name, "", {{"x", first_order(tau)}}});
  return c;
}

json plant(std::vector<double> num, std::vector<double> den) { return {{"numerator", num}, {"denominator", den}}; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("xferbound_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default catalog is valid and round-trips") {
  const Catalog c = default_catalog();
  CHECK(c.sources.size() == 5);
  CHECK(c.axes == std::vector<std::string>{"x", "y", "z"});
  const json j = to_json_value(c);
  CHECK(catalog_issues(j).empty());
  const json once = to_json_value(catalog_from_json(j));
  CHECK(to_json_value(catalog_from_json(once)) == once);
  const Catalog back = catalog_from_json(once);
  for (size_t n = 0; n < c.sources.size(); ++n) {
    for (const auto& a : c.axes) {
      const auto& d0 = c.sources[n].axis(a).denominator();
      const auto& d1 = back.sources[n].axis(a).denominator();
      REQUIRE(d0.size() == d1.size());
      for (size_t k = 0; k < d0.size(); ++k) CHECK(d1[k] == doctest::Approx(d0[k]).epsilon(1e-14));
    }
  }
  for (const auto& p : compatibility(c)) CHECK(p.ok());
  CHECK(c.target.axis("x").denominator() == lti::Coeffs{1.0, 9.0, 20.0});
}

TEST_CASE("catalog validation lists every problem") {
  json j = {{"axes", {"x", "y"}},
            {"target", {{"name", "T"}, {"axes", {{"x", plant({1}, {1, 1})}, {"y", plant({1}, {1, -1})}}}}},
            {"sources",
             {{{"name", "A"}, {"axes", {{"x", plant({-1, 1}, {1, 1})}, {"y", plant({1, 0, 0}, {1, 1})}}}},
              {{"name", "T"}, {"axes", {{"x", plant({1}, {1, 1})}}}},
              {{"name", "B"}, {"axes", {{"x", plant({1}, {0})}, {"y", plant({1}, {1, 1})}, {"w", plant({1}, {1, 1})}}}}}}};
  const auto issues = catalog_issues(j);
  auto has = [&](const std::string& needle) {
    return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  };
  CHECK(has("target T axis y: not BIBO stable"));
  CHECK(has("source #1 A axis x: not minimum phase"));
  CHECK(has("source #1 A axis y: not proper"));
  CHECK(has("duplicate system name T"));
  CHECK(has("missing axis y"));
  CHECK(has("source #3 B axis x"));
  CHECK(has("unknown axis w"));
  CHECK(issues.size() >= 7);
  try {
    catalog_from_json(j);
    FAIL("expected CatalogError");
  } catch (const CatalogError& e) {
    CHECK(e.issues() == issues);
  }
  CHECK_FALSE(catalog_issues(json::array()).empty());
  CHECK_FALSE(catalog_issues(json{{"axes", json::array()}}).empty());
}

TEST_CASE("relative-degree incompatibility is reported before estimation") {
  Catalog c = single_axis(1.0, {{"ok", 0.5}});
  c.sources.push_back({"rd2", "", {{"x", TransferFunction({1.0}, {1.0, 2.0, 1.0})}}});
  const auto compat = compatibility(c);
  CHECK(compat[0].ok());
  CHECK_FALSE(compat[1].ok());
  CHECK_THROWS_AS(estimate(c, HarnessConfig{}, 0), CatalogError);
}

TEST_CASE("harness config") {
  HarnessConfig c;
  c.margin = 1.2;
  c.campaign.grid_points = 256;
  const auto back = harness_config_from_json(to_json_value(c));
  CHECK(to_json_value(back) == to_json_value(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c) != config_hash(HarnessConfig{}));
  CHECK_THROWS_AS(harness_config_from_json({{"bogus", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(harness_config_from_json({{"margin", 0.5}}), std::invalid_argument);
  CHECK(harness_config_from_json(json::object()).campaign.stop.max_iterations == 40);
}

TEST_CASE("trajectory suite") {
  const HarnessConfig cfg;
  const auto s = make_suite(50, 3, cfg);
  REQUIRE(s.trajectories.size() == 50);
  CHECK(suite_issues(s, cfg).empty());
  for (const auto& t : s.trajectories) {
    REQUIRE(t.waves.size() == 3);
    CHECK(t.waves[0].waveform == "sin");
    CHECK(t.waves[1].waveform == "cos");
    CHECK(t.waves[2].waveform == "sin");
    double slowest = 1e9;
    for (const auto& w : t.waves) {
      CHECK(w.omega > 0.05);
      CHECK(w.omega <= 2.0);
      CHECK(w.amplitude == 0.25);
      slowest = std::min(slowest, w.omega);
    }
    const double periods = t.duration * slowest / (2.0 * std::numbers::pi);
    CHECK(std::abs(periods - std::round(periods)) < 1e-9);
    CHECK(t.duration >= 30.0 - 1e-9);
    CHECK(t.duration < 30.0 + 2.0 * std::numbers::pi / slowest);
    CHECK(t.sample("y")[0] == 0.25);
  }
  CHECK(to_json_value(make_suite(5, 3, cfg)) == to_json_value(make_suite(5, 3, cfg)));
  CHECK(to_json_value(make_suite(5, 3, cfg)) != to_json_value(make_suite(5, 4, cfg)));
  CHECK(to_json_value(suite_from_json(to_json_value(s))) == to_json_value(s));

  auto bad = make_suite(1, 0, cfg);
  bad.trajectories[0].waves[0].omega = 3.0;
  bad.trajectories[0].duration += 1.0;
  CHECK(suite_issues(bad, cfg).size() == 2);
}

TEST_CASE("self-transfer catalog") {
  const Catalog c = self_transfer_catalog(default_catalog());
  const HarnessConfig cfg;
  const auto run = estimate(c, cfg, 11);
  CHECK(run.all_converged());
  for (const auto& a : run.axes) CHECK(a.estimates[0].e_star <= 0.05);
  const auto v = verify(c, estimate_table(run), make_suite(3, 11, cfg), cfg);
  CHECK(v.ok());
  for (const auto& r : v.rows) {
    CHECK(r.baseline_error > 0.0);
    CHECK(r.certificates[0].verdict == analysis::Verdict::Positive);
    CHECK(r.actual_error[0] < 1e-6);
  }
}

TEST_CASE("default catalog estimates and verification") {
  const Catalog c = default_catalog();
  const HarnessConfig cfg;
  const auto run = estimate(c, cfg, 2);
  CHECK(run.all_converged());
  for (const auto& a : run.axes) {
    for (const std::string agile : {"Rs1", "Rs2"}) {
      for (const std::string slow : {"Rs3", "Rs4", "Rs5"}) CHECK(run.e_star(a.axis, agile) < run.e_star(a.axis, slow));
    }
  }
  const std::string csv = estimates_csv(run);
  CHECK(csv.rfind("direction,E_star_Rs1,E_star_Rs2,E_star_Rs3,E_star_Rs4,E_star_Rs5,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\nx,") != std::string::npos);
  CHECK(csv.find("\nz,") != std::string::npos);
  CHECK(estimates_csv(estimate(c, cfg, 2)) == csv);

  const auto table = estimate_table_from_json(to_json_value(run));
  CHECK(table.e_star == estimate_table(run).e_star);

  const auto v = verify(c, table, make_suite(5, 2, cfg), cfg);
  CHECK(v.checks == 25);
  CHECK(v.bound_violations == 0);
  CHECK(v.verdict_violations == 0);
  for (const auto& r : v.rows) {
    for (size_t n = 0; n < 2; ++n) CHECK(r.certificates[n].verdict == analysis::Verdict::Positive);
    for (size_t n = 0; n < r.actual_error.size(); ++n) CHECK(r.actual_error[n] <= r.certificates[n].combined_bound);
  }
  const std::string vcsv = verification_csv(v);
  CHECK(vcsv.rfind("trajectory,e_Rs1,", 0) == 0);
  CHECK(vcsv.find(",e_baseline,verdict_Rs1,") != std::string::npos);

  SUBCASE("mismatched estimates") {
    auto partial = table;
    partial.e_star.erase({"y", "Rs3"});
    CHECK_THROWS_AS(verify(c, partial, make_suite(1, 2, cfg), cfg), std::invalid_argument);
    auto extra = table;
    extra.e_star[{"x", "Rs9"}] = 0.1;
    CHECK_THROWS_AS(verify(c, extra, make_suite(1, 2, cfg), cfg), std::invalid_argument);
  }
  SUBCASE("zero-amplitude trajectory") {
    auto flat_cfg = cfg;
    flat_cfg.trajectory_amplitude = 0.0;
    const auto z = verify(c, table, make_suite(1, 2, flat_cfg), flat_cfg);
    CHECK(z.rows[0].baseline_error == 0.0);
    for (size_t n = 0; n < 5; ++n) {
      CHECK(z.rows[0].actual_error[n] == 0.0);
      CHECK(z.rows[0].certificates[n].combined_bound == 0.0);
      CHECK(z.rows[0].certificates[n].verdict == analysis::Verdict::NotGuaranteed);
    }
  }
}

TEST_CASE("asymmetry") {
  const HarnessConfig cfg;
  SUBCASE("identical pair") {
    const Catalog c = single_axis(0.6, {{"S", 0.6}});
    const auto run = asymmetry(c, "T", "S", "x", {}, cfg);
    for (const auto& d : run.demos) {
      CHECK(d.composable);
      CHECK(d.transfer_error < 1e-6);
    }
    CHECK(run.report.nu_gap < 1e-15);
  }
  SUBCASE("first-order pair") {
    const Catalog c = single_axis(0.4, {{"Slow", 1.0}});
    const auto run = asymmetry(c, "T", "Slow", "x", {}, cfg);
    REQUIRE(run.demos.size() == 2);
    CHECK(run.demos[0].inverse_of == "Slow");
    CHECK(run.demos[0].ratio > 1.0);
    CHECK(run.demos[1].inverse_of == "T");
    CHECK(run.demos[1].ratio < 1.0);
    CHECK(run.demos[0].reference_gain > 1.0);
    for (size_t k = 0; k < run.report.omega_grid.size(); ++k) {
      CHECK(std::abs(run.report.chordal[k] - run.reversed_report.chordal[k]) < 1e-12);
    }
    const std::string csv = asymmetry_csv(run.report);
    CHECK(csv.rfind("omega,psi,Psi,error_mag\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1001);
  }
  SUBCASE("default catalog directions have opposite signs") {
    const auto run = asymmetry(default_catalog(), "Rt", "Rs5", "x", {}, cfg);
    CHECK(run.demos[0].ratio > 1.0);
    CHECK(run.demos[1].ratio < 1.0);
  }
  CHECK_THROWS_AS(asymmetry(default_catalog(), "Rt", "nope", "x", {}, cfg), std::out_of_range);
}

TEST_CASE("oracle") {
  const Catalog c = single_axis(1.0, {{"fast", 0.5}, {"self", 1.0}});
  const auto entries = oracle(c, 0.1, 10.0, 10000);
  CHECK(std::abs(entries[0].max_error - 5.0 / std::sqrt(101.0)) < 1e-3);
  CHECK(entries[1].max_error < 1e-15);
  const Catalog rev = single_axis(0.5, {{"slow", 1.0}});
  CHECK(std::abs(oracle(rev, 0.1, 10.0, 10000)[0].max_error - 10.0 / (2.0 * std::sqrt(26.0))) < 1e-3);
  CHECK(oracle_csv(entries, c).rfind("direction,E_max_fast,E_max_self,omega_fast,omega_self\nx,", 0) == 0);
}

TEST_CASE("commands write their outputs") {
  const auto dir = scratch_dir("commands");
  std::ostringstream out, err;
  CommandOptions o;
  o.out_dir = dir;
  o.seed = 4;
  REQUIRE(cmd_estimate(o, out, err) == kExitOk);
  for (const char* f : {"estimates.csv", "estimates.json", "transcript_x.csv", "probes_z.csv", "gp_y.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(cmd_verify(o, dir / "estimates.json", {}, 5, out, err) == kExitOk);
  CHECK(std::filesystem::exists(dir / "verification.csv"));
  CHECK(std::filesystem::exists(dir / "suite.json"));
  CHECK(cmd_verify(o, dir / "estimates.json", dir / "suite.json", 5, out, err) == kExitOk);
  CHECK(cmd_asymmetry(o, "Rt", "Rs5", "x", {}, out, err) == kExitOk);
  CHECK(std::filesystem::exists(dir / "asymmetry_curves.csv"));
  CHECK(cmd_oracle(o, out, err) == kExitOk);
  CHECK(std::filesystem::exists(dir / "oracle.csv"));
  CHECK(cmd_default_catalog(o, false, out, err) == kExitOk);
  CHECK(catalog_issues(read_json(dir / "default_catalog.json")).empty());
  CHECK(cmd_make_suite(o, 3, out, err) == kExitOk);

  const std::string first = slurp(dir / "transcript_x.csv");
  CHECK(first.find("," + std::to_string(axis_seed(4, 0)) + "," + config_hash(HarnessConfig{}) + "\n") != std::string::npos);
  REQUIRE(cmd_estimate(o, out, err) == kExitOk);
  CHECK(slurp(dir / "transcript_x.csv") == first);
}

TEST_CASE("commands reject bad input") {
  const auto dir = scratch_dir("bad");
  write_text(dir / "catalog.json", R"({"axes": ["x"], "target": {"name": "T", "axes": {"x": {"numerator": [1], "denominator": [1, -1]}}}, "sources": []})");
  std::ostringstream out, err;
  CommandOptions o;
  o.out_dir = dir;
  o.catalog = dir / "catalog.json";
  CHECK(cmd_estimate(o, out, err) == kExitBadInput);
  CHECK(err.str().find("not BIBO stable") != std::string::npos);
  CHECK(err.str().find("sources must be a non-empty array") != std::string::npos);
  o.catalog.clear();
  o.max_iters = 1;
  CHECK(cmd_estimate(o, out, err) == kExitViolation);
  CHECK(cmd_verify(o, dir / "missing.json", {}, 5, out, err) == kExitBadInput);
}

TEST_CASE("shipped data files match the built-in defaults") {
  const std::filesystem::path data = XFERBOUND_DATA_DIR;
  CHECK(read_json(data / "default_catalog.json") == to_json_value(default_catalog()));
  CHECK(read_json(data / "default_config.json") == to_json_value(HarnessConfig{}));
  CHECK(config_hash(load_config(data / "default_config.json")) == config_hash(HarnessConfig{}));
}
