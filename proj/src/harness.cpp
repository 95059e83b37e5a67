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


#include "xferbound/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "xferbound/polynomial.hpp"

namespace xferbound::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) { return fmt::format("{:.12g}", v); }

lti::Coeffs lag(double tau) { return {tau, 1.0}; }

lti::Coeffs product(std::initializer_list<lti::Coeffs> factors) {
  lti::Coeffs p{1.0};
  for (const auto& f : factors) p = lti::multiply(p, f);
  return p;
}

System make_system(std::string name, std::string description,
                   std::initializer_list<std::pair<lti::Coeffs, lti::Coeffs>> xyz) {
  System s{std::move(name), std::move(description), {}};
  const char* axes[] = {"x", "y", "z"};
  size_t i = 0;
  for (const auto& [n, d] : xyz) s.axes.emplace_back(axes[i++], TransferFunction(n, d));
  return s;
}

// Checks one plant entry and returns it if usable.
std::optional<TransferFunction> check_plant(const json& entry, const std::string& where,
                                            std::vector<std::string>& issues) {
  if (!entry.is_object() || !entry.contains("numerator") || !entry.contains("denominator")) {
    issues.push_back(where + ": needs numerator and denominator arrays");
    return std::nullopt;
  }
  lti::Coeffs coeffs[2];
  const char* keys[] = {"numerator", "denominator"};
  for (int k = 0; k < 2; ++k) {
    const json& arr = entry.at(keys[k]);
    if (!arr.is_array() || arr.empty()) {
      issues.push_back(fmt::format("{}: {} must be a non-empty array", where, keys[k]));
      return std::nullopt;
    }
    for (const json& c : arr) {
      if (!c.is_number()) {
        issues.push_back(fmt::format("{}: {} has a non-numeric coefficient", where, keys[k]));
        return std::nullopt;
      }
      coeffs[k].push_back(c.get<double>());
    }
  }
  try {
    TransferFunction g(coeffs[0], coeffs[1]);
    bool ok = true;
    if (!g.is_proper()) {
      issues.push_back(fmt::format("{}: not proper: {}", where, g.to_string()));
      ok = false;
    }
    if (!lti::is_bibo_stable(g)) {
      issues.push_back(fmt::format("{}: not BIBO stable: {}", where, g.to_string()));
      ok = false;
    }
    if (g.is_zero() || !lti::is_minimum_phase(g)) {
      issues.push_back(fmt::format("{}: not minimum phase: {}", where, g.to_string()));
      ok = false;
    }
    if (ok) return g;
  } catch (const std::exception& e) {
    issues.push_back(fmt::format("{}: {}", where, e.what()));
  }
  return std::nullopt;
}

void check_system(const json& j, const std::string& role, const std::vector<std::string>& axes,
                  std::set<std::string>& names, std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back(role + ": must be an object");
    return;
  }
  std::string name;
  if (!j.contains("name") || !j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
    issues.push_back(role + ": missing name");
  } else {
    name = j.at("name").get<std::string>();
    if (!names.insert(name).second) issues.push_back(role + ": duplicate system name " + name);
    if (name.find_first_of(",\"\n") != std::string::npos) issues.push_back(role + ": name must not contain , \" or newline");
  }
  const std::string where = name.empty() ? role : role + " " + name;
  if (!j.contains("axes") || !j.at("axes").is_object()) {
    issues.push_back(where + ": axes must be an object keyed by axis name");
    return;
  }
  const json& ax = j.at("axes");
  for (const auto& a : axes) {
    if (!ax.contains(a)) {
      issues.push_back(fmt::format("{}: missing axis {}", where, a));
    } else {
      check_plant(ax.at(a), fmt::format("{} axis {}", where, a), issues);
    }
  }
  for (const auto& [key, value] : ax.items()) {
    if (std::find(axes.begin(), axes.end(), key) == axes.end()) {
      issues.push_back(fmt::format("{}: unknown axis {}", where, key));
    }
  }
}

System parse_system(const json& j, const std::vector<std::string>& axes) {
  System s;
  s.name = j.at("name").get<std::string>();
  s.description = j.value("description", "");
  for (const auto& a : axes) {
    const json& e = j.at("axes").at(a);
    s.axes.emplace_back(a, TransferFunction(e.at("numerator").get<lti::Coeffs>(),
                                            e.at("denominator").get<lti::Coeffs>()));
  }
  return s;
}

json system_json(const System& s) {
  json axes = json::object();
  for (const auto& [a, g] : s.axes) axes[a] = {{"numerator", g.numerator()}, {"denominator", g.denominator()}};
  return {{"name", s.name}, {"description", s.description}, {"axes", axes}};
}

std::vector<bo::NamedPlant> plants_for(const std::vector<System>& systems, const std::string& axis) {
  std::vector<bo::NamedPlant> out;
  for (const auto& s : systems) out.push_back({s.name, s.axis(axis)});
  return out;
}

}  // namespace

const TransferFunction& System::axis(const std::string& a) const {
  for (const auto& [name, g] : axes) {
    if (name == a) return g;
  }
  throw std::out_of_range("system " + this->name + " has no axis " + a);
}

const System& Catalog::system(const std::string& name) const {
  if (target.name == name) return target;
  for (const auto& s : sources) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("catalog has no system named " + name);
}

CatalogError::CatalogError(std::vector<std::string> issues)
    : std::invalid_argument([&] {
        std::string msg = fmt::format("catalog invalid ({} issue{})", issues.size(), issues.size() == 1 ? "" : "s");
        for (const auto& i : issues) msg += "\n  " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::vector<std::string> catalog_issues(const json& j) {
  std::vector<std::string> issues;
  if (!j.is_object()) return {"catalog: top level must be an object"};
  std::vector<std::string> axes;
  if (!j.contains("axes") || !j.at("axes").is_array() || j.at("axes").empty()) {
    issues.push_back("catalog: axes must be a non-empty array of names");
  } else {
    std::set<std::string> seen;
    for (const json& a : j.at("axes")) {
      if (!a.is_string() || a.get<std::string>().empty()) {
        issues.push_back("catalog: axis names must be non-empty strings");
        continue;
      }
      if (!seen.insert(a.get<std::string>()).second) issues.push_back("catalog: duplicate axis " + a.get<std::string>());
      axes.push_back(a.get<std::string>());
    }
  }
  if (j.contains("description") && !j.at("description").is_string()) {
    issues.push_back("catalog: description must be a string");
  }
  std::set<std::string> names;
  if (!j.contains("target")) {
    issues.push_back("catalog: missing target");
  } else {
    check_system(j.at("target"), "target", axes, names, issues);
  }
  if (!j.contains("sources") || !j.at("sources").is_array() || j.at("sources").empty()) {
    issues.push_back("catalog: sources must be a non-empty array");
  } else {
    for (size_t i = 0; i < j.at("sources").size(); ++i) {
      check_system(j.at("sources")[i], fmt::format("source #{}", i + 1), axes, names, issues);
    }
  }
  return issues;
}

Catalog catalog_from_json(const json& j) {
  auto issues = catalog_issues(j);
  if (!issues.empty()) throw CatalogError(std::move(issues));
  Catalog c;
  c.description = j.value("description", "");
  c.axes = j.at("axes").get<std::vector<std::string>>();
  c.target = parse_system(j.at("target"), c.axes);
  for (const json& s : j.at("sources")) c.sources.push_back(parse_system(s, c.axes));
  return c;
}

json to_json_value(const Catalog& c) {
  json sources = json::array();
  for (const auto& s : c.sources) sources.push_back(system_json(s));
  return {{"description", c.description}, {"axes", c.axes}, {"target", system_json(c.target)}, {"sources", sources}};
}

Catalog load_catalog(const fs::path& path) { return catalog_from_json(read_json(path)); }

std::vector<Compatibility> compatibility(const Catalog& c) {
  std::vector<Compatibility> out;
  for (const auto& s : c.sources) {
    for (const auto& a : c.axes) {
      out.push_back({s.name, a, lti::relative_degree(c.target.axis(a)), lti::relative_degree(s.axis(a))});
    }
  }
  return out;
}

Catalog default_catalog() {
  Catalog c;
  c.description =
      "Desk-scale fleet: target Rt, agile sources Rs1 and Rs2 within 15% of Rt, slow damped sources Rs3 and "
      "Rs5 with a lead-compensated lag standing in for transport delay, and Rs4 as the delay-free model of Rs3.";
  c.axes = {"x", "y", "z"};
  c.target = make_system("Rt", "target",
                         {{{1.0}, product({lag(0.25), lag(0.2)})},
                          {{1.0}, product({lag(0.26), lag(0.2)})},
                          {{1.0}, product({lag(0.15), lag(0.1)})}});
  c.sources.push_back(make_system("Rs1", "agile, slightly faster than the target",
                                  {{{1.0}, product({lag(0.24), lag(0.2)})},
                                   {{1.0}, product({lag(0.25), lag(0.2)})},
                                   {{1.0}, product({lag(0.145), lag(0.1)})}}));
  c.sources.push_back(make_system("Rs2", "agile, slightly slower than the target",
                                  {{{1.0}, product({lag(0.27), lag(0.19)})},
                                   {{1.0}, product({lag(0.28), lag(0.19)})},
                                   {{1.0}, product({lag(0.16), lag(0.1)})}}));
  c.sources.push_back(make_system("Rs3", "slow and damped, with delay lag",
                                  {{lag(0.1), product({lag(1.0), lag(0.8), lag(0.3)})},
                                   {lag(0.1), product({lag(1.1), lag(0.8), lag(0.3)})},
                                   {lag(0.05), product({lag(0.45), lag(0.3), lag(0.15)})}}));
  c.sources.push_back(make_system("Rs4", "slow and damped, delay-free model of Rs3",
                                  {{{1.0}, product({lag(1.0), lag(0.8)})},
                                   {{1.0}, product({lag(1.1), lag(0.8)})},
                                   {{1.0}, product({lag(0.45), lag(0.3)})}}));
  c.sources.push_back(make_system("Rs5", "slowest, with delay lag",
                                  {{lag(0.1), product({lag(1.1), lag(0.7), lag(0.35)})},
                                   {lag(0.1), product({lag(1.2), lag(0.7), lag(0.35)})},
                                   {lag(0.05), product({lag(0.5), lag(0.3), lag(0.12)})}}));
  return c;
}

Catalog self_transfer_catalog(const Catalog& c) {
  Catalog out;
  out.description = "target " + c.target.name + " duplicated as its only source";
  out.axes = c.axes;
  out.target = c.target;
  System copy = c.target;
  copy.name = c.target.name + "_copy";
  copy.description = "copy of the target";
  out.sources.push_back(std::move(copy));
  return out;
}

void HarnessConfig::validate() const {
  campaign.validate();
  if (!(margin >= 1.0)) throw std::invalid_argument("config: margin must be >= 1");
  if (oracle_grid_size < 2) throw std::invalid_argument("config: oracle_grid_size must be >= 2");
  if (!(trajectory_min_duration > 0.0)) throw std::invalid_argument("config: trajectory min_duration must be > 0");
  if (!(trajectory_sample_period > 0.0)) throw std::invalid_argument("config: trajectory sample_period must be > 0");
  if (!(trajectory_amplitude >= 0.0)) throw std::invalid_argument("config: trajectory amplitude must be >= 0");
}

json to_json_value(const HarnessConfig& c) {
  return {{"campaign", bo::to_json_value(c.campaign)},
          {"margin", c.margin},
          {"oracle_grid_size", c.oracle_grid_size},
          {"trajectory",
           {{"min_duration", c.trajectory_min_duration},
            {"sample_period", c.trajectory_sample_period},
            {"amplitude", c.trajectory_amplitude}}}};
}

HarnessConfig harness_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known{"campaign", "margin", "oracle_grid_size", "trajectory"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown key " + key);
  }
  HarnessConfig c;
  if (j.contains("campaign")) c.campaign = bo::campaign_config_from_json(j.at("campaign"));
  c.margin = j.value("margin", c.margin);
  c.oracle_grid_size = j.value("oracle_grid_size", c.oracle_grid_size);
  if (j.contains("trajectory")) {
    const json& t = j.at("trajectory");
    c.trajectory_min_duration = t.value("min_duration", c.trajectory_min_duration);
    c.trajectory_sample_period = t.value("sample_period", c.trajectory_sample_period);
    c.trajectory_amplitude = t.value("amplitude", c.trajectory_amplitude);
  }
  c.validate();
  return c;
}

HarnessConfig load_config(const fs::path& path) {
  if (path.empty()) return {};
  return harness_config_from_json(read_json(path));
}

std::string config_hash(const HarnessConfig& c) { return bo::config_hash(to_json_value(c)); }

double trajectory_duration(double slowest_omega, double min_duration) {
  const double period = kTwoPi / slowest_omega;
  const double periods = std::max(1.0, std::ceil(min_duration / period - 1e-9));
  return periods * period;
}

SampledSignal Trajectory::sample(const std::string& axis) const {
  for (const auto& w : waves) {
    if (w.axis != axis) continue;
    const auto count = static_cast<size_t>(std::llround(duration / sample_period));
    const bool use_sin = w.waveform == "sin";
    return SampledSignal::generate(count, sample_period, [&](double t) {
      return w.amplitude * (use_sin ? std::sin(w.omega * t) : std::cos(w.omega * t));
    });
  }
  throw std::out_of_range("trajectory " + name + " has no axis " + axis);
}

std::vector<analysis::AxisSignal> Trajectory::sample_all() const {
  std::vector<analysis::AxisSignal> out;
  for (const auto& w : waves) out.push_back({w.axis, sample(w.axis)});
  return out;
}

TrajectorySuite make_suite(int count, std::uint64_t seed, const HarnessConfig& cfg,
                           const std::vector<std::string>& axes) {
  if (count < 0) throw std::invalid_argument("make_suite: negative count");
  const double lo = cfg.campaign.probe.omega_min, hi = cfg.campaign.probe.omega_max;
  TrajectorySuite suite;
  for (int i = 0; i < count; ++i) {
    Trajectory t;
    t.name = fmt::format("traj{}", i + 1);
    t.seed = bo::splitmix64(seed + static_cast<std::uint64_t>(i));
    t.sample_period = cfg.trajectory_sample_period;
    double slowest = hi;
    for (size_t a = 0; a < axes.size(); ++a) {
      const double u = bo::unit_uniform(t.seed + a);
      const double omega = hi - u * (hi - lo);
      slowest = std::min(slowest, omega);
      t.waves.push_back({axes[a], a % 2 == 0 ? "sin" : "cos", cfg.trajectory_amplitude, omega});
    }
    t.duration = trajectory_duration(slowest, cfg.trajectory_min_duration);
    suite.trajectories.push_back(std::move(t));
  }
  return suite;
}

std::vector<std::string> suite_issues(const TrajectorySuite& s, const HarnessConfig& cfg) {
  std::vector<std::string> issues;
  std::set<std::string> names;
  for (const auto& t : s.trajectories) {
    if (!names.insert(t.name).second) issues.push_back("duplicate trajectory name " + t.name);
    if (!(t.sample_period > 0.0)) issues.push_back(t.name + ": sample_period must be positive");
    if (t.waves.empty()) issues.push_back(t.name + ": no axes");
    double slowest = std::numeric_limits<double>::infinity();
    std::set<std::string> axes;
    for (const auto& w : t.waves) {
      if (!axes.insert(w.axis).second) issues.push_back(t.name + ": duplicate axis " + w.axis);
      if (w.waveform != "sin" && w.waveform != "cos") issues.push_back(t.name + ": waveform must be sin or cos");
      if (!(w.amplitude >= 0.0) || !std::isfinite(w.amplitude)) issues.push_back(t.name + ": bad amplitude");
      if (!(w.omega > 0.0) || !cfg.campaign.probe.in_window(w.omega)) {
        issues.push_back(fmt::format("{}: axis {} frequency {} outside the probe window", t.name, w.axis, w.omega));
      } else {
        slowest = std::min(slowest, w.omega);
      }
    }
    if (std::isfinite(slowest)) {
      const double periods = t.duration * slowest / kTwoPi;
      if (!(t.duration > 0.0) || std::abs(periods - std::round(periods)) > 1e-6 * std::max(1.0, periods)) {
        issues.push_back(t.name + ": duration must be a whole number of slowest periods");
      }
    }
  }
  return issues;
}

json to_json_value(const TrajectorySuite& s) {
  json list = json::array();
  for (const auto& t : s.trajectories) {
    json waves = json::array();
    for (const auto& w : t.waves) {
      waves.push_back({{"axis", w.axis}, {"waveform", w.waveform}, {"amplitude", w.amplitude}, {"omega", w.omega}});
    }
    list.push_back({{"name", t.name}, {"waves", waves}, {"duration", t.duration},
                    {"sample_period", t.sample_period}, {"seed", t.seed}});
  }
  return {{"trajectories", list}};
}

TrajectorySuite suite_from_json(const json& j) {
  TrajectorySuite s;
  for (const json& t : j.at("trajectories")) {
    Trajectory tr;
    tr.name = t.at("name").get<std::string>();
    tr.duration = t.at("duration").get<double>();
    tr.sample_period = t.value("sample_period", 1e-3);
    tr.seed = t.value("seed", std::uint64_t{0});
    for (const json& w : t.at("waves")) {
      tr.waves.push_back({w.at("axis").get<std::string>(), w.at("waveform").get<std::string>(),
                          w.at("amplitude").get<double>(), w.at("omega").get<double>()});
    }
    s.trajectories.push_back(std::move(tr));
  }
  return s;
}

TrajectorySuite load_suite(const fs::path& path) { return suite_from_json(read_json(path)); }

bo::CampaignConfig campaign_for(const HarnessConfig& cfg, int max_iterations) {
  bo::CampaignConfig c = cfg.campaign;
  c.stop.max_iterations = max_iterations;
  return c;
}

bool EstimateRun::all_converged() const {
  return std::all_of(axes.begin(), axes.end(), [](const AxisCampaign& a) { return a.converged; });
}

double EstimateRun::e_star(const std::string& axis, const std::string& source) const {
  for (const auto& a : axes) {
    if (a.axis != axis) continue;
    for (const auto& e : a.estimates) {
      if (e.source == source) return e.e_star;
    }
  }
  throw std::out_of_range(fmt::format("no estimate for axis {} source {}", axis, source));
}

std::uint64_t axis_seed(std::uint64_t seed, size_t axis_index) {
  return bo::splitmix64(seed * 0x100000001b3ULL + axis_index);
}

EstimateRun estimate(const Catalog& catalog, const HarnessConfig& cfg, std::uint64_t seed) {
  std::vector<std::string> issues;
  for (const auto& c : compatibility(catalog)) {
    if (!c.ok()) {
      issues.push_back(fmt::format("source {} axis {}: relative degree {} exceeds target relative degree {}",
                                   c.source, c.axis, c.source_relative_degree, c.target_relative_degree));
    }
  }
  if (!issues.empty()) throw CatalogError(std::move(issues));

  EstimateRun run;
  run.seed = seed;
  run.config_hash = config_hash(cfg);
  for (const auto& s : catalog.sources) run.sources.push_back(s.name);
  for (size_t i = 0; i < catalog.axes.size(); ++i) {
    const std::string& axis = catalog.axes[i];
    AxisCampaign ac;
    ac.axis = axis;
    ac.seed = axis_seed(seed, i);
    bo::BoCampaign c(plants_for(catalog.sources, axis), {catalog.target.name, catalog.target.axis(axis)},
                     cfg.campaign, ac.seed);
    while (!c.converged() && c.iterations() < cfg.campaign.stop.max_iterations) c.step();
    ac.converged = c.converged();
    ac.iterations = c.iterations();
    ac.probe_seconds = c.probe_seconds();
    ac.estimates = c.estimates();
    ac.transcript_csv = bo::transcript_csv(c, run.config_hash);
    ac.probes_csv = bo::probes_csv(c, run.config_hash);
    json models = json::array();
    for (size_t n = 0; n < c.models().size(); ++n) {
      models.push_back({{"source", catalog.sources[n].name}, {"model", gp::to_json_value(c.models()[n])}});
    }
    ac.gp_snapshot = {{"axis", axis}, {"seed", ac.seed}, {"config_hash", run.config_hash}, {"models", models}};
    run.axes.push_back(std::move(ac));
  }
  return run;
}

std::string estimates_csv(const EstimateRun& run) {
  std::string out = "direction";
  for (const auto& s : run.sources) out += ",E_star_" + s;
  out += ",iterations,converged,seed,config_hash\n";
  for (const auto& a : run.axes) {
    out += a.axis;
    for (const auto& e : a.estimates) out += "," + num(e.e_star);
    out += fmt::format(",{},{},{},{}\n", a.iterations, a.converged ? 1 : 0, run.seed, run.config_hash);
  }
  return out;
}

json to_json_value(const EstimateRun& run) {
  json axes = json::array();
  for (const auto& a : run.axes) {
    json est = json::array();
    for (const auto& e : a.estimates) est.push_back(bo::to_json_value(e));
    axes.push_back({{"axis", a.axis}, {"seed", a.seed}, {"converged", a.converged}, {"iterations", a.iterations},
                    {"probe_seconds", a.probe_seconds}, {"estimates", est}});
  }
  return {{"seed", run.seed}, {"config_hash", run.config_hash}, {"sources", run.sources}, {"axes", axes}};
}

EstimateTable estimate_table(const EstimateRun& run) {
  EstimateTable t;
  t.seed = run.seed;
  t.config_hash = run.config_hash;
  for (const auto& a : run.axes) {
    for (const auto& e : a.estimates) t.e_star[{a.axis, e.source}] = e.e_star;
  }
  return t;
}

EstimateTable estimate_table_from_json(const json& j) {
  EstimateTable t;
  t.seed = j.value("seed", std::uint64_t{0});
  t.config_hash = j.value("config_hash", "");
  for (const json& a : j.at("axes")) {
    const auto axis = a.at("axis").get<std::string>();
    for (const json& e : a.at("estimates")) {
      t.e_star[{axis, e.at("source").get<std::string>()}] = e.at("e_star").get<double>();
    }
  }
  return t;
}

VerificationRun verify(const Catalog& catalog, const EstimateTable& table, const TrajectorySuite& suite,
                       const HarnessConfig& cfg) {
  std::vector<std::string> issues;
  for (const auto& s : catalog.sources) {
    for (const auto& a : catalog.axes) {
      if (!table.e_star.count({a, s.name})) issues.push_back(fmt::format("no estimate for source {} axis {}", s.name, a));
    }
  }
  for (const auto& [key, value] : table.e_star) {
    const bool known = std::any_of(catalog.sources.begin(), catalog.sources.end(),
                                   [&](const System& s) { return s.name == key.second; }) &&
                       std::find(catalog.axes.begin(), catalog.axes.end(), key.first) != catalog.axes.end();
    if (!known) issues.push_back(fmt::format("estimate for {} axis {} is not in the catalog", key.second, key.first));
  }
  for (const auto& c : compatibility(catalog)) {
    if (!c.ok()) issues.push_back(fmt::format("source {} axis {} cannot be composed with the target", c.source, c.axis));
  }
  for (const auto& i : suite_issues(suite, cfg)) issues.push_back("suite: " + i);
  for (const auto& t : suite.trajectories) {
    std::set<std::string> axes;
    for (const auto& w : t.waves) axes.insert(w.axis);
    if (axes != std::set<std::string>(catalog.axes.begin(), catalog.axes.end())) {
      issues.push_back("suite: trajectory " + t.name + " axes do not match the catalog axes");
    }
  }
  if (!issues.empty()) {
    std::string msg = "verify: estimates, catalog and suite do not match";
    for (const auto& i : issues) msg += "\n  " + i;
    throw std::invalid_argument(msg);
  }

  VerificationRun run;
  run.seed = table.seed;
  run.config_hash = table.config_hash;
  for (const auto& s : catalog.sources) run.sources.push_back(s.name);
  for (const auto& t : suite.trajectories) {
    std::vector<analysis::AxisSignal> yd;
    for (const auto& a : catalog.axes) yd.push_back({a, t.sample(a)});
    TrajectoryResult row;
    row.trajectory = t.name;
    double base_sq = 0.0;
    for (const auto& s : yd) {
      const double e = lti::l2_norm(analysis::baseline_error(catalog.target.axis(s.axis), s.yd));
      base_sq += e * e;
    }
    row.baseline_error = std::sqrt(base_sq);
    for (const auto& src : catalog.sources) {
      double sq = 0.0;
      std::vector<analysis::AxisEstimate> est;
      for (const auto& s : yd) {
        const double e = lti::l2_norm(analysis::transfer_error(src.axis(s.axis), catalog.target.axis(s.axis), s.yd));
        sq += e * e;
        est.push_back({s.axis, table.e_star.at({s.axis, src.name})});
      }
      const double actual = std::sqrt(sq);
      auto cert = analysis::verdict(src.name, est, yd, row.baseline_error, cfg.margin);
      ++run.checks;
      if (actual > cert.combined_bound) ++run.bound_violations;
      if (cert.verdict == analysis::Verdict::Positive && !(actual < row.baseline_error)) ++run.verdict_violations;
      row.actual_error.push_back(actual);
      row.certificates.push_back(std::move(cert));
    }
    run.rows.push_back(std::move(row));
  }
  return run;
}

std::string verification_csv(const VerificationRun& run) {
  std::string out = "trajectory";
  for (const auto& s : run.sources) out += ",e_" + s;
  for (const auto& s : run.sources) out += ",e_star_" + s;
  out += ",e_baseline";
  for (const auto& s : run.sources) out += ",verdict_" + s;
  out += ",seed,config_hash\n";
  for (const auto& r : run.rows) {
    out += r.trajectory;
    for (double e : r.actual_error) out += "," + num(e);
    for (const auto& c : r.certificates) out += "," + num(c.combined_bound);
    out += "," + num(r.baseline_error);
    for (const auto& c : r.certificates) out += "," + analysis::to_string(c.verdict);
    out += fmt::format(",{},{}\n", run.seed, run.config_hash);
  }
  return out;
}

json to_json_value(const VerificationRun& run) {
  json rows = json::array();
  for (const auto& r : run.rows) {
    json certs = json::array();
    for (size_t n = 0; n < r.certificates.size(); ++n) {
      json c = analysis::to_json_value(r.certificates[n]);
      c["actual_error"] = r.actual_error[n];
      certs.push_back(c);
    }
    rows.push_back({{"trajectory", r.trajectory}, {"baseline_error", r.baseline_error}, {"certificates", certs}});
  }
  return {{"seed", run.seed},
          {"config_hash", run.config_hash},
          {"checks", run.checks},
          {"bound_violations", run.bound_violations},
          {"verdict_violations", run.verdict_violations},
          {"ok", run.ok()},
          {"rows", rows}};
}

AsymmetryRun asymmetry(const Catalog& catalog, const std::string& first, const std::string& second,
                       const std::string& axis, const GridSpec& grid, const HarnessConfig& cfg,
                       const analysis::Sinusoid& demo) {
  const TransferFunction& g1 = catalog.system(first).axis(axis);
  const TransferFunction& g2 = catalog.system(second).axis(axis);
  if (grid.points < 2 || !(grid.omega_min > 0.0) || !(grid.omega_max > grid.omega_min)) {
    throw std::invalid_argument("asymmetry: bad frequency grid");
  }
  if (!(demo.omega > 0.0)) throw std::invalid_argument("asymmetry: demo frequency must be positive");
  const auto omegas = lti::logspace(grid.omega_min, grid.omega_max, static_cast<size_t>(grid.points));

  AsymmetryRun run;
  run.first = first;
  run.second = second;
  run.axis = axis;
  run.report = analysis::nu_gap_report(g1, g2, omegas);
  run.reversed_report = analysis::nu_gap_report(g2, g1, omegas);
  run.demo_input = demo;
  run.demo_duration = trajectory_duration(demo.omega, cfg.trajectory_min_duration);
  const double dt = cfg.trajectory_sample_period;
  const auto count = static_cast<size_t>(std::llround(run.demo_duration / dt));
  const SampledSignal yd = demo.sample(count, dt);
  const double yd_norm = lti::l2_norm(yd);

  auto direction = [&](const std::string& inv_name, const TransferFunction& inv, const std::string& to_name,
                       const TransferFunction& to) {
    DirectionDemo d;
    d.inverse_of = inv_name;
    d.applied_to = to_name;
    d.composable = lti::relative_degree(to) >= lti::relative_degree(inv);
    d.baseline_error = lti::l2_norm(analysis::baseline_error(to, yd));
    if (d.composable) {
      d.transfer_error = lti::l2_norm(analysis::transfer_error(inv, to, yd));
      d.ratio = d.baseline_error > 0.0 ? d.transfer_error / d.baseline_error : 0.0;
    }
    d.reference_gain = yd_norm > 0.0 ? lti::l2_norm(analysis::inverse_reference(inv, demo, count, dt)) / yd_norm : 0.0;
    return d;
  };
  run.demos.push_back(direction(second, g2, first, g1));
  run.demos.push_back(direction(first, g1, second, g2));
  return run;
}

std::string asymmetry_csv(const analysis::AsymmetryReport& r) {
  std::string out = "omega,psi,Psi,error_mag\n";
  for (size_t k = 0; k < r.omega_grid.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", num(r.omega_grid[k]), num(r.chordal[k]), num(r.asym_factor[k]),
                       num(r.error_mag[k]));
  }
  return out;
}

json to_json_value(const AsymmetryRun& run) {
  json demos = json::array();
  for (const auto& d : run.demos) {
    demos.push_back({{"inverse_of", d.inverse_of},
                     {"applied_to", d.applied_to},
                     {"composable", d.composable},
                     {"transfer_error", d.transfer_error},
                     {"baseline_error", d.baseline_error},
                     {"ratio", d.ratio},
                     {"change_percent", d.composable ? 100.0 * (d.ratio - 1.0) : 0.0},
                     {"reference_gain", d.reference_gain}});
  }
  auto summary = [](const analysis::AsymmetryReport& r) {
    return json{{"nu_gap", r.nu_gap},
                {"winding_condition_ok", r.winding_condition_ok},
                {"max_error_mag", r.error_mag.empty() ? 0.0 : *std::max_element(r.error_mag.begin(), r.error_mag.end())}};
  };
  return {{"first", run.first},
          {"second", run.second},
          {"axis", run.axis},
          {"first_on_second_inverse", summary(run.report)},
          {"second_on_first_inverse", summary(run.reversed_report)},
          {"demo",
           {{"amplitude", run.demo_input.amplitude},
            {"omega", run.demo_input.omega},
            {"duration", run.demo_duration},
            {"directions", demos}}}};
}

std::vector<OracleEntry> oracle(const Catalog& catalog, double omega_min, double omega_max, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("oracle: grid_size must be >= 2");
  const auto grid = lti::logspace(omega_min, omega_max, static_cast<size_t>(grid_size));
  std::vector<OracleEntry> out;
  for (const auto& a : catalog.axes) {
    const TransferFunction& t = catalog.target.axis(a);
    for (const auto& s : catalog.sources) {
      OracleEntry e{a, s.name, -1.0, grid.front()};
      for (double w : grid) {
        const double v = std::abs(lti::freq_response(t, w) / lti::freq_response(s.axis(a), w) - 1.0);
        if (v > e.max_error) {
          e.max_error = v;
          e.omega = w;
        }
      }
      out.push_back(e);
    }
  }
  return out;
}

std::string oracle_csv(const std::vector<OracleEntry>& entries, const Catalog& catalog) {
  std::string out = "direction";
  for (const auto& s : catalog.sources) out += ",E_max_" + s.name;
  for (const auto& s : catalog.sources) out += ",omega_" + s.name;
  out += "\n";
  for (const auto& a : catalog.axes) {
    std::string values, omegas;
    for (const auto& s : catalog.sources) {
      for (const auto& e : entries) {
        if (e.axis == a && e.source == s.name) {
          values += "," + num(e.max_error);
          omegas += "," + num(e.omega);
        }
      }
    }
    out += a + values + omegas + "\n";
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace xferbound::harness
