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


#include "xferbound/bo_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace xferbound::bo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr int kGoldenIterations = 60;

std::uint64_t probe_seed(std::uint64_t seed, int iteration, size_t plant) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(iteration))) +
                    static_cast<std::uint64_t>(plant));
}

void check_plant(const NamedPlant& p) {
  if (!p.tf.is_proper()) throw std::invalid_argument("plant " + p.name + " is not proper: " + p.tf.to_string());
  if (!lti::is_bibo_stable(p.tf)) {
    throw std::invalid_argument("plant " + p.name + " is not BIBO stable: " + p.tf.to_string());
  }
}

}  // namespace

double expected_improvement(double mean, double sigma, double f_max) {
  if (!(sigma >= kSigmaFloor)) return 0.0;
  const double d = mean - f_max;
  const double z = d / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, d * cdf + sigma * pdf);
}

double expected_improvement(const gp::GpModel& m, double omega, double f_max) {
  const auto p = m.posterior(omega);
  return expected_improvement(p.mean, p.sigma(), f_max);
}

WindowMax maximize_on_window(const std::function<double(double)>& f, double lo, double hi,
                             int grid_points) {
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument(fmt::format("maximize_on_window: bad window [{}, {}]", lo, hi));
  }
  const auto grid = lti::logspace(lo, hi, static_cast<size_t>(std::max(2, grid_points)));
  size_t best = 0;
  double best_value = f(grid[0]);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  WindowMax out{grid[best], best_value};
  if (grid.size() < 3) return out;

  double a = std::log10(grid[best == 0 ? 0 : best - 1]);
  double b = std::log10(grid[std::min(best + 1, grid.size() - 1)]);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto at = [&](double x) { return std::clamp(std::pow(10.0, x), lo, hi); };
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(at(c)), fd = f(at(d));
  for (int it = 0; it < kGoldenIterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(at(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(at(d));
    }
  }
  const double x = fc >= fd ? c : d;
  const double fx = std::max(fc, fd);
  if (fx > best_value) out = {at(x), fx};
  return out;
}

Acquisition maximize_acquisition(std::span<const gp::GpModel> models, double lo, double hi,
                                 int grid_points) {
  std::vector<double> f_max;
  for (const auto& m : models) f_max.push_back(gp::dataset_max(m.dataset()));
  auto alpha = [&](double w) {
    double best = 0.0;
    for (size_t n = 0; n < models.size(); ++n) best = std::max(best, expected_improvement(models[n], w, f_max[n]));
    return best;
  };
  const WindowMax wm = maximize_on_window(alpha, lo, hi, grid_points);
  return {wm.omega, wm.value, wm.value == 0.0};
}

void CampaignConfig::validate() const {
  probe.validate();
  if (grid_points < 3) throw std::invalid_argument("CampaignConfig: grid_points must be >= 3");
  if (!(gp.noise_variance >= 0.0)) throw std::invalid_argument("CampaignConfig: noise_variance must be >= 0");
  if (!(gp.initial_kernel.signal_variance > 0.0) || !(gp.initial_kernel.length_scale > 0.0)) {
    throw std::invalid_argument("CampaignConfig: initial kernel hyperparameters must be positive");
  }
  if (!(gp.bounds.length_scale_min > 0.0) || !(gp.bounds.length_scale_max > gp.bounds.length_scale_min) ||
      !(gp.bounds.signal_ratio_min > 0.0) || !(gp.bounds.signal_ratio_max > gp.bounds.signal_ratio_min)) {
    throw std::invalid_argument("CampaignConfig: bad hyperparameter search bounds");
  }
  if (stop.max_iterations < 1 || stop.patience < 1) {
    throw std::invalid_argument("CampaignConfig: max_iterations and patience must be positive");
  }
  if (!(stop.relative_tolerance >= 0.0) || !(stop.absolute_tolerance >= 0.0)) {
    throw std::invalid_argument("CampaignConfig: convergence tolerances must be >= 0");
  }
}

nlohmann::json to_json_value(const CampaignConfig& c) {
  return {
      {"probe",
       {{"omega_min", c.probe.omega_min},
        {"omega_max", c.probe.omega_max},
        {"amplitude", c.probe.amplitude},
        {"settle_periods", c.probe.settle_periods},
        {"measure_periods", c.probe.measure_periods},
        {"sample_period", c.probe.sample_period},
        {"noise_stddev", c.probe.noise_stddev}}},
      {"gp",
       {{"noise_variance", c.gp.noise_variance},
        {"initial_signal_variance", c.gp.initial_kernel.signal_variance},
        {"initial_length_scale", c.gp.initial_kernel.length_scale},
        {"length_scale_min", c.gp.bounds.length_scale_min},
        {"length_scale_max", c.gp.bounds.length_scale_max},
        {"signal_ratio_min", c.gp.bounds.signal_ratio_min},
        {"signal_ratio_max", c.gp.bounds.signal_ratio_max},
        {"fit_grid_points", c.gp.bounds.grid_points},
        {"fit_refine_iterations", c.gp.bounds.refine_iterations}}},
      {"stop",
       {{"relative_tolerance", c.stop.relative_tolerance},
        {"absolute_tolerance", c.stop.absolute_tolerance},
        {"patience", c.stop.patience},
        {"max_iterations", c.stop.max_iterations}}},
      {"grid_points", c.grid_points},
  };
}

CampaignConfig campaign_config_from_json(const nlohmann::json& j) {
  CampaignConfig c;
  const auto empty = nlohmann::json::object();
  const auto& p = j.contains("probe") ? j.at("probe") : empty;
  c.probe.omega_min = p.value("omega_min", c.probe.omega_min);
  c.probe.omega_max = p.value("omega_max", c.probe.omega_max);
  c.probe.amplitude = p.value("amplitude", c.probe.amplitude);
  c.probe.settle_periods = p.value("settle_periods", c.probe.settle_periods);
  c.probe.measure_periods = p.value("measure_periods", c.probe.measure_periods);
  c.probe.sample_period = p.value("sample_period", c.probe.sample_period);
  c.probe.noise_stddev = p.value("noise_stddev", c.probe.noise_stddev);
  const auto& g = j.contains("gp") ? j.at("gp") : empty;
  c.gp.noise_variance = g.value("noise_variance", c.gp.noise_variance);
  c.gp.initial_kernel.signal_variance = g.value("initial_signal_variance", c.gp.initial_kernel.signal_variance);
  c.gp.initial_kernel.length_scale = g.value("initial_length_scale", c.gp.initial_kernel.length_scale);
  c.gp.bounds.length_scale_min = g.value("length_scale_min", c.gp.bounds.length_scale_min);
  c.gp.bounds.length_scale_max = g.value("length_scale_max", c.gp.bounds.length_scale_max);
  c.gp.bounds.signal_ratio_min = g.value("signal_ratio_min", c.gp.bounds.signal_ratio_min);
  c.gp.bounds.signal_ratio_max = g.value("signal_ratio_max", c.gp.bounds.signal_ratio_max);
  c.gp.bounds.grid_points = g.value("fit_grid_points", c.gp.bounds.grid_points);
  c.gp.bounds.refine_iterations = g.value("fit_refine_iterations", c.gp.bounds.refine_iterations);
  const auto& s = j.contains("stop") ? j.at("stop") : empty;
  c.stop.relative_tolerance = s.value("relative_tolerance", c.stop.relative_tolerance);
  c.stop.absolute_tolerance = s.value("absolute_tolerance", c.stop.absolute_tolerance);
  c.stop.patience = s.value("patience", c.stop.patience);
  c.stop.max_iterations = s.value("max_iterations", c.stop.max_iterations);
  c.grid_points = j.value("grid_points", c.grid_points);
  c.validate();
  return c;
}

nlohmann::json to_json_value(const BoundEstimate& e) {
  return {{"source", e.source},
          {"omega_star", e.omega_star},
          {"e_star", e.e_star},
          {"posterior_mean", e.posterior_mean_at_star},
          {"posterior_sigma", e.posterior_sigma_at_star},
          {"iterations", e.iterations_used}};
}

BoCampaign::BoCampaign(std::vector<NamedPlant> sources, NamedPlant target, CampaignConfig cfg,
                       std::uint64_t seed)
    : sources_(std::move(sources)), target_(std::move(target)), cfg_(cfg), seed_(seed) {
  cfg_.validate();
  if (sources_.empty()) throw std::invalid_argument("BoCampaign: need at least one source");
  check_plant(target_);
  const int rt = lti::relative_degree(target_.tf);
  for (const auto& s : sources_) {
    check_plant(s);
    if (lti::relative_degree(s.tf) > rt) {
      throw lti::ImproperCompositionError(
          fmt::format("source {} has relative degree {} > target {} relative degree {}", s.name,
                      lti::relative_degree(s.tf), target_.name, rt));
    }
    if (s.tf.is_zero()) throw std::invalid_argument("source " + s.name + " is identically zero");
  }
  models_.assign(sources_.size(), gp::GpModel({}, 0.0, cfg_.gp.initial_kernel, cfg_.gp.noise_variance));
  const double u = unit_uniform(splitmix64(seed_));
  next_omega_ = cfg_.probe.omega_min + u * (cfg_.probe.omega_max - cfg_.probe.omega_min);
}

void BoCampaign::step() {
  if (converged_ || iterations() >= cfg_.stop.max_iterations) return;
  const int k = iterations();
  const double omega = next_omega_;

  probe::ProbeResult r;
  r.omega = omega;
  r.target_response = probe::probe_system(target_.tf, omega, cfg_.probe, probe_seed(seed_, k, 0));
  for (size_t n = 0; n < sources_.size(); ++n) {
    r.source_responses.push_back(probe::probe_system(sources_[n].tf, omega, cfg_.probe, probe_seed(seed_, k, n + 1)));
  }
  r.objective_values = probe::evaluate_objective(r.source_responses, r.target_response);
  probe_seconds_ += probe::probe_duration(omega, cfg_.probe) * static_cast<double>(sources_.size() + 1);

  std::vector<double> maxima;
  for (size_t n = 0; n < sources_.size(); ++n) {
    std::vector<gp::Sample> data = models_[n].dataset();
    data.push_back({omega, r.objective_values[n]});
    const double mu = gp::dataset_mean(data);
    gp::GpModel m(std::move(data), mu, cfg_.gp.initial_kernel, cfg_.gp.noise_variance);
    if (m.dataset().size() >= 3) m = gp::fit_hyperparameters(m, cfg_.gp.bounds);
    models_[n] = std::move(m);
    maxima.push_back(maximize_on_window([&](double w) { return models_[n].posterior(w).mean; },
                                        cfg_.probe.omega_min, cfg_.probe.omega_max, cfg_.grid_points)
                         .value);
  }
  history_.push_back(std::move(r));

  if (!trace_.empty()) {
    bool stable = true;
    for (size_t n = 0; n < maxima.size(); ++n) {
      const double prev = trace_.back()[n];
      if (!(std::abs(maxima[n] - prev) < cfg_.stop.relative_tolerance * std::abs(prev) + cfg_.stop.absolute_tolerance)) {
        stable = false;
      }
    }
    stable_streak_ = stable ? stable_streak_ + 1 : 0;
  }
  trace_.push_back(std::move(maxima));

  const Acquisition acq = maximize_acquisition(models_, cfg_.probe.omega_min, cfg_.probe.omega_max, cfg_.grid_points);
  next_omega_ = acq.omega;
  exhausted_ = acq.all_zero;
  converged_ = stable_streak_ >= cfg_.stop.patience || exhausted_;
}

std::vector<BoundEstimate> BoCampaign::estimates() const {
  if (history_.empty()) throw std::logic_error("BoCampaign::estimates: no samples yet");
  std::vector<BoundEstimate> out;
  for (size_t n = 0; n < sources_.size(); ++n) {
    const auto& m = models_[n];
    const WindowMax wm = maximize_on_window([&](double w) { return m.posterior(w).mean; },
                                            cfg_.probe.omega_min, cfg_.probe.omega_max, cfg_.grid_points);
    const auto p = m.posterior(wm.omega);
    out.push_back({sources_[n].name, wm.omega, p.mean + 3.0 * p.sigma(), p.mean, p.sigma(), iterations()});
  }
  return out;
}

double next_sample(const BoCampaign& c) { return c.next_omega(); }

CampaignNotConverged::CampaignNotConverged(BoCampaign partial)
    : std::runtime_error(fmt::format("campaign for target {} did not converge within {} iterations",
                                     partial.target().name, partial.config().stop.max_iterations)),
      partial_(std::move(partial)) {}

BoCampaign run_to_convergence(std::vector<NamedPlant> sources, NamedPlant target, const CampaignConfig& cfg,
                              std::uint64_t seed) {
  BoCampaign c(std::move(sources), std::move(target), cfg, seed);
  while (!c.converged() && c.iterations() < cfg.stop.max_iterations) c.step();
  if (!c.converged()) throw CampaignNotConverged(std::move(c));
  return c;
}

std::vector<BoundEstimate> run_campaign(std::vector<NamedPlant> sources, NamedPlant target,
                                        const CampaignConfig& cfg, std::uint64_t seed) {
  return run_to_convergence(std::move(sources), std::move(target), cfg, seed).estimates();
}

std::string transcript_csv(const BoCampaign& c, const std::string& config_hash) {
  std::string out = "iteration,omega_sample";
  for (const auto& s : c.sources()) out += ",f_" + s.name;
  for (const auto& s : c.sources()) out += ",maxmean_" + s.name;
  out += ",seed,config_hash\n";
  for (size_t k = 0; k < c.history().size(); ++k) {
    out += fmt::format("{},{:.12g}", k + 1, c.history()[k].omega);
    for (double f : c.history()[k].objective_values) out += fmt::format(",{:.12g}", f);
    for (double m : c.trace()[k]) out += fmt::format(",{:.12g}", m);
    out += fmt::format(",{},{}\n", c.seed(), config_hash);
  }
  return out;
}

std::string probes_csv(const BoCampaign& c, const std::string& config_hash) {
  std::string out = "iteration," + probe::probe_csv_header() + ",seed,config_hash\n";
  for (size_t k = 0; k < c.history().size(); ++k) {
    const auto& r = c.history()[k];
    auto row = [&](const std::string& line) { out += fmt::format("{},{},{},{}\n", k + 1, line, c.seed(), config_hash); };
    row(probe::probe_csv_row(r.target_response, c.target().name, std::nullopt));
    for (size_t n = 0; n < r.source_responses.size(); ++n) {
      row(probe::probe_csv_row(r.source_responses[n], c.sources()[n].name, r.objective_values[n]));
    }
  }
  return out;
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace xferbound::bo
