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

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xferbound/gaussian_process.hpp"
#include "xferbound/probe.hpp"
#include "xferbound/transfer_function.hpp"

namespace xferbound::bo {

std::uint64_t splitmix64(std::uint64_t x);
// Uniform on [0, 1) from the top 53 bits of one mt19937_64 draw; identical on
// every platform.
double unit_uniform(std::uint64_t seed);

// (f - f_max) Phi(Z) + sigma phi(Z), Z = (f - f_max) / sigma; 0 when
// sigma < 1e-12.
double expected_improvement(double mean, double sigma, double f_max);
double expected_improvement(const gp::GpModel& m, double omega, double f_max);

struct WindowMax {
  double omega = 0.0;
  double value = 0.0;
};

// Maximizes f over [lo, hi] with a log-spaced grid followed by golden-section
// refinement (in log10 omega) between the neighbours of the best grid point.
// Ties go to the lowest omega.
WindowMax maximize_on_window(const std::function<double(double)>& f, double lo, double hi,
                             int grid_points);

struct Acquisition {
  double omega = 0.0;
  double value = 0.0;
  // Every EI on the grid was exactly zero; omega is then the window minimum.
  bool all_zero = false;
};

// argmax over the window of max_n EI_n(omega), with f_max taken per model as
// the best observed value.
Acquisition maximize_acquisition(std::span<const gp::GpModel> models, double lo, double hi,
                                 int grid_points);

struct ConvergencePolicy {
  double relative_tolerance = 0.01;
  // Added to the relative threshold so objectives that are identically zero
  // can converge.
  double absolute_tolerance = 1e-9;
  int patience = 3;
  int max_iterations = 40;
};

struct GpSettings {
  double noise_variance = 1e-6;
  gp::SeKernel initial_kernel{1.0, 1.0};
  gp::FitBounds bounds;
};

struct CampaignConfig {
  probe::ProbeConfig probe;
  GpSettings gp;
  ConvergencePolicy stop;
  int grid_points = 512;

  void validate() const;
};

nlohmann::json to_json_value(const CampaignConfig& c);
CampaignConfig campaign_config_from_json(const nlohmann::json& j);

struct NamedPlant {
  std::string name;
  lti::TransferFunction tf;
};

struct BoundEstimate {
  std::string source;
  double omega_star = 0.0;
  double e_star = 0.0;
  double posterior_mean_at_star = 0.0;
  double posterior_sigma_at_star = 0.0;
  int iterations_used = 0;
};

nlohmann::json to_json_value(const BoundEstimate& e);

// State of one estimation run: every iteration probes the target once and
// each source once at the same frequency, appends |G_s^-1 G_t - 1| to every
// source's GP, refits and picks the next frequency by max-EI.
class BoCampaign {
 public:
  // Throws std::invalid_argument for unstable or improper plants and
  // lti::ImproperCompositionError when a source has larger relative degree
  // than the target.
  BoCampaign(std::vector<NamedPlant> sources, NamedPlant target, CampaignConfig cfg, std::uint64_t seed);

  // Runs one iteration. No-op once converged.
  void step();

  bool converged() const { return converged_; }
  int iterations() const { return static_cast<int>(history_.size()); }
  double next_omega() const { return next_omega_; }
  bool acquisition_exhausted() const { return exhausted_; }

  const std::vector<NamedPlant>& sources() const { return sources_; }
  const NamedPlant& target() const { return target_; }
  const CampaignConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<gp::GpModel>& models() const { return models_; }
  const std::vector<probe::ProbeResult>& history() const { return history_; }
  // trace()[k][n]: max over the window of source n's posterior mean after
  // iteration k.
  const std::vector<std::vector<double>>& trace() const { return trace_; }
  // Simulated seconds of probing spent so far, over all plants.
  double probe_seconds() const { return probe_seconds_; }

  // One estimate per source from the current models.
  std::vector<BoundEstimate> estimates() const;

 private:
  std::vector<NamedPlant> sources_;
  NamedPlant target_;
  CampaignConfig cfg_;
  std::uint64_t seed_;
  std::vector<gp::GpModel> models_;
  std::vector<probe::ProbeResult> history_;
  std::vector<std::vector<double>> trace_;
  double next_omega_ = 0.0;
  double probe_seconds_ = 0.0;
  int stable_streak_ = 0;
  bool converged_ = false;
  bool exhausted_ = false;
};

// Frequency the campaign will probe next.
double next_sample(const BoCampaign& c);

class CampaignNotConverged : public std::runtime_error {
 public:
  explicit CampaignNotConverged(BoCampaign partial);
  const BoCampaign& partial() const { return partial_; }

 private:
  BoCampaign partial_;
};

// Steps a fresh campaign to convergence. Throws CampaignNotConverged after
// cfg.stop.max_iterations iterations.
BoCampaign run_to_convergence(std::vector<NamedPlant> sources, NamedPlant target,
                              const CampaignConfig& cfg, std::uint64_t seed);

std::vector<BoundEstimate> run_campaign(std::vector<NamedPlant> sources, NamedPlant target,
                                        const CampaignConfig& cfg, std::uint64_t seed);

// Transcript rows: iteration, omega_sample, f per source, max posterior mean
// per source, seed, config hash.
std::string transcript_csv(const BoCampaign& c, const std::string& config_hash);

// Per-probe CSV (probe_csv_header layout plus iteration, seed, config hash).
std::string probes_csv(const BoCampaign& c, const std::string& config_hash);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace xferbound::bo
