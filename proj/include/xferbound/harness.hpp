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
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xferbound/bo_estimator.hpp"
#include "xferbound/signal.hpp"
#include "xferbound/transfer_analysis.hpp"

namespace xferbound::harness {

using lti::SampledSignal;
using lti::TransferFunction;

// A robot: one baseline closed-loop transfer function per axis.
struct System {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, TransferFunction>> axes;

  // Throws std::out_of_range for an unknown axis.
  const TransferFunction& axis(const std::string& axis) const;
};

struct Catalog {
  std::string description;
  std::vector<std::string> axes;
  System target;
  std::vector<System> sources;

  const System& system(const std::string& name) const;
};

// Carries every problem found while validating a catalog.
class CatalogError : public std::invalid_argument {
 public:
  explicit CatalogError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// All schema and plant problems in a catalog document (empty when valid):
// every plant must be proper, stable and minimum phase.
std::vector<std::string> catalog_issues(const nlohmann::json& j);
Catalog catalog_from_json(const nlohmann::json& j);
nlohmann::json to_json_value(const Catalog& c);
Catalog load_catalog(const std::filesystem::path& path);

struct Compatibility {
  std::string source;
  std::string axis;
  int target_relative_degree = 0;
  int source_relative_degree = 0;
  bool ok() const { return target_relative_degree >= source_relative_degree; }
};
std::vector<Compatibility> compatibility(const Catalog& c);

// One target, two agile sources close to it and three slow, damped sources
// (one of them without the lag that stands in for transport delay).
Catalog default_catalog();
// The target duplicated as its only source.
Catalog self_transfer_catalog(const Catalog& c);

struct HarnessConfig {
  bo::CampaignConfig campaign;
  double margin = 1.0;
  int oracle_grid_size = 10000;
  double trajectory_min_duration = 30.0;
  double trajectory_sample_period = 1e-3;
  double trajectory_amplitude = 0.25;

  void validate() const;
};

nlohmann::json to_json_value(const HarnessConfig& c);
HarnessConfig harness_config_from_json(const nlohmann::json& j);
HarnessConfig load_config(const std::filesystem::path& path);
std::string config_hash(const HarnessConfig& c);

struct AxisWave {
  std::string axis;
  std::string waveform;  // "sin" or "cos"
  double amplitude = 0.0;
  double omega = 0.0;
};

struct Trajectory {
  std::string name;
  std::vector<AxisWave> waves;
  double duration = 0.0;
  double sample_period = 1e-3;
  std::uint64_t seed = 0;

  SampledSignal sample(const std::string& axis) const;
  std::vector<analysis::AxisSignal> sample_all() const;
};

struct TrajectorySuite {
  std::vector<Trajectory> trajectories;
};

// `count` trajectories [a sin(w_x t), a cos(w_y t), a sin(w_z t)] with
// frequencies uniform on (omega_min, omega_max] and duration the smallest
// whole number of slowest periods covering trajectory_min_duration.
TrajectorySuite make_suite(int count, std::uint64_t seed, const HarnessConfig& cfg,
                           const std::vector<std::string>& axes = {"x", "y", "z"});

// Duration rule shared by make_suite and validation.
double trajectory_duration(double slowest_omega, double min_duration);

std::vector<std::string> suite_issues(const TrajectorySuite& s, const HarnessConfig& cfg);
nlohmann::json to_json_value(const TrajectorySuite& s);
TrajectorySuite suite_from_json(const nlohmann::json& j);
TrajectorySuite load_suite(const std::filesystem::path& path);

bo::CampaignConfig campaign_for(const HarnessConfig& cfg, int max_iterations);

struct AxisCampaign {
  std::string axis;
  std::uint64_t seed = 0;
  bool converged = false;
  int iterations = 0;
  double probe_seconds = 0.0;
  std::vector<bo::BoundEstimate> estimates;
  std::string transcript_csv;
  std::string probes_csv;
  nlohmann::json gp_snapshot;
};

struct EstimateRun {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::string> sources;
  std::vector<AxisCampaign> axes;

  bool all_converged() const;
  // Throws std::out_of_range when absent.
  double e_star(const std::string& axis, const std::string& source) const;
};

// Campaign seed for one axis.
std::uint64_t axis_seed(std::uint64_t seed, size_t axis_index);

// One N-source campaign per axis. Throws CatalogError when a source has
// larger relative degree than the target on some axis.
EstimateRun estimate(const Catalog& catalog, const HarnessConfig& cfg, std::uint64_t seed);

// estimates.csv: one row per axis, one E* column per source.
std::string estimates_csv(const EstimateRun& run);
nlohmann::json to_json_value(const EstimateRun& run);

// Estimates as read back from estimates.json.
struct EstimateTable {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::pair<std::string, std::string>, double> e_star;  // (axis, source)
};
EstimateTable estimate_table(const EstimateRun& run);
EstimateTable estimate_table_from_json(const nlohmann::json& j);

struct TrajectoryResult {
  std::string trajectory;
  double baseline_error = 0.0;
  std::vector<double> actual_error;  // per source
  std::vector<analysis::BoundCertificate> certificates;
};

struct VerificationRun {
  std::vector<std::string> sources;
  std::vector<TrajectoryResult> rows;
  std::uint64_t seed = 0;
  std::string config_hash;
  // actual > combined bound.
  int bound_violations = 0;
  // Positive verdict but no realized improvement.
  int verdict_violations = 0;
  int checks = 0;

  bool ok() const { return bound_violations == 0 && verdict_violations == 0; }
};

// Throws std::invalid_argument when the table lacks an (axis, source) entry
// of the catalog or names a source the catalog does not have.
VerificationRun verify(const Catalog& catalog, const EstimateTable& table, const TrajectorySuite& suite,
                       const HarnessConfig& cfg);

// Columns: trajectory, e per source, e* per source, baseline e, verdict per
// source, seed, config hash.
std::string verification_csv(const VerificationRun& run);
nlohmann::json to_json_value(const VerificationRun& run);

struct GridSpec {
  double omega_min = 0.05;
  double omega_max = 2.0;
  int points = 1000;
};

struct DirectionDemo {
  std::string inverse_of;  // system whose inverse is used
  std::string applied_to;  // system that receives it
  bool composable = false;
  double transfer_error = 0.0;
  double baseline_error = 0.0;
  double ratio = 0.0;
  double reference_gain = 0.0;  // ||y_r|| / ||y_d||
};

struct AsymmetryRun {
  std::string first;
  std::string second;
  std::string axis;
  analysis::AsymmetryReport report;           // first as G1, second as G2
  analysis::AsymmetryReport reversed_report;  // roles swapped
  analysis::Sinusoid demo_input;
  double demo_duration = 0.0;
  std::vector<DirectionDemo> demos;
};

// Gap curves for both orders plus the two-way simulation on a sinusoid.
AsymmetryRun asymmetry(const Catalog& catalog, const std::string& first, const std::string& second,
                       const std::string& axis, const GridSpec& grid, const HarnessConfig& cfg,
                       const analysis::Sinusoid& demo = {0.25, 1.0, 0.0});

// omega, psi, Psi, error_mag.
std::string asymmetry_csv(const analysis::AsymmetryReport& r);
nlohmann::json to_json_value(const AsymmetryRun& run);

struct OracleEntry {
  std::string axis;
  std::string source;
  double max_error = 0.0;
  double omega = 0.0;
};

// max |G_t / G_s - 1| on a log grid of the probe window, per axis and source.
std::vector<OracleEntry> oracle(const Catalog& catalog, double omega_min, double omega_max, int grid_size);
std::string oracle_csv(const std::vector<OracleEntry>& entries, const Catalog& catalog);

// Writes text, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace xferbound::harness
