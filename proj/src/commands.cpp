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


#include "xferbound/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace xferbound::harness {

namespace fs = std::filesystem;

namespace {

struct Loaded {
  Catalog catalog;
  HarnessConfig config;
};

// Loads catalog and config, applying the command-line overrides.
std::optional<Loaded> load(const CommandOptions& opts, std::ostream& err) {
  try {
    Loaded l{opts.catalog.empty() ? default_catalog() : load_catalog(opts.catalog), load_config(opts.config)};
    if (opts.grid_size) l.config.campaign.grid_points = *opts.grid_size;
    if (opts.max_iters) l.config.campaign.stop.max_iterations = *opts.max_iters;
    l.config.validate();
    return l;
  } catch (const CatalogError& e) {
    fmt::print(err, "error: catalog has {} problem(s):\n", e.issues().size());
    for (const auto& i : e.issues()) fmt::print(err, "  - {}\n", i);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
  }
  return std::nullopt;
}

}  // namespace

int cmd_estimate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load(opts, err);
  if (!loaded) return kExitBadInput;
  EstimateRun run;
  try {
    run = estimate(loaded->catalog, loaded->config, opts.seed);
  } catch (const CatalogError& e) {
    fmt::print(err, "error: catalog has {} problem(s):\n", e.issues().size());
    for (const auto& i : e.issues()) fmt::print(err, "  - {}\n", i);
    return kExitBadInput;
  }
  write_text(opts.out_dir / "estimates.csv", estimates_csv(run));
  write_text(opts.out_dir / "estimates.json", to_json_value(run).dump(2) + "\n");
  for (const auto& a : run.axes) {
    write_text(opts.out_dir / fmt::format("transcript_{}.csv", a.axis), a.transcript_csv);
    write_text(opts.out_dir / fmt::format("probes_{}.csv", a.axis), a.probes_csv);
    write_text(opts.out_dir / fmt::format("gp_{}.json", a.axis), a.gp_snapshot.dump(2) + "\n");
  }
  out << estimates_csv(run);
  for (const auto& a : run.axes) {
    fmt::print(out, "axis {}: {} iterations, {:.1f} s of simulated probing{}\n", a.axis, a.iterations,
               a.probe_seconds, a.converged ? "" : ", NOT CONVERGED");
  }
  return run.all_converged() ? kExitOk : kExitViolation;
}

int cmd_verify(const CommandOptions& opts, const fs::path& estimates, const fs::path& suite_path, int trajectories,
               std::ostream& out, std::ostream& err) {
  auto loaded = load(opts, err);
  if (!loaded) return kExitBadInput;
  try {
    const EstimateTable table = estimate_table_from_json(read_json(estimates));
    TrajectorySuite suite;
    if (suite_path.empty()) {
      suite = make_suite(trajectories, opts.seed, loaded->config, loaded->catalog.axes);
      write_text(opts.out_dir / "suite.json", to_json_value(suite).dump(2) + "\n");
    } else {
      suite = load_suite(suite_path);
    }
    const VerificationRun run = verify(loaded->catalog, table, suite, loaded->config);
    write_text(opts.out_dir / "verification.csv", verification_csv(run));
    write_text(opts.out_dir / "verification.json", to_json_value(run).dump(2) + "\n");
    out << verification_csv(run);
    fmt::print(out, "{} checks: {} bound violations, {} unrealized positive verdicts -> {}\n", run.checks,
               run.bound_violations, run.verdict_violations, run.ok() ? "PASS" : "FAIL");
    return run.ok() ? kExitOk : kExitViolation;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitBadInput;
  }
}

int cmd_asymmetry(const CommandOptions& opts, const std::string& first, const std::string& second,
                  const std::string& axis, const GridSpec& grid, std::ostream& out, std::ostream& err) {
  auto loaded = load(opts, err);
  if (!loaded) return kExitBadInput;
  AsymmetryRun run;
  try {
    run = asymmetry(loaded->catalog, first, second, axis, grid, loaded->config);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitBadInput;
  }
  write_text(opts.out_dir / "asymmetry_curves.csv", asymmetry_csv(run.report));
  write_text(opts.out_dir / "asymmetry_curves_reversed.csv", asymmetry_csv(run.reversed_report));
  write_text(opts.out_dir / "asymmetry.json", to_json_value(run).dump(2) + "\n");

  bool identity_ok = true;
  for (const auto* r : {&run.report, &run.reversed_report}) {
    for (size_t k = 0; k < r->omega_grid.size(); ++k) {
      if (std::abs(r->chordal[k] * r->asym_factor[k] - r->error_mag[k]) > 1e-9 * std::max(1.0, r->error_mag[k])) {
        identity_ok = false;
      }
    }
  }
  fmt::print(out, "nu-gap over [{}, {}] rad/s: {:.6g} (winding condition {})\n", grid.omega_min, grid.omega_max,
             run.report.nu_gap, run.report.winding_condition_ok ? "ok" : "violated");
  for (const auto& d : run.demos) {
    if (d.composable) {
      fmt::print(out, "{} inverse on {}: error {:.6g} vs baseline {:.6g} ({:+.1f}%), ||y_r||/||y_d|| = {:.4g}\n",
                 d.inverse_of, d.applied_to, d.transfer_error, d.baseline_error, 100.0 * (d.ratio - 1.0),
                 d.reference_gain);
    } else {
      fmt::print(out, "{} inverse on {}: not composable (relative degree)\n", d.inverse_of, d.applied_to);
    }
  }
  return identity_ok ? kExitOk : kExitViolation;
}

int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  auto loaded = load(opts, err);
  if (!loaded) return kExitBadInput;
  const int n = opts.grid_size.value_or(loaded->config.oracle_grid_size);
  const auto& p = loaded->config.campaign.probe;
  std::vector<OracleEntry> entries;
  try {
    entries = oracle(loaded->catalog, p.omega_min, p.omega_max, n);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitBadInput;
  }
  const std::string csv = oracle_csv(entries, loaded->catalog);
  write_text(opts.out_dir / "oracle.csv", csv);
  out << csv;
  return kExitOk;
}

int cmd_default_catalog(const CommandOptions& opts, bool to_stdout, std::ostream& out, std::ostream&) {
  const std::string text = to_json_value(default_catalog()).dump(2) + "\n";
  if (to_stdout) {
    out << text;
  } else {
    write_text(opts.out_dir / "default_catalog.json", text);
    fmt::print(out, "wrote {}\n", (opts.out_dir / "default_catalog.json").string());
  }
  return kExitOk;
}

int cmd_default_config(const CommandOptions& opts, bool to_stdout, std::ostream& out, std::ostream&) {
  const std::string text = to_json_value(HarnessConfig{}).dump(2) + "\n";
  if (to_stdout) {
    out << text;
  } else {
    write_text(opts.out_dir / "default_config.json", text);
    fmt::print(out, "wrote {}\n", (opts.out_dir / "default_config.json").string());
  }
  return kExitOk;
}

int cmd_make_suite(const CommandOptions& opts, int count, std::ostream& out, std::ostream& err) {
  auto loaded = load(opts, err);
  if (!loaded) return kExitBadInput;
  if (count < 1) {
    fmt::print(err, "error: need at least one trajectory\n");
    return kExitBadInput;
  }
  const auto suite = make_suite(count, opts.seed, loaded->config, loaded->catalog.axes);
  write_text(opts.out_dir / "suite.json", to_json_value(suite).dump(2) + "\n");
  fmt::print(out, "wrote {} trajectories to {}\n", count, (opts.out_dir / "suite.json").string());
  return kExitOk;
}

}  // namespace xferbound::harness
