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


#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "xferbound/commands.hpp"

using namespace xferbound::harness;

namespace {

void common_flags(CLI::App* cmd, CommandOptions& o, bool with_grid = true) {
  cmd->add_option("--catalog", o.catalog, "Catalog JSON (default: built-in catalog)");
  cmd->add_option("--config", o.config, "Config JSON (default: built-in settings)");
  cmd->add_option("--seed", o.seed, "Campaign seed")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
  if (with_grid) cmd->add_option("--grid-size", o.grid_size, "Acquisition grid points");
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap per campaign");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify inverse-dynamics transfer between LTI systems before execution"};
  app.require_subcommand(1);
  CommandOptions o;

  auto* est = app.add_subcommand("estimate", "Estimate ||E||_inf per source and axis by Bayesian optimization");
  common_flags(est, o);

  auto* ver = app.add_subcommand("verify", "Simulate trajectories and check errors against certified bounds");
  common_flags(ver, o);
  std::filesystem::path estimates, suite;
  int trajectories = 5;
  ver->add_option("--estimates", estimates, "estimates.json (default: <out-dir>/estimates.json)");
  ver->add_option("--suite", suite, "Trajectory suite JSON (default: drawn from --seed)");
  ver->add_option("--trajectories", trajectories, "Trajectories to draw without --suite")->capture_default_str();

  auto* asym = app.add_subcommand("asymmetry", "nu-gap decomposition and two-way transfer demo for a pair");
  CommandOptions asym_opts;
  common_flags(asym, asym_opts, false);
  std::string first = "Rt", second = "Rs5", axis = "x";
  GridSpec grid;
  asym->add_option("--first", first, "System in the G1 role")->capture_default_str();
  asym->add_option("--second", second, "System in the G2 role")->capture_default_str();
  asym->add_option("--axis", axis, "Axis")->capture_default_str();
  asym->add_option("--omega-min", grid.omega_min, "Grid start (rad/s)")->capture_default_str();
  asym->add_option("--omega-max", grid.omega_max, "Grid end (rad/s)")->capture_default_str();
  asym->add_option("--grid-size", grid.points, "Grid points")->capture_default_str();

  auto* orc = app.add_subcommand("oracle", "Dense-grid reference max |E(jw)| over the probe window");
  common_flags(orc, o);

  auto* cat = app.add_subcommand("default-catalog", "Write the built-in catalog as JSON");
  CommandOptions cat_opts;
  bool to_stdout = false;
  cat->add_option("--out-dir", cat_opts.out_dir, "Output directory")->capture_default_str();
  cat->add_flag("--stdout", to_stdout, "Print instead of writing a file");

  auto* dcfg = app.add_subcommand("default-config", "Write the built-in settings as JSON");
  dcfg->add_option("--out-dir", cat_opts.out_dir, "Output directory")->capture_default_str();
  dcfg->add_flag("--stdout", to_stdout, "Print instead of writing a file");

  auto* mk = app.add_subcommand("make-suite", "Draw a seeded trajectory suite");
  common_flags(mk, o, false);
  int count = 5;
  mk->add_option("--count", count, "Number of trajectories")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*est) return cmd_estimate(o, std::cout, std::cerr);
    if (*ver) {
      return cmd_verify(o, estimates.empty() ? o.out_dir / "estimates.json" : estimates, suite, trajectories,
                        std::cout, std::cerr);
    }
    if (*asym) return cmd_asymmetry(asym_opts, first, second, axis, grid, std::cout, std::cerr);
    if (*orc) return cmd_oracle(o, std::cout, std::cerr);
    if (*cat) return cmd_default_catalog(cat_opts, to_stdout, std::cout, std::cerr);
    if (*dcfg) return cmd_default_config(cat_opts, to_stdout, std::cout, std::cerr);
    if (*mk) return cmd_make_suite(o, count, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
