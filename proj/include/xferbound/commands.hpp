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
#include <optional>
#include <ostream>
#include <string>

#include "xferbound/harness.hpp"

namespace xferbound::harness {

struct CommandOptions {
  // Empty catalog path means the built-in default catalog; empty config path
  // means default settings.
  std::filesystem::path catalog;
  std::filesystem::path config;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  std::optional<int> grid_size;
  std::optional<int> max_iters;
};

// Exit codes: 0 success, 1 invariant violation or non-convergence, 2 bad
// input.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitBadInput = 2;

// estimates.csv, estimates.json, transcript_<axis>.csv, probes_<axis>.csv,
// gp_<axis>.json.
int cmd_estimate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

// verification.csv and verification.json. Without a suite path a suite of
// `trajectories` trajectories is drawn from the seed and saved as suite.json.
int cmd_verify(const CommandOptions& opts, const std::filesystem::path& estimates,
               const std::filesystem::path& suite, int trajectories, std::ostream& out, std::ostream& err);

// asymmetry_curves.csv, asymmetry_curves_reversed.csv, asymmetry.json.
int cmd_asymmetry(const CommandOptions& opts, const std::string& first, const std::string& second,
                  const std::string& axis, const GridSpec& grid, std::ostream& out, std::ostream& err);

// oracle.csv over the probe window.
int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Prints the default catalog, or writes it to opts.out_dir/default_catalog.json.
int cmd_default_catalog(const CommandOptions& opts, bool to_stdout, std::ostream& out, std::ostream& err);

// Same for the built-in settings (default_config.json).
int cmd_default_config(const CommandOptions& opts, bool to_stdout, std::ostream& out, std::ostream& err);

// suite.json with `count` trajectories.
int cmd_make_suite(const CommandOptions& opts, int count, std::ostream& out, std::ostream& err);

}  // namespace xferbound::harness
