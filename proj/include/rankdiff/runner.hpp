/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Command-line surface.  Subcommands:
//
//   init           gap rates and quantile tables        -> rates.csv, quantiles.csv
//   simulate       particle checkpoints per replica     -> checkpoints_r*.csv, sorted_r*.csv
//   pde            CDF evolution on a grid              -> solution.csv, meta.json
//   compare        particles vs PDE distances           -> report.jsonl, summary.csv
//   capital-curve  ranked quantiles of the final CDF    -> capital.csv
//   diagnose       stationary-configuration statistics  -> diagnostics.csv
//   residual       weak-form residuals of stored output -> residuals.csv
//
// Exit codes: 0 success, 2 rejected input, 1 runtime failure.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rankdiff/config.hpp"

namespace rankdiff {

void cmd_init(const RunConfig& cfg, const std::filesystem::path& out_dir);

void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);

void cmd_pde(const RunConfig& cfg, const std::filesystem::path& out_dir,
             const std::optional<std::string>& initial_csv,
             std::optional<double> forced_dt);

void cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir);

void cmd_capital_curve(const RunConfig& cfg,
                       const std::filesystem::path& out_dir, int market_size,
                       std::vector<int> j_list, bool upper_rank);

void cmd_diagnose(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  double epsilon, int replicas);

void cmd_residual(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  const std::string& input_csv, std::vector<double> centers,
                  double width);

// Full argv handling (without the program name).  Errors go to stderr.
int run_subcommand(const std::vector<std::string>& args);

} // namespace rankdiff
