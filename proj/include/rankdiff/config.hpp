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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankdiff/model.hpp"
#include "rankdiff/pme.hpp"

namespace rankdiff {

// Full experiment description.  The JSON schema is strict: unknown fields
// are rejected, t_final must be an integer multiple of dt and checkpoint
// times must sit on the dt lattice (they are snapped when within 1e-9 and
// rejected otherwise).
struct RunConfig {
    CoefficientModel model;
    int n = 0;
    double t_final = 0.0;
    double dt = 0.0;
    int replicas = 1;
    std::uint64_t seed = 0;
    std::optional<GridExtent> grid; // auto-derived from the limit law if absent
    std::vector<double> checkpoints;
    std::string outputs = "out";
    int workers = 1;
};

// Parses and validates a JSON config file.  ParseError carries the bad
// field or JSON position; ValidationError names the violated invariant.
RunConfig load_config(const std::string& path);

// Same, from an in-memory JSON document.
RunConfig parse_config(const std::string& text);

// FNV-1a digest of the canonical serialization of the semantic fields
// (model, n, t_final, dt, replicas, seed, grid, checkpoints).  Worker count
// and output paths do not affect results and are excluded.
std::uint64_t config_digest(const RunConfig& cfg);

} // namespace rankdiff
