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

#include "rankdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rankdiff {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& obj, const char* where,
                           std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* name : allowed) {
            if (item.key() == name) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError(std::string("unknown field \"") + item.key() +
                             "\" in " + where);
        }
    }
}

double require_number(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) {
        throw ParseError(std::string("missing field \"") + key + "\" in " + where);
    }
    if (!obj[key].is_number()) {
        throw ParseError(std::string("field \"") + key + "\" in " + where +
                         " must be a number");
    }
    return obj[key].get<double>();
}

// Snap t to the dt lattice; reject offsets above the tolerance instead of
// rounding silently.
double snap_to_lattice(double t, double dt, const char* what) {
    const double k = std::round(t / dt);
    const double snapped = k * dt;
    if (std::fabs(snapped - t) > 1e-9 * std::max(1.0, std::fabs(t))) {
        throw ValidationError(std::string(what) +
                              " is not a multiple of dt: " + std::to_string(t));
    }
    return snapped;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");

    reject_unknown_fields(doc, "config",
                          {"model", "n", "t_final", "dt", "replicas", "seed",
                           "grid", "checkpoints", "outputs", "workers"});

    if (!doc.contains("model") || !doc["model"].is_object()) {
        throw ParseError("missing or non-object field \"model\" in config");
    }
    const json& jm = doc["model"];
    reject_unknown_fields(jm, "model", {"mu0", "mu1", "c", "d"});
    CoefficientModel model(
        require_number(jm, "mu0", "model"), require_number(jm, "mu1", "model"),
        require_number(jm, "c", "model"), require_number(jm, "d", "model"));

    RunConfig cfg{model};
    {
        const double n_raw = require_number(doc, "n", "config");
        cfg.n = static_cast<int>(n_raw);
        if (cfg.n != n_raw || cfg.n < 2) {
            throw ValidationError("n must be an integer >= 2");
        }
    }
    cfg.t_final = require_number(doc, "t_final", "config");
    cfg.dt = require_number(doc, "dt", "config");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(cfg.t_final >= 0.0)) throw ValidationError("t_final must be nonnegative");
    cfg.t_final = snap_to_lattice(cfg.t_final, cfg.dt, "t_final");

    if (doc.contains("replicas")) {
        const double r = require_number(doc, "replicas", "config");
        cfg.replicas = static_cast<int>(r);
        if (cfg.replicas != r || cfg.replicas < 1) {
            throw ValidationError("replicas must be an integer >= 1");
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()) {
            throw ParseError("field \"seed\" must be an integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("workers")) {
        const double wk = require_number(doc, "workers", "config");
        cfg.workers = static_cast<int>(wk);
        if (cfg.workers != wk || cfg.workers < 1) {
            throw ValidationError("workers must be an integer >= 1");
        }
    }
    if (doc.contains("outputs")) {
        if (!doc["outputs"].is_string()) {
            throw ParseError("field \"outputs\" must be a string");
        }
        cfg.outputs = doc["outputs"].get<std::string>();
    }
    if (doc.contains("grid")) {
        const json& jg = doc["grid"];
        if (!jg.is_object()) throw ParseError("field \"grid\" must be an object");
        reject_unknown_fields(jg, "grid", {"x_min", "x_max", "dx"});
        GridExtent e;
        e.x_min = require_number(jg, "x_min", "grid");
        e.x_max = require_number(jg, "x_max", "grid");
        e.dx = require_number(jg, "dx", "grid");
        if (!(e.dx > 0.0) || !(e.x_max > e.x_min)) {
            throw ValidationError("grid requires dx > 0 and x_max > x_min");
        }
        cfg.grid = e;
    }
    if (doc.contains("checkpoints")) {
        if (!doc["checkpoints"].is_array()) {
            throw ParseError("field \"checkpoints\" must be an array of numbers");
        }
        for (const auto& item : doc["checkpoints"]) {
            if (!item.is_number()) {
                throw ParseError("field \"checkpoints\" must be an array of numbers");
            }
            cfg.checkpoints.push_back(item.get<double>());
        }
    } else {
        cfg.checkpoints.push_back(cfg.t_final);
    }
    for (double& t : cfg.checkpoints) {
        if (t < 0.0 || t > cfg.t_final + 1e-9) {
            throw ValidationError("checkpoint outside [0, t_final]");
        }
        t = snap_to_lattice(t, cfg.dt, "checkpoint");
    }
    for (std::size_t k = 1; k < cfg.checkpoints.size(); ++k) {
        if (!(cfg.checkpoints[k] > cfg.checkpoints[k - 1])) {
            throw ValidationError("checkpoints must be strictly increasing");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::uint64_t config_digest(const RunConfig& cfg) {
    json doc;
    doc["model"] = {{"mu0", cfg.model.mu0()},
                    {"mu1", cfg.model.mu1()},
                    {"c", cfg.model.c()},
                    {"d", cfg.model.d()}};
    doc["n"] = cfg.n;
    doc["t_final"] = cfg.t_final;
    doc["dt"] = cfg.dt;
    doc["replicas"] = cfg.replicas;
    doc["seed"] = cfg.seed;
    if (cfg.grid) {
        doc["grid"] = {{"x_min", cfg.grid->x_min},
                       {"x_max", cfg.grid->x_max},
                       {"dx", cfg.grid->dx}};
    }
    doc["checkpoints"] = cfg.checkpoints;
    const std::string canon = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace rankdiff
