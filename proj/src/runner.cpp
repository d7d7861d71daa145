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

#include "rankdiff/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankdiff/analysis.hpp"
#include "rankdiff/init_law.hpp"
#include "rankdiff/output.hpp"
#include "rankdiff/parallel.hpp"
#include "rankdiff/particle.hpp"
#include "rankdiff/pme.hpp"

namespace rankdiff {

namespace {

using nlohmann::json;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size()) {
            throw ParseError("ragged CSV row in " + path);
        }
        std::vector<double> row(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            char* end = nullptr;
            row[k] = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str()) {
                throw ParseError("non-numeric CSV cell \"" + cells[k] + "\" in " +
                                 path);
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("CSV file has no header row: " + path);
    return table;
}

std::string replica_file(const char* stem, int replica) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_r%03d.csv", stem, replica);
    return buf;
}

GridExtent effective_extent(const RunConfig& cfg, const LimitLaw& law) {
    if (cfg.grid) return *cfg.grid;
    return derive_extent(law, cfg.model, cfg.t_final, 0.01);
}

GridCdf grid_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.columns != std::vector<std::string>{"x", "w"}) {
        throw ParseError("initial CDF CSV must have columns x,w");
    }
    if (table.rows.size() < 3) throw ValidationError("initial CDF needs >= 3 rows");
    GridCdf g;
    g.x_min = table.rows.front()[0];
    g.dx = table.rows[1][0] - table.rows[0][0];
    if (!(g.dx > 0.0)) throw ValidationError("initial CDF grid must increase");
    g.w.reserve(table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const double x = table.rows[k][0];
        const double expect = g.x_min + g.dx * static_cast<double>(k);
        if (std::fabs(x - expect) > 1e-9 * std::max(1.0, std::fabs(expect))) {
            throw ValidationError("initial CDF grid is not uniformly spaced");
        }
        g.w.push_back(table.rows[k][1]);
    }
    for (std::size_t k = 0; k < g.w.size(); ++k) {
        if (g.w[k] < -1e-12 || g.w[k] > 1.0 + 1e-12) {
            throw ValidationError("initial CDF values must lie in [0,1]");
        }
        if (k > 0 && g.w[k] < g.w[k - 1]) {
            throw ValidationError("initial CDF must be nondecreasing");
        }
    }
    if (std::fabs(g.w.front()) > 1e-6 || std::fabs(g.w.back() - 1.0) > 1e-6) {
        throw ValidationError("initial CDF must reach 0 and 1 at the grid ends");
    }
    g.w.front() = 0.0;
    g.w.back() = 1.0;
    return g;
}

// Shared replica driver for simulate.
std::vector<std::vector<ParticleState>> run_all_replicas(const RunConfig& cfg,
                                                         int workers) {
    const GapRates rates = compute_gap_rates(cfg.model, cfg.n);
    std::vector<std::vector<ParticleState>> out(cfg.replicas);
    parallel_for_index(static_cast<std::size_t>(cfg.replicas), workers,
                       [&](std::size_t r) {
                           out[r] = run_replica(cfg.model, rates, cfg.t_final,
                                                cfg.dt, cfg.checkpoints,
                                                derive_seed(cfg.seed, r));
                       });
    return out;
}

} // namespace

void cmd_init(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const std::uint64_t digest = config_digest(cfg);
    const GapRates rates = compute_gap_rates(cfg.model, cfg.n);
    const LimitLaw law(cfg.model);

    AtomicFile rates_file(out_dir / "rates.csv");
    write_replay_header(rates_file.stream(), digest, cfg.seed);
    rates_file.stream() << "i,rate\n";
    for (int i = 1; i <= cfg.n - 1; ++i) {
        rates_file.stream() << i << "," << format_g17(rates.rates[i - 1]) << "\n";
    }

    AtomicFile quant_file(out_dir / "quantiles.csv");
    write_replay_header(quant_file.stream(), digest, cfg.seed);
    quant_file.stream() << "u,m,v,q_infinity\n";
    for (int k = 1; k <= 99; ++k) {
        const double u = static_cast<double>(k) / 100.0;
        const QuantileStats qs = quantile_stats(rates, u);
        quant_file.stream() << format_g17(u) << "," << format_g17(qs.m) << ","
                            << format_g17(qs.v) << ","
                            << format_g17(law.quantile(u)) << "\n";
    }

    rates_file.commit();
    quant_file.commit();
}

void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const std::uint64_t digest = config_digest(cfg);
    const auto replicas = run_all_replicas(cfg, cfg.workers);
    for (int r = 0; r < cfg.replicas; ++r) {
        const auto& states = replicas[r];
        const std::uint64_t stream = derive_seed(cfg.seed, r);

        AtomicFile by_id(out_dir / replica_file("checkpoints", r));
        write_replay_header(by_id.stream(), digest, stream);
        by_id.stream() << "t,particle_id,position\n";
        for (const auto& s : states) {
            for (int i = 0; i < s.n(); ++i) {
                by_id.stream() << format_g17(s.t) << "," << i << ","
                               << format_g17(s.positions[i]) << "\n";
            }
        }

        AtomicFile by_rank(out_dir / replica_file("sorted", r));
        write_replay_header(by_rank.stream(), digest, stream);
        by_rank.stream() << "t,rank,position\n";
        for (const auto& s : states) {
            const EmpiricalMeasure e = make_empirical(s);
            for (int i = 0; i < e.n(); ++i) {
                by_rank.stream() << format_g17(e.t) << "," << (i + 1) << ","
                                 << format_g17(e.sorted[i]) << "\n";
            }
        }
        by_id.commit();
        by_rank.commit();
    }
}

void cmd_pde(const RunConfig& cfg, const std::filesystem::path& out_dir,
             const std::optional<std::string>& initial_csv,
             std::optional<double> forced_dt) {
    const std::uint64_t digest = config_digest(cfg);
    const LimitLaw law(cfg.model);
    const GridCdf initial = initial_csv
                                ? grid_from_csv(*initial_csv)
                                : sample_limit_cdf(law, effective_extent(cfg, law));
    const PdeSolution sol = solve_pme(initial, cfg.model, cfg.t_final,
                                      cfg.checkpoints, 0.9, forced_dt);

    AtomicFile csv(out_dir / "solution.csv");
    write_replay_header(csv.stream(), digest, cfg.seed);
    csv.stream() << "t,x,w\n";
    for (const auto& snap : sol.snapshots) {
        for (int j = 0; j < snap.nodes(); ++j) {
            csv.stream() << format_g17(snap.t) << "," << format_g17(snap.node(j))
                         << "," << format_g17(snap.w[j]) << "\n";
        }
    }

    AtomicFile meta(out_dir / "meta.json");
    json doc;
    doc["dx"] = sol.dx;
    doc["dt"] = sol.dt;
    doc["x_min"] = initial.x_min;
    doc["x_max"] = initial.x_max();
    doc["cfl_safety"] = sol.cfl_safety;
    doc["config"] = hex_digest(digest);
    doc["seed"] = cfg.seed;
    meta.stream() << doc.dump(2) << "\n";

    csv.commit();
    meta.commit();
}

void cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const std::uint64_t digest = config_digest(cfg);
    const auto rows = lln_report(cfg, cfg.workers);

    AtomicFile report(out_dir / "report.jsonl");
    {
        json header;
        header["config"] = hex_digest(digest);
        header["seed"] = cfg.seed;
        report.stream() << header.dump() << "\n";
    }
    for (const auto& row : rows) {
        json line;
        line["t"] = row.t;
        line["ks"] = row.ks;
        line["w1"] = row.w1;
        line["n"] = row.n;
        line["seed"] = row.seed;
        report.stream() << line.dump() << "\n";
    }

    AtomicFile summary(out_dir / "summary.csv");
    write_replay_header(summary.stream(), digest, cfg.seed);
    summary.stream() << "n,t,mean_ks,max_ks,mean_w1,max_w1\n";
    for (const auto& s : summarize_reports(rows)) {
        summary.stream() << cfg.n << "," << format_g17(s.t) << ","
                         << format_g17(s.mean_ks) << "," << format_g17(s.max_ks)
                         << "," << format_g17(s.mean_w1) << ","
                         << format_g17(s.max_w1) << "\n";
    }

    report.commit();
    summary.commit();
}

void cmd_capital_curve(const RunConfig& cfg,
                       const std::filesystem::path& out_dir, int market_size,
                       std::vector<int> j_list, bool upper_rank) {
    const std::uint64_t digest = config_digest(cfg);
    if (j_list.empty()) {
        j_list.resize(market_size);
        for (int j = 1; j <= market_size; ++j) j_list[j - 1] = j;
    }
    const LimitLaw law(cfg.model);
    const GridCdf initial = sample_limit_cdf(law, effective_extent(cfg, law));
    const std::vector<double> final_only{cfg.t_final};
    const PdeSolution sol =
        solve_pme(initial, cfg.model, cfg.t_final, final_only, 0.9);
    const auto points = capital_curve(
        sol.snapshots.back(), market_size, j_list,
        upper_rank ? RankQuantile::upper_rank : RankQuantile::mid_rank);

    AtomicFile csv(out_dir / "capital.csv");
    write_replay_header(csv.stream(), digest, cfg.seed);
    csv.stream() << "j,u,x\n";
    for (const auto& p : points) {
        csv.stream() << p.j << "," << format_g17(p.u) << "," << format_g17(p.x)
                     << "\n";
    }
    csv.commit();
}

void cmd_diagnose(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  double epsilon, int replicas) {
    const std::uint64_t digest = config_digest(cfg);
    const GapRates rates = compute_gap_rates(cfg.model, cfg.n);
    const CounterRng rng(cfg.seed);
    const GapDiagnostics diag =
        stationary_diagnostics(rates, epsilon, replicas, rng);

    AtomicFile csv(out_dir / "diagnostics.csv");
    write_replay_header(csv.stream(), digest, cfg.seed);
    csv.stream() << "n,epsilon,mean_abs_displacement,close_pair_fraction\n";
    csv.stream() << cfg.n << "," << format_g17(epsilon) << ","
                 << format_g17(diag.mean_abs_displacement) << ","
                 << format_g17(diag.close_pair_fraction) << "\n";
    csv.commit();
}

void cmd_residual(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  const std::string& input_csv, std::vector<double> centers,
                  double width) {
    const std::uint64_t digest = config_digest(cfg);
    const CsvTable table = read_csv(input_csv);

    std::vector<GridCdf> grid_path;
    std::vector<EmpiricalMeasure> particle_path;
    if (table.columns == std::vector<std::string>{"t", "x", "w"}) {
        for (const auto& row : table.rows) {
            if (grid_path.empty() || row[0] != grid_path.back().t) {
                GridCdf g;
                g.t = row[0];
                g.x_min = row[1];
                g.dx = 0.0;
                grid_path.push_back(std::move(g));
            }
            GridCdf& g = grid_path.back();
            if (g.w.size() == 1) g.dx = row[1] - g.x_min;
            g.w.push_back(row[2]);
        }
        for (const auto& g : grid_path) {
            if (g.nodes() < 3 || !(g.dx > 0.0)) {
                throw ValidationError("stored PDE snapshots are too short");
            }
        }
    } else if (table.columns == std::vector<std::string>{"t", "rank", "position"}) {
        for (const auto& row : table.rows) {
            if (particle_path.empty() || row[0] != particle_path.back().t) {
                EmpiricalMeasure e;
                e.t = row[0];
                particle_path.push_back(std::move(e));
            }
            particle_path.back().sorted.push_back(row[2]);
        }
    } else {
        throw ParseError(
            "residual input must be a t,x,w PDE file or a t,rank,position snapshot file");
    }

    AtomicFile csv(out_dir / "residuals.csv");
    write_replay_header(csv.stream(), digest, cfg.seed);
    csv.stream() << "center,width,residual\n";
    for (const double center : centers) {
        const BumpFunction bump{center, width};
        const double value =
            grid_path.empty()
                ? mv_residual(particle_path, cfg.model, bump).residual
                : mv_residual(grid_path, cfg.model, bump).residual;
        csv.stream() << format_g17(center) << "," << format_g17(width) << ","
                     << format_g17(value) << "\n";
    }
    csv.commit();
}

int run_subcommand(const std::vector<std::string>& args) {
    CLI::App app{"rank-based interacting diffusions laboratory"};
    app.name("rankdiff");
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out;
        std::uint64_t seed = 0;
        bool seed_set = false;
        int workers = 0;
        bool workers_set = false;
    };
    auto add_common = [](CLI::App* sub, Common& c) {
        sub->add_option("--config", c.config, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", c.out, "output directory (overrides config)");
        sub->add_option("--seed", c.seed, "seed (overrides config)")
            ->each([&c](const std::string&) { c.seed_set = true; });
        sub->add_option("--workers", c.workers, "worker threads (overrides config)")
            ->each([&c](const std::string&) { c.workers_set = true; });
    };

    Common common_init, common_sim, common_pde, common_cmp, common_cap,
        common_diag, common_res;
    CLI::App* sub_init = app.add_subcommand("init", "gap rates and quantile tables");
    add_common(sub_init, common_init);
    CLI::App* sub_sim = app.add_subcommand("simulate", "particle checkpoints");
    add_common(sub_sim, common_sim);

    CLI::App* sub_pde = app.add_subcommand("pde", "solve the limiting CDF equation");
    add_common(sub_pde, common_pde);
    std::string pde_initial;
    double pde_dt = 0.0;
    bool pde_dt_set = false;
    sub_pde->add_option("--initial", pde_initial,
                        "initial CDF CSV (columns x,w); default: limiting law");
    sub_pde->add_option("--pde-dt", pde_dt, "force an explicit time step")
        ->each([&pde_dt_set](const std::string&) { pde_dt_set = true; });

    CLI::App* sub_cmp =
        app.add_subcommand("compare", "distances between particles and the PDE");
    add_common(sub_cmp, common_cmp);

    CLI::App* sub_cap =
        app.add_subcommand("capital-curve", "ranked quantiles of the final CDF");
    add_common(sub_cap, common_cap);
    int market_size = 0;
    std::vector<int> j_list;
    bool upper_rank = false;
    sub_cap->add_option("--market-size", market_size, "number of ranked firms")
        ->required();
    sub_cap->add_option("--j", j_list, "ranks to report (default: all)");
    sub_cap->add_flag("--upper-rank", upper_rank,
                      "use the (N-j+1)/N quantile convention (j >= 2)");

    CLI::App* sub_diag =
        app.add_subcommand("diagnose", "stationary-configuration statistics");
    add_common(sub_diag, common_diag);
    double epsilon = 0.01;
    int mc_replicas = 1000;
    sub_diag->add_option("--epsilon", epsilon, "closeness window (default 0.01)");
    sub_diag->add_option("--mc-replicas", mc_replicas,
                         "Monte Carlo replicas (default 1000)");

    CLI::App* sub_res =
        app.add_subcommand("residual", "weak-form residuals of stored output");
    add_common(sub_res, common_res);
    std::string res_input;
    std::vector<double> res_centers;
    double res_width = 2.0;
    sub_res->add_option("--input", res_input, "stored solution or snapshot CSV")
        ->required();
    sub_res->add_option("--centers", res_centers,
                        "bump centers (default -2,-1,0,1,2)");
    sub_res->add_option("--width", res_width, "bump width (default 2)");

    std::vector<const char*> argv;
    argv.push_back("rankdiff");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto dispatch = [&](const Common& c, auto&& body) {
        RunConfig cfg = load_config(c.config);
        if (c.seed_set) cfg.seed = c.seed;
        if (c.workers_set) cfg.workers = c.workers;
        const std::filesystem::path out_dir = c.out.empty() ? cfg.outputs : c.out;
        body(cfg, out_dir);
        return 0;
    };

    try {
        if (sub_init->parsed()) {
            return dispatch(common_init, [](const RunConfig& cfg, const auto& out) {
                cmd_init(cfg, out);
            });
        }
        if (sub_sim->parsed()) {
            return dispatch(common_sim, [](const RunConfig& cfg, const auto& out) {
                cmd_simulate(cfg, out);
            });
        }
        if (sub_pde->parsed()) {
            return dispatch(common_pde, [&](const RunConfig& cfg, const auto& out) {
                cmd_pde(cfg, out,
                        pde_initial.empty()
                            ? std::nullopt
                            : std::optional<std::string>(pde_initial),
                        pde_dt_set ? std::optional<double>(pde_dt) : std::nullopt);
            });
        }
        if (sub_cmp->parsed()) {
            return dispatch(common_cmp, [](const RunConfig& cfg, const auto& out) {
                cmd_compare(cfg, out);
            });
        }
        if (sub_cap->parsed()) {
            return dispatch(common_cap, [&](const RunConfig& cfg, const auto& out) {
                cmd_capital_curve(cfg, out, market_size, j_list, upper_rank);
            });
        }
        if (sub_diag->parsed()) {
            return dispatch(common_diag, [&](const RunConfig& cfg, const auto& out) {
                cmd_diagnose(cfg, out, epsilon, mc_replicas);
            });
        }
        if (sub_res->parsed()) {
            return dispatch(common_res, [&](const RunConfig& cfg, const auto& out) {
                cmd_residual(cfg, out, res_input, res_centers.empty()
                                                      ? std::vector<double>{-2, -1, 0, 1, 2}
                                                      : res_centers,
                             res_width);
            });
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace rankdiff
