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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rankdiff/config.hpp"
#include "rankdiff/output.hpp"
#include "rankdiff/runner.hpp"

using namespace rankdiff;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"({
  "model": {"mu0": 0.5, "mu1": -1.0, "c": 0.0, "d": 1.0},
  "n": 60,
  "t_final": 0.1,
  "dt": 0.01
})";

const char* kSmallRun = R"({
  "model": {"mu0": 0.5, "mu1": -1.0, "c": 0.0, "d": 1.0},
  "n": 120,
  "t_final": 0.05,
  "dt": 0.01,
  "replicas": 3,
  "seed": 21,
  "checkpoints": [0.0, 0.05],
  "grid": {"x_min": -9.0, "x_max": 9.0, "dx": 0.05}
})";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("rankdiff_" + tag + "_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& content) {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << content;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal config gets defaults") {
    const RunConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.n == 60);
    CHECK(cfg.replicas == 1);
    CHECK(cfg.seed == 0);
    CHECK(cfg.workers == 1);
    CHECK(!cfg.grid.has_value());
    REQUIRE(cfg.checkpoints.size() == 1);
    CHECK(cfg.checkpoints[0] == cfg.t_final);
    CHECK(cfg.outputs == "out");
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config("not json"), ParseError);
    CHECK_THROWS_AS(parse_config("[1,2]"), ParseError);

    // Unknown fields are rejected at every level.
    CHECK_THROWS_AS(parse_config(R"({"model": {"mu0":0.5,"mu1":-1,"c":0,"d":1},
        "n": 10, "t_final": 0.1, "dt": 0.01, "typo_field": 3})"),
                    ParseError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"mu0":0.5,"mu1":-1,"c":0,"d":1,
        "slope": 2}, "n": 10, "t_final": 0.1, "dt": 0.01})"),
                    ParseError);

    // Lattice violations.
    CHECK_THROWS_AS(parse_config(R"({"model": {"mu0":0.5,"mu1":-1,"c":0,"d":1},
        "n": 10, "t_final": 1.0005, "dt": 0.001})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"mu0":0.5,"mu1":-1,"c":0,"d":1},
        "n": 10, "t_final": 0.1, "dt": 0.01, "checkpoints": [0.005]})"),
                    ValidationError);

    // Invalid model propagates the model errors.
    CHECK_THROWS_AS(parse_config(R"({"model": {"mu0":0.5,"mu1":1,"c":0,"d":1},
        "n": 10, "t_final": 0.1, "dt": 0.01})"),
                    NonDecreasingDrift);

    // Checkpoints snap when within rounding noise of the lattice.
    const RunConfig snapped = parse_config(
        R"({"model": {"mu0":0.5,"mu1":-1,"c":0,"d":1}, "n": 10,
            "t_final": 0.30000000000000004, "dt": 0.1,
            "checkpoints": [0.30000000000000004]})");
    CHECK(snapped.checkpoints[0] == snapped.t_final);
}

TEST_CASE("config digest tracks semantic fields") {
    RunConfig a = parse_config(kSmallRun);
    RunConfig b = parse_config(kSmallRun);
    CHECK(config_digest(a) == config_digest(b));
    b.seed += 1;
    CHECK(config_digest(a) != config_digest(b));
    a.workers = 8; // excluded from the digest
    CHECK(config_digest(a) == config_digest(parse_config(kSmallRun)));
}

TEST_CASE("g17 formatting round-trips doubles") {
    for (const double v : {1.0 / 3.0, 0.1, 1e-17, 12345.678901234567,
                           -2.2250738585072014e-308, 0.0}) {
        const std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("atomic files appear only on commit") {
    TempDir dir("atomic");
    const fs::path target = dir.path / "sub" / "file.csv";
    {
        AtomicFile f(target);
        f.stream() << "data\n";
        CHECK(!fs::exists(target));
    }
    CHECK(!fs::exists(target)); // dropped without commit
    {
        AtomicFile f(target);
        f.stream() << "data\n";
        f.commit();
    }
    CHECK(fs::exists(target));
    CHECK(slurp(target) == "data\n");
}

TEST_CASE("init subcommand writes tables with replay headers") {
    TempDir dir("init");
    const std::string cfg = write_file(dir, "cfg.json", kMinimalConfig);
    const int rc = run_subcommand(
        {"init", "--config", cfg, "--out", dir.file("o")});
    CHECK(rc == 0);
    const std::string rates = slurp(dir.path / "o" / "rates.csv");
    CHECK(rates.rfind("# config=", 0) == 0);
    CHECK(rates.find("i,rate\n") != std::string::npos);
    CHECK(fs::exists(dir.path / "o" / "quantiles.csv"));

    // Re-running produces byte-identical outputs.
    const std::string before = rates;
    CHECK(run_subcommand({"init", "--config", cfg, "--out", dir.file("o")}) == 0);
    CHECK(slurp(dir.path / "o" / "rates.csv") == before);
}

TEST_CASE("exit codes distinguish rejected inputs") {
    TempDir dir("exit");
    CHECK(run_subcommand({"init", "--config", dir.file("missing.json"),
                          "--out", dir.file("o")}) == 2);
    const std::string bad = write_file(dir, "bad.json",
                                       R"({"model": {"mu0":0.5,"mu1":-1,
        "c":0,"d":1}, "n": 10, "t_final": 0.1, "dt": 0.01, "bogus": 1})");
    CHECK(run_subcommand({"init", "--config", bad, "--out", dir.file("o")}) == 2);
    CHECK(run_subcommand({"bogus-subcommand"}) == 2);
}

TEST_CASE("pde subcommand and forced time steps") {
    TempDir dir("pde");
    const std::string cfg = write_file(dir, "cfg.json", kSmallRun);
    CHECK(run_subcommand({"pde", "--config", cfg, "--out", dir.file("p")}) == 0);
    CHECK(fs::exists(dir.path / "p" / "solution.csv"));
    CHECK(fs::exists(dir.path / "p" / "meta.json"));

    // A user-forced step above the CFL bound is rejected, and the failed
    // run leaves no output behind.
    const int rc = run_subcommand({"pde", "--config", cfg, "--out",
                                   dir.file("q"), "--pde-dt", "0.5"});
    CHECK(rc == 2);
    CHECK(!fs::exists(dir.path / "q" / "solution.csv"));
}

TEST_CASE("compare output does not depend on the worker count") {
    TempDir dir("cmp");
    const std::string cfg = write_file(dir, "cfg.json", kSmallRun);
    for (const char* workers : {"1", "2", "8"}) {
        CHECK(run_subcommand({"compare", "--config", cfg, "--out",
                              dir.file(std::string("w") + workers),
                              "--workers", workers}) == 0);
    }
    const std::string r1 = slurp(dir.path / "w1" / "report.jsonl");
    CHECK(r1 == slurp(dir.path / "w2" / "report.jsonl"));
    CHECK(r1 == slurp(dir.path / "w8" / "report.jsonl"));
    const std::string s1 = slurp(dir.path / "w1" / "summary.csv");
    CHECK(s1 == slurp(dir.path / "w2" / "summary.csv"));
    CHECK(s1 == slurp(dir.path / "w8" / "summary.csv"));
    CHECK(r1.rfind("{\"config\":", 0) == 0);
}

TEST_CASE("simulate, residual, capital-curve and diagnose round trip") {
    TempDir dir("all");
    const std::string cfg = write_file(dir, "cfg.json", kSmallRun);

    CHECK(run_subcommand({"simulate", "--config", cfg, "--out",
                          dir.file("sim")}) == 0);
    CHECK(fs::exists(dir.path / "sim" / "checkpoints_r000.csv"));
    CHECK(fs::exists(dir.path / "sim" / "sorted_r002.csv"));

    // Residuals from the stored particle snapshots.
    CHECK(run_subcommand({"residual", "--config", cfg, "--out", dir.file("resp"),
                          "--input", dir.file("sim/sorted_r000.csv")}) == 0);
    const std::string p_res = slurp(dir.path / "resp" / "residuals.csv");
    CHECK(p_res.find("center,width,residual") != std::string::npos);

    // Residuals from a stored PDE solution.
    CHECK(run_subcommand({"pde", "--config", cfg, "--out", dir.file("pde")}) == 0);
    CHECK(run_subcommand({"residual", "--config", cfg, "--out", dir.file("resg"),
                          "--input", dir.file("pde/solution.csv")}) == 0);
    CHECK(fs::exists(dir.path / "resg" / "residuals.csv"));

    CHECK(run_subcommand({"capital-curve", "--config", cfg, "--out",
                          dir.file("cap"), "--market-size", "6"}) == 0);
    const std::string cap = slurp(dir.path / "cap" / "capital.csv");
    // Header comment + column row + six ranks.
    CHECK(std::count(cap.begin(), cap.end(), '\n') == 8);

    CHECK(run_subcommand({"diagnose", "--config", cfg, "--out", dir.file("di"),
                          "--mc-replicas", "50"}) == 0);
    CHECK(fs::exists(dir.path / "di" / "diagnostics.csv"));
}

TEST_CASE("pde accepts a stored initial CDF") {
    TempDir dir("init_cdf");
    const std::string cfg = write_file(dir, "cfg.json", kSmallRun);
    std::ostringstream csv;
    csv << "x,w\n";
    const int nodes = 41;
    for (int j = 0; j < nodes; ++j) {
        const double x = -10.0 + 0.5 * j;
        const double w =
            j == 0 ? 0.0 : (j == nodes - 1 ? 1.0 : 1.0 / (1.0 + std::exp(-x)));
        csv << format_g17(x) << "," << format_g17(w) << "\n";
    }
    const std::string initial = write_file(dir, "initial.csv", csv.str());
    CHECK(run_subcommand({"pde", "--config", cfg, "--out", dir.file("p"),
                          "--initial", initial}) == 0);

    const std::string broken = write_file(dir, "broken.csv", "x,w\n0,0\n1,0.5\n2,0.9\n");
    CHECK(run_subcommand({"pde", "--config", cfg, "--out", dir.file("pb"),
                          "--initial", broken}) == 2);
}
