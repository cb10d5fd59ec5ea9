#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fraflow/config.hpp"
#include "fraflow/flow.hpp"
#include "fraflow/grid.hpp"
#include "fraflow/io.hpp"

using namespace fraflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("fraflow_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void put(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FRAFLOW_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

const char* kTinyIdentities =
    "[experiment]\n"
    "name = tiny\n"
    "seed = 7\n"
    "[params]\n"
    "d = 1\n"
    "s = 0\n"
    "m = 0.75\n"
    "M = 1\n"
    "[grid]\n"
    "n = 128\n"
    "L = 10\n";

}  // namespace

TEST_CASE("config defaults and parsing") {
    fs::path dir = fresh_dir("cfg");
    put(dir / "a.ini",
        "# comment\n"
        "[experiment]\n"
        "name = run-a\n"
        "seed = 99\n"
        "[params]\n"
        "d = 2\n"
        "s = 0.25\n"
        "m = 0.8125\n"
        "M = 2.5\n"
        "[integrator]\n"
        "T = 0.5\n"
        "init = gaussian\n"
        "; another comment\n"
        "[sweep]\n"
        "key = params.m\n"
        "values = 0.7, 0.75, 0.8\n"
        "run = gns\n");
    ExperimentConfig cfg = parse_config((dir / "a.ini").string());
    CHECK(cfg.name == "run-a");
    CHECK(cfg.seed == 99);
    CHECK(cfg.params.d == 2);
    CHECK(cfg.params.s == doctest::Approx(0.25));
    CHECK(cfg.params.m == doctest::Approx(0.8125));
    CHECK(cfg.params.M == doctest::Approx(2.5));
    CHECK(cfg.integrator.T == doctest::Approx(0.5));
    CHECK(cfg.integrator.init == "gaussian");
    CHECK(cfg.integrator.stride == doctest::Approx(0.02));  // default kept
    CHECK(cfg.grid.n == 512);                               // default kept
    REQUIRE(cfg.sweep.values.size() == 3);
    CHECK(cfg.sweep.values[1] == doctest::Approx(0.75));
}

TEST_CASE("config rejects unknown keys and bad values") {
    fs::path dir = fresh_dir("cfgbad");
    put(dir / "unknown.ini", "[params]\nbogus = 1\n");
    CHECK_THROWS_AS(parse_config((dir / "unknown.ini").string()), ConfigError);

    put(dir / "section.ini", "[nosuch]\nx = 1\n");
    CHECK_THROWS_AS(parse_config((dir / "section.ini").string()), ConfigError);

    put(dir / "value.ini", "[grid]\nn = twelve\n");
    CHECK_THROWS_AS(parse_config((dir / "value.ini").string()), ConfigError);

    put(dir / "model.ini", "[params]\nd = 1\ns = 0.4\nm = 0.9\n");
    CHECK_THROWS_AS(parse_config((dir / "model.ini").string()), ConfigError);

    CHECK_THROWS_AS(parse_config((dir / "missing.ini").string()), ConfigError);
}

TEST_CASE("render-parse round trip") {
    ExperimentConfig cfg;
    cfg.name = "round";
    cfg.seed = 1234;
    cfg.params = {2, 0.25, 0.8125, 1.5};
    cfg.grid.n = 96;
    cfg.grid.L = 14.5;
    cfg.integrator.T = 0.75;
    cfg.integrator.kappa_ref = 0.3;
    cfg.sweep.key = "params.s";
    cfg.sweep.values = {0.0, 0.25};
    cfg.sweep.run = "identities";

    fs::path dir = fresh_dir("render");
    put(dir / "echo.ini", render_config(cfg));
    ExperimentConfig back = parse_config((dir / "echo.ini").string());
    CHECK(back.name == cfg.name);
    CHECK(back.seed == cfg.seed);
    CHECK(back.params.m == doctest::Approx(cfg.params.m).epsilon(1e-15));
    CHECK(back.grid.L == doctest::Approx(cfg.grid.L).epsilon(1e-15));
    CHECK(back.integrator.kappa_ref == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(back.sweep.key == cfg.sweep.key);
    REQUIRE(back.sweep.values.size() == 2);
    CHECK(back.sweep.run == cfg.sweep.run);
}

TEST_CASE("trace csv carries the fixed header") {
    FlowTrace tr;
    DiagRecord r{};
    r.t = 0.5;
    r.mass = 1.0;
    r.entropy = 2.0;
    r.fisher = 3.0;
    r.renyi = 4.0;
    r.boundary_frac = 0.01;
    r.min_u = 1e-9;
    r.dt = 0.001;
    tr.records.push_back(r);

    fs::path dir = fresh_dir("csv");
    write_trace_csv((dir / "trace.csv").string(), tr);
    std::ifstream in(dir / "trace.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t,mass,entropy,fisher,renyi,boundary_frac,min_u");
    CHECK(row.substr(0, 4) == "0.5,");
}

TEST_CASE("field dumps carry a faithful sidecar") {
    Grid g(2, 16, 3.0);
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);

    fs::path dir = fresh_dir("dump");
    dump_field(dir.string(), "state", f);
    CHECK(fs::file_size(dir / "state.bin") == 256 * sizeof(double));

    json meta = json::parse(slurp(dir / "state.meta.json"));
    CHECK(meta["grid"]["dim"] == 2);
    CHECK(meta["grid"]["n"] == 16);
    CHECK(meta["grid"]["L"] == doctest::Approx(3.0));
    CHECK(meta["count"] == 256);
    CHECK(meta["dtype"] == "float64");
    CHECK(meta["byte_order"] == "little");
}

TEST_CASE("cli runs the identity checks end to end") {
    fs::path dir = fresh_dir("cli_id");
    put(dir / "cfg.ini", kTinyIdentities);
    fs::path out = dir / "out";
    const int rc = run_cli("identities --config " + (dir / "cfg.ini").string() +
                           " --out " + out.string());
    CHECK(rc == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["command"] == "identities");
    REQUIRE(summary.contains("verdicts"));
    for (const auto& v : summary["verdicts"]) CHECK(v["status"] == "PASS");
    CHECK(fs::exists(out / "resolved.ini"));
    CHECK(fs::exists(out / "run.log"));
}

TEST_CASE("cli summary is deterministic") {
    fs::path dir = fresh_dir("cli_det");
    put(dir / "cfg.ini", kTinyIdentities);
    const int r1 = run_cli("identities --config " + (dir / "cfg.ini").string() +
                           " --out " + (dir / "o1").string());
    const int r2 = run_cli("identities --config " + (dir / "cfg.ini").string() +
                           " --out " + (dir / "o2").string());
    CHECK(r1 == 0);
    CHECK(r2 == 0);
    CHECK(slurp(dir / "o1" / "summary.json") == slurp(dir / "o2" / "summary.json"));
    CHECK(!slurp(dir / "o1" / "summary.json").empty());
}

TEST_CASE("cli maps config problems to exit code 2") {
    fs::path dir = fresh_dir("cli_bad");
    put(dir / "bad.ini", "[params]\nbogus = 1\n");
    CHECK(run_cli("identities --config " + (dir / "bad.ini").string() +
                  " --out " + (dir / "out").string()) == 2);
    CHECK(run_cli("identities --config " + (dir / "nofile.ini").string() +
                  " --out " + (dir / "out2").string()) == 2);
}

TEST_CASE("cli sweep with no points succeeds with an empty summary") {
    fs::path dir = fresh_dir("cli_sweep0");
    put(dir / "cfg.ini", std::string(kTinyIdentities) +
                             "[sweep]\nkey = params.m\nrun = identities\n");
    fs::path out = dir / "out";
    CHECK(run_cli("sweep --config " + (dir / "cfg.ini").string() + " --out " +
                  out.string()) == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["points"].empty());
}

TEST_CASE("cli sweep fans out and aggregates") {
    fs::path dir = fresh_dir("cli_sweep");
    put(dir / "cfg.ini",
        std::string(kTinyIdentities) +
            "[sweep]\nkey = params.m\nvalues = 0.7, 0.8\nrun = identities\n");
    fs::path out = dir / "out";
    CHECK(run_cli("sweep --config " + (dir / "cfg.ini").string() + " --out " +
                  out.string() + " --threads 2") == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    REQUIRE(summary["results"]["points"].size() == 2);
    CHECK(summary["results"]["points"][0]["exit"] == 0);
    CHECK(fs::exists(out / "point_0" / "summary.json"));
    CHECK(fs::exists(out / "point_1" / "summary.json"));
}
