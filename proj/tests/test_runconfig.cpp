#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modbox/field.hpp"
#include "modbox/runconfig.hpp"

using namespace modbox;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json norm_config() {
    return json::parse(R"({
        "grid": {"d": 1, "N": 256, "L": 16.0},
        "field": {"type": "zero"},
        "norms": [{"p": 2, "q": 1, "s": 0}],
        "seed": 5
    })");
}
}  // namespace

TEST_CASE("unknown keys are rejected, documentation keys pass") {
    RunConfig cfg;
    cfg.subcommand = "norm";
    cfg.out_dir = "rc_out_a";
    cfg.config = norm_config();
    cfg.config["surprise"] = 1;
    CHECK(run(cfg) == 2);
    cfg.config.erase("surprise");
    cfg.config["_comment"] = "documentation keys are ignored";
    CHECK(run(cfg) == 0);
    fs::remove_all("rc_out_a");
}

TEST_CASE("norm of the zero field is zero and exits cleanly") {
    RunConfig cfg;
    cfg.subcommand = "norm";
    cfg.out_dir = "rc_out_b";
    cfg.config = norm_config();
    CHECK(run(cfg) == 0);
    std::string csv = slurp("rc_out_b/norms.csv");
    CHECK(csv.find(",0,") != std::string::npos);
    CHECK(csv.find("field_id") != std::string::npos);
    fs::remove_all("rc_out_b");
}

TEST_CASE("validation gate: dt > T exits with status 2") {
    RunConfig cfg;
    cfg.subcommand = "evolve";
    cfg.out_dir = "rc_out_c";
    cfg.config = json::parse(R"({
        "grid": {"d": 1, "N": 64, "L": 8.0},
        "equation": "fhnls",
        "kernel": {"type": "riesz", "lambda": 1.0, "gamma": 0.5},
        "data": {"u0": {"type": "gaussian", "scale": 0.1}},
        "method": "strang",
        "T": 1.0,
        "dt": 2.0
    })");
    CHECK(run(cfg) == 2);
    fs::remove_all("rc_out_c");
}

TEST_CASE("a small evolve run writes its artifacts") {
    RunConfig cfg;
    cfg.subcommand = "evolve";
    cfg.out_dir = "rc_out_d";
    cfg.config = json::parse(R"({
        "grid": {"d": 1, "N": 64, "L": 8.0},
        "equation": "fhnls",
        "kernel": {"type": "riesz", "lambda": 1.0, "gamma": 0.5},
        "data": {"u0": {"type": "gaussian", "scale": 0.05}},
        "method": "strang",
        "T": 0.2,
        "dt": 0.01,
        "snapshot_stride": 10,
        "tracked_norms": [{"p": 2, "q": 1, "s": 0}],
        "scattering": false,
        "seed": 3
    })");
    CHECK(run(cfg) == 0);
    CHECK(fs::exists("rc_out_d/report.json"));
    CHECK(fs::exists("rc_out_d/diagnostics.csv"));
    CHECK(fs::exists("rc_out_d/u_000000.mspf"));
    json rep = json::parse(slurp("rc_out_d/report.json"));
    CHECK(rep.at("termination") == "completed");
    CHECK(rep.contains("config_hash"));
    CHECK(rep.contains("conventions"));
    fs::remove_all("rc_out_d");
}

TEST_CASE("identical configs produce byte-identical artifacts") {
    for (std::string sub : {std::string("norm")}) {
        RunConfig cfg;
        cfg.subcommand = sub;
        cfg.config = norm_config();
        cfg.config["fields"] = json{{"kind", "random_bandlimited"},
                                    {"seed", 9},
                                    {"count", 5},
                                    {"band", 4.0}};
        cfg.config.erase("field");
        cfg.out_dir = "rc_out_e1";
        CHECK(run(cfg) == 0);
        cfg.out_dir = "rc_out_e2";
        CHECK(run(cfg) == 0);
        CHECK(slurp("rc_out_e1/norms.csv") == slurp("rc_out_e2/norms.csv"));
        CHECK(!slurp("rc_out_e1/norms.csv").empty());
        fs::remove_all("rc_out_e1");
        fs::remove_all("rc_out_e2");
    }
}

TEST_CASE("admissible subcommand reports the exact witness") {
    RunConfig cfg;
    cfg.subcommand = "admissible";
    cfg.out_dir = "rc_out_f";
    cfg.config = json{{"equation", "kg"}, {"d", 5}, {"p", "5/2"}, {"r", "3"},
                      {"third_condition", "reciprocal"}, {"sweep", false}};
    CHECK(run(cfg) == 0);
    json out = json::parse(slurp("rc_out_f/admissible.json"));
    CHECK(out.at("feasible") == true);
    CHECK(out.at("beta") == "3");
    fs::remove_all("rc_out_f");
}

TEST_CASE("admissible sweep emits the region scan") {
    RunConfig cfg;
    cfg.subcommand = "admissible";
    cfg.out_dir = "rc_out_g";
    cfg.config = json{{"equation", "kg"}, {"d", 5}, {"sweep", true}};
    CHECK(run(cfg) == 0);
    std::string csv = slurp("rc_out_g/admissible_region.csv");
    CHECK(csv.find("d,p,r,feasible,case_tag") != std::string::npos);
    CHECK(csv.find(",1,") != std::string::npos);  // some feasible cell
    fs::remove_all("rc_out_g");
}

TEST_CASE("embed subcommand round-trips the exact tau") {
    RunConfig cfg;
    cfg.subcommand = "embed";
    cfg.out_dir = "rc_out_h";
    cfg.config = json{{"d", 3}, {"p", "2"}, {"q", "1"}, {"s1", "0"}, {"s2", "-3/2"},
                      {"witness", false}};
    CHECK(run(cfg) == 0);
    json out = json::parse(slurp("rc_out_h/embed.json"));
    CHECK(out.at("holds") == false);
    CHECK(out.at("tau") == "3/2");
    fs::remove_all("rc_out_h");
}

TEST_CASE("verify subcommand writes report and ratios") {
    RunConfig cfg;
    cfg.subcommand = "verify";
    cfg.estimate_id = "embedding_chain";
    cfg.out_dir = "rc_out_i";
    cfg.config = json::parse(R"({
        "grid": {"d": 1, "N": 256, "L": 16.0},
        "corpus": {"kind": "random_bandlimited", "seed": 4, "count": 12, "band": 4.0},
        "exponents": {"p": 2, "q1": 1, "q2": "inf"},
        "refine_check": false
    })");
    CHECK(run(cfg) == 0);
    json rep = json::parse(slurp("rc_out_i/report.json"));
    CHECK(rep.at("verdict") == "consistent");
    CHECK(fs::exists("rc_out_i/ratios.csv"));
    fs::remove_all("rc_out_i");
}

TEST_CASE("norm accepts a snapshot field source") {
    GridSpec g{1, 256, 16.0};
    SampledField f(g, Space::physical);
    for (int n = 0; n < g.N; ++n) {
        double x = g.coord(n);
        f.values[std::size_t(n)] = std::exp(-3.14159265358979323846 * x * x);
    }
    write_snapshot("rc_snap.mspf", f);
    RunConfig cfg;
    cfg.subcommand = "norm";
    cfg.out_dir = "rc_out_j";
    cfg.config = json::parse(R"({
        "grid": {"d": 1, "N": 256, "L": 16.0},
        "field": {"type": "snapshot", "path": "rc_snap.mspf"},
        "norms": [{"p": 2, "q": 2, "s": 0}]
    })");
    CHECK(run(cfg) == 0);
    CHECK(slurp("rc_out_j/norms.csv").find("0,2,2,0,") != std::string::npos);
    fs::remove("rc_snap.mspf");
    fs::remove_all("rc_out_j");
}

TEST_CASE("config hash is stable and key-order independent") {
    json a = json::parse(R"({"x": 1, "y": [1, 2]})");
    json b = json::parse(R"({"y": [1, 2], "x": 1})");
    CHECK(config_hash(a) == config_hash(b));  // nlohmann objects sort keys
    json c = a;
    c["x"] = 2;
    CHECK(config_hash(a) != config_hash(c));
}
