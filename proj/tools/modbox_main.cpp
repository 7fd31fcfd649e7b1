#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "modbox/runconfig.hpp"

using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw modbox::ConfigError("cannot open config file " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modbox: frequency-box decomposition norms, Hartree-type Cauchy solvers, "
                 "and an estimate verification harness on periodic grids"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", estimate;
    bool list = false;

    auto* norm = app.add_subcommand("norm", "evaluate modulation norms of fields");
    norm->add_option("--config", config_path, "JSON run config")->required();
    norm->add_option("--out", out_dir, "output directory");

    auto* evolve = app.add_subcommand("evolve", "evolve a Hartree-type Cauchy problem");
    evolve->add_option("--config", config_path, "JSON run config")->required();
    evolve->add_option("--out", out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "run an estimate verification");
    verify->add_option("--estimate", estimate, "estimate id (see --list)");
    verify->add_flag("--list", list, "list estimate ids");
    verify->add_option("--config", config_path, "JSON run config");
    verify->add_option("--out", out_dir, "output directory");

    std::string equation = "kg", p = "5/2", r = "3", q = "1", s1 = "0", s2 = "0";
    std::string third = "reciprocal";
    int d = 1;
    bool sweep = false, witness = false;
    int grid_n = 0;
    double grid_l = 0.0;

    auto* adm = app.add_subcommand("admissible", "decide admissibility of a (p, r) pair");
    adm->add_option("--equation", equation, "kg or schrodinger");
    adm->add_option("--d", d, "dimension");
    adm->add_option("--p", p, "exponent p (rational, e.g. 5/2)");
    adm->add_option("--r", r, "exponent r (rational or inf)");
    adm->add_option("--third-condition", third, "as_written | reciprocal | off");
    adm->add_flag("--sweep", sweep, "emit a feasibility scan CSV instead");
    adm->add_option("--out", out_dir, "output directory");

    auto* emb = app.add_subcommand("embed", "check a Sobolev-to-modulation embedding");
    emb->add_option("--d", d, "dimension");
    emb->add_option("--p", p, "exponent p");
    emb->add_option("--q", q, "exponent q");
    emb->add_option("--s1", s1, "source weight s1");
    emb->add_option("--s2", s2, "target weight s2");
    emb->add_flag("--witness", witness, "search growth witness families when it fails");
    emb->add_option("--grid-N", grid_n, "witness grid points per axis");
    emb->add_option("--grid-L", grid_l, "witness grid side length");
    emb->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        modbox::RunConfig cfg;
        cfg.out_dir = out_dir;
        if (norm->parsed()) {
            cfg.subcommand = "norm";
            cfg.config = load_config(config_path);
        } else if (evolve->parsed()) {
            cfg.subcommand = "evolve";
            cfg.config = load_config(config_path);
        } else if (verify->parsed()) {
            cfg.subcommand = "verify";
            cfg.estimate_id = estimate;
            cfg.list_estimates = list;
            cfg.config = config_path.empty() ? json::object() : load_config(config_path);
        } else if (adm->parsed()) {
            cfg.subcommand = "admissible";
            cfg.config = json{{"equation", equation == "kg" ? "kg" : equation},
                              {"d", d},
                              {"p", p},
                              {"r", r},
                              {"third_condition", third},
                              {"sweep", sweep}};
        } else if (emb->parsed()) {
            cfg.subcommand = "embed";
            cfg.config = json{{"d", d}, {"p", p}, {"q", q},
                              {"s1", s1}, {"s2", s2}, {"witness", witness}};
            if (grid_n > 0 && grid_l > 0.0)
                cfg.config["grid"] = json{{"d", d}, {"N", grid_n}, {"L", grid_l}};
        }
        return modbox::run(cfg);
    } catch (const modbox::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
