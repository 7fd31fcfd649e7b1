#include "modbox/runconfig.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "modbox/corpus.hpp"
#include "modbox/verify.hpp"

namespace modbox {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (!k.empty() && k[0] == '_') continue;  // documentation keys
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw ConfigError(path + ": unknown key '" + k + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

GridSpec parse_grid(const json& j, const std::string& path) {
    check_keys(j, {"d", "N", "L"}, path);
    GridSpec g;
    g.d = get_or(j, "d", 1);
    g.N = get_or(j, "N", 256);
    g.L = get_or(j, "L", 16.0);
    try {
        g.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return g;
}

NormSpec parse_norm(const json& j, const std::string& path) {
    check_keys(j, {"p", "q", "s"}, path);
    auto exp_of = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        const json& v = j.at(key);
        if (v.is_string()) return parse_exponent(v.get<std::string>()).to_double();
        return v.get<double>();
    };
    NormSpec n{exp_of("p", 2.0), exp_of("q", 2.0), exp_of("s", 0.0)};
    try {
        n.validate();
    } catch (const InvalidExponent& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return n;
}

CorpusSpec parse_corpus(const json& j, const std::string& path) {
    check_keys(j, {"kind", "seed", "count", "band", "widths", "modulations", "boxes"}, path);
    CorpusSpec c;
    std::string kind = get_or<std::string>(j, "kind", "random_bandlimited");
    if (kind == "random_bandlimited") c.kind = CorpusKind::random_bandlimited;
    else if (kind == "gaussian_family") c.kind = CorpusKind::gaussian_family;
    else if (kind == "single_box") c.kind = CorpusKind::single_box;
    else throw ConfigError(path + ".kind: unknown corpus kind '" + kind + "'");
    c.seed = get_or<std::uint64_t>(j, "seed", 1);
    c.count = get_or(j, "count", 100);
    c.band = get_or(j, "band", 4.0);
    if (j.contains("widths")) c.widths = j.at("widths").get<std::vector<double>>();
    auto parse_triples = [&](const char* key, std::vector<std::array<int, 3>>& out) {
        if (!j.contains(key)) return;
        out.clear();
        for (const json& t : j.at(key)) {
            std::array<int, 3> a{0, 0, 0};
            for (std::size_t i = 0; i < t.size() && i < 3; ++i) a[i] = t[i].get<int>();
            out.push_back(a);
        }
    };
    parse_triples("modulations", c.modulations);
    parse_triples("boxes", c.boxes);
    return c;
}

HartreeKernel parse_kernel(const json& j, const GridSpec& grid, const std::string& path) {
    check_keys(j, {"type", "lambda", "gamma", "power_k", "zero_mode", "sample_file",
                   "dealias"},
               path);
    HartreeKernel k;
    std::string type = get_or<std::string>(j, "type", "riesz");
    if (type == "riesz") k.kind = HartreeKernel::Kind::riesz;
    else if (type == "sampled") k.kind = HartreeKernel::Kind::sampled;
    else throw ConfigError(path + ".type: unknown kernel type '" + type + "'");
    k.lambda = get_or(j, "lambda", 1.0);
    k.gamma = get_or(j, "gamma", 0.5);
    k.power_k = get_or(j, "power_k", 1);
    k.dealias = get_or(j, "dealias", false);
    std::string zm = get_or<std::string>(j, "zero_mode", "box_average");
    if (zm == "zero") k.zero_mode = ZeroModePolicy::zero;
    else if (zm == "box_average") k.zero_mode = ZeroModePolicy::box_average;
    else throw ConfigError(path + ".zero_mode: must be 'zero' or 'box_average'");
    if (k.kind == HartreeKernel::Kind::sampled) {
        if (!j.contains("sample_file"))
            throw ConfigError(path + ": sampled kernel needs 'sample_file'");
        k.sampled = read_snapshot(j.at("sample_file").get<std::string>());
    }
    try {
        k.validate(grid);
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return k;
}

SampledField parse_field_source(const json& j, const GridSpec& grid,
                                const std::string& path) {
    check_keys(j, {"type", "path", "width", "modulation", "scale"}, path);
    std::string type = get_or<std::string>(j, "type", "gaussian");
    if (type == "snapshot") {
        if (!j.contains("path")) throw ConfigError(path + ": snapshot needs 'path'");
        SampledField f = read_snapshot(j.at("path").get<std::string>());
        if (!(f.grid == grid)) throw ConfigError(path + ": snapshot grid differs");
        if (f.space != Space::physical) f = transform(f, Direction::inverse);
        return f;
    }
    if (type == "gaussian") {
        std::array<int, 3> mod{0, 0, 0};
        if (j.contains("modulation")) {
            const json& t = j.at("modulation");
            for (std::size_t i = 0; i < t.size() && i < 3; ++i) mod[i] = t[i].get<int>();
        }
        SampledField f = gaussian_field(grid, get_or(j, "width", 1.0), mod);
        double scale = get_or(j, "scale", 1.0);
        for (cplx& z : f.values) z *= scale;
        return f;
    }
    if (type == "zero") return SampledField(grid, Space::physical);
    throw ConfigError(path + ".type: unknown field source '" + type + "'");
}

json norm_spec_json(const NormSpec& n) {
    return json{{"p", n.p}, {"q", n.q}, {"s", n.s}};
}

json report_json(const EstimateReport& r) {
    json j;
    j["estimate_id"] = r.estimate_id;
    j["exponents"] = r.exponents;
    j["corpus_size"] = r.corpus_size;
    j["skipped"] = r.skipped;
    j["train_size"] = r.train_size;
    j["c_train"] = r.c_train;
    j["holdout_max"] = r.holdout_max;
    j["resolution_delta"] = r.resolution_delta;
    if (r.has_slope) {
        j["slope"] = r.slope;
        j["slope_stderr"] = r.slope_stderr;
        j["predicted_slope"] = r.predicted_slope;
    }
    if (!r.case_tag.empty()) j["case"] = r.case_tag;
    if (!r.note.empty()) j["note"] = r.note;
    j["verdict"] = r.verdict;
    return j;
}

std::string ratios_csv(const EstimateReport& r, const json& header) {
    std::ostringstream os;
    os << "# " << header.dump() << "\n";
    os << "sample,split,ratio\n";
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
        os << i << "," << (int(i) < r.train_size ? "train" : "holdout") << ","
           << fmt(r.ratios[i]) << "\n";
    return os.str();
}

// ---- subcommands ----

int run_norm(const RunConfig& cfg) {
    const json& c = cfg.config;
    check_keys(c, {"grid", "field", "fields", "norms", "seed"}, "norm");
    GridSpec grid = parse_grid(c.at("grid"), "norm.grid");
    WindowSystem ws = build_windows(grid);

    std::vector<SampledField> fields;
    if (c.contains("fields")) {
        fields = make_corpus(grid, parse_corpus(c.at("fields"), "norm.fields"));
    } else if (c.contains("field")) {
        fields.push_back(parse_field_source(c.at("field"), grid, "norm.field"));
    } else {
        throw ConfigError("norm: need 'field' or 'fields'");
    }

    std::vector<NormSpec> specs;
    if (!c.contains("norms")) throw ConfigError("norm: need 'norms'");
    for (std::size_t i = 0; i < c.at("norms").size(); ++i)
        specs.push_back(parse_norm(c.at("norms")[i], "norm.norms[" + std::to_string(i) + "]"));

    json header{{"config_hash", hash_hex(config_hash(c))},
                {"seed", get_or<std::uint64_t>(c, "seed", 0)},
                {"conventions", convention_flags()}};
    std::ostringstream os;
    os << "# " << header.dump() << "\n";
    os << "field_id,p,q,s,convention,value,escaping_mass\n";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        double shell = boundary_shell_mass(fields[i]);
        if (shell > 1e-8)
            std::cerr << "warning: field " << i << " carries " << fmt(shell)
                      << " of its mass in the boundary shell\n";
        for (const NormSpec& spec : specs) {
            ModNormOptions opt;
            ModNormResult res = modulation_norm_detail(fields[i], spec, ws, opt);
            os << i << "," << fmt(spec.p) << "," << fmt(spec.q) << "," << fmt(spec.s)
               << ",bracket_weight;cycles," << fmt(res.value) << ","
               << fmt(res.escaping_mass) << "\n";
        }
    }
    write_file_atomic(cfg.out_dir + "/norms.csv", os.str());
    return 0;
}

int run_evolve(const RunConfig& cfg) {
    const json& c = cfg.config;
    check_keys(c,
               {"grid", "equation", "kernel", "data", "method", "T", "dt", "picard_tol",
                "picard_max_iter", "blowup_threshold", "tracked_norms", "snapshot_stride",
                "scattering", "seed", "write_snapshots", "alpha", "alpha_override"},
               "evolve");
    GridSpec grid = parse_grid(c.at("grid"), "evolve.grid");

    EquationSpec eq;
    std::string kind = get_or<std::string>(c, "equation", "fhnls");
    if (kind == "hnlkg") eq.kind = EquationKind::hnlkg;
    else if (kind == "hnlw") eq.kind = EquationKind::hnlw;
    else if (kind == "fhnls") eq.kind = EquationKind::fhnls;
    else throw ConfigError("evolve.equation: unknown equation '" + kind + "'");
    eq.alpha = get_or(c, "alpha", 2.0);
    eq.alpha_override = get_or(c, "alpha_override", false);
    eq.kernel = parse_kernel(c.at("kernel"), grid, "evolve.kernel");

    const json& data = c.at("data");
    check_keys(data, {"u0", "u1"}, "evolve.data");
    eq.u0 = parse_field_source(data.at("u0"), grid, "evolve.data.u0");
    if (eq.second_order()) {
        if (!data.contains("u1")) throw ConfigError("evolve.data: second-order needs u1");
        eq.u1 = parse_field_source(data.at("u1"), grid, "evolve.data.u1");
    }
    double shell = boundary_shell_mass(eq.u0);
    if (eq.u1) shell = std::max(shell, boundary_shell_mass(*eq.u1));
    if (shell > 1e-8)
        std::cerr << "warning: initial data carries " << fmt(shell)
                  << " of its mass in the boundary shell\n";

    SolveConfig sc;
    sc.T = get_or(c, "T", 1.0);
    sc.dt = get_or(c, "dt", 0.01);
    std::string method = get_or<std::string>(c, "method", "strang");
    if (method == "picard") sc.method = Method::picard;
    else if (method == "strang") sc.method = Method::strang;
    else throw ConfigError("evolve.method: must be 'picard' or 'strang'");
    sc.picard_tol = get_or(c, "picard_tol", 1e-10);
    sc.picard_max_iter = get_or(c, "picard_max_iter", 50);
    sc.blowup_threshold = get_or(c, "blowup_threshold", 1e6);
    sc.snapshot_stride = get_or(c, "snapshot_stride", 1);
    if (c.contains("tracked_norms")) {
        sc.tracked_norms.clear();
        for (std::size_t i = 0; i < c.at("tracked_norms").size(); ++i)
            sc.tracked_norms.push_back(parse_norm(
                c.at("tracked_norms")[i], "evolve.tracked_norms[" + std::to_string(i) + "]"));
    }
    try {
        sc.validate();
        eq.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("evolve: ") + e.what());
    }

    Trajectory traj;
    ConvergenceReport conv;
    if (sc.method == Method::picard) {
        auto [t, r] = picard_solve(eq, sc);
        traj = std::move(t);
        conv = r;
    } else {
        traj = evolve_strang(eq, sc);
    }

    json header{{"config_hash", hash_hex(config_hash(c))},
                {"seed", get_or<std::uint64_t>(c, "seed", 0)},
                {"conventions", convention_flags()}};

    // diagnostics.csv
    {
        std::ostringstream os;
        os << "# " << header.dump() << "\n";
        os << "t";
        for (const NormSpec& n : sc.tracked_norms)
            os << ",M_" << fmt(n.p) << "_" << fmt(n.q) << "_" << fmt(n.s);
        os << ",mass,energy,picard_increment\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            os << fmt(traj.times[i]);
            for (double v : traj.norms[i]) os << "," << fmt(v);
            os << "," << fmt(traj.mass[i]);
            os << "," << (i < traj.energy.size() ? fmt(traj.energy[i]) : "");
            os << ","
               << (i < traj.picard_increment.size() ? fmt(traj.picard_increment[i]) : "");
            os << "\n";
        }
        write_file_atomic(cfg.out_dir + "/diagnostics.csv", os.str());
    }

    if (get_or(c, "write_snapshots", true)) {
        for (std::size_t i = 0; i < traj.u.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "/u_%06zu.mspf", i);
            write_snapshot(cfg.out_dir + name, traj.u[i]);
            if (i < traj.ut.size()) {
                std::snprintf(name, sizeof(name), "/ut_%06zu.mspf", i);
                write_snapshot(cfg.out_dir + name, traj.ut[i]);
            }
        }
    }

    json rep;
    rep["config_hash"] = header["config_hash"];
    rep["seed"] = header["seed"];
    rep["conventions"] = header["conventions"];
    rep["termination"] = traj.termination == Termination::completed ? "completed"
                         : traj.termination == Termination::blowup_detected
                             ? "blowup_detected"
                             : "picard_diverged";
    if (traj.termination == Termination::blowup_detected)
        rep["blowup_time"] = traj.blowup_time;
    json tn = json::array();
    for (const NormSpec& n : sc.tracked_norms) tn.push_back(norm_spec_json(n));
    rep["tracked_norms"] = tn;
    if (sc.method == Method::picard) {
        rep["convergence"] = {{"iterations", conv.iterations},
                              {"converged", conv.converged},
                              {"increments", conv.increments},
                              {"rho", conv.rho}};
    }
    if (get_or(c, "scattering", false) && traj.termination == Termination::completed &&
        eq.kind != EquationKind::hnlw) {
        ScatteringReport sr = scattering_profile(traj, eq);
        rep["scattering"] = {{"verdict", sr.scattering_consistent
                                             ? "scattering-consistent"
                                             : "inconclusive"},
                             {"halves_ratio", sr.halves_ratio},
                             {"early_max_increment", sr.early_max_increment},
                             {"late_max_increment", sr.late_max_increment},
                             {"residual", sr.residual}};
    }
    write_file_atomic(cfg.out_dir + "/report.json", rep.dump(2) + "\n");

    return traj.termination == Termination::picard_diverged ? 3 : 0;
}

int run_verify(const RunConfig& cfg) {
    if (cfg.list_estimates) {
        for (const std::string& id : list_estimates()) std::cout << id << "\n";
        return 0;
    }
    const json& c = cfg.config;
    check_keys(c,
               {"grid", "corpus", "exponents", "t_grid", "strichartz", "refine_check",
                "seed"},
               "verify");
    GridSpec grid = parse_grid(c.at("grid"), "verify.grid");
    VerifyOptions opt;
    opt.refine_check = get_or(c, "refine_check", true);

    ExponentSet exps;
    if (c.contains("exponents"))
        for (auto it = c.at("exponents").begin(); it != c.at("exponents").end(); ++it) {
            if (it.value().is_string())
                exps[it.key()] = parse_exponent(it.value().get<std::string>()).to_double();
            else
                exps[it.key()] = it.value().get<double>();
        }

    const std::string& id = cfg.estimate_id;
    EstimateReport rep;
    if (id == "strichartz_kg" || id == "strichartz_schrodinger") {
        StrichartzConfig sc;
        sc.equation = id == "strichartz_kg" ? EquationKind::hnlkg : EquationKind::fhnls;
        if (c.contains("strichartz")) {
            const json& s = c.at("strichartz");
            check_keys(s, {"p", "r", "s", "T", "dt", "samples", "seed", "override",
                           "third_condition"},
                       "verify.strichartz");
            if (s.contains("p")) sc.p = parse_exponent(s.at("p").get<std::string>()).v;
            if (s.contains("r")) sc.r = parse_exponent(s.at("r").get<std::string>());
            sc.s = get_or(s, "s", 0.0);
            sc.T = get_or(s, "T", 2.0);
            sc.dt = get_or(s, "dt", 0.02);
            sc.samples = get_or(s, "samples", 50);
            sc.seed = get_or<std::uint64_t>(s, "seed", 7);
            sc.admissibility_override = get_or(s, "override", false);
        }
        rep = strichartz_check(sc, grid, opt);
    } else if (id == "kg_decay" || id == "kg_bound" || id == "schrodinger_decay" ||
               id == "frac_schrodinger_bound" || id == "wave_bound_sine" ||
               id == "wave_bound_cosine") {
        std::vector<double> tg;
        double t0 = 0.5, t1 = 100.0;
        int count = 24;
        if (c.contains("t_grid")) {
            const json& t = c.at("t_grid");
            check_keys(t, {"t0", "t1", "count"}, "verify.t_grid");
            t0 = get_or(t, "t0", t0);
            t1 = get_or(t, "t1", t1);
            count = get_or(t, "count", count);
        }
        tg = log_spaced_times(t0, t1, count);
        CorpusSpec corpus = c.contains("corpus")
                                ? parse_corpus(c.at("corpus"), "verify.corpus")
                                : CorpusSpec{};
        rep = verify_decay(id, exps, tg, grid, corpus, opt);
    } else {
        CorpusSpec corpus = c.contains("corpus")
                                ? parse_corpus(c.at("corpus"), "verify.corpus")
                                : CorpusSpec{};
        rep = verify_inequality(id, exps, grid, corpus, opt);
    }

    json header{{"config_hash", hash_hex(config_hash(c))},
                {"seed", get_or<std::uint64_t>(c, "seed", 0)},
                {"conventions", convention_flags()}};
    json out = report_json(rep);
    out["config_hash"] = header["config_hash"];
    out["seed"] = header["seed"];
    out["conventions"] = header["conventions"];
    write_file_atomic(cfg.out_dir + "/report.json", out.dump(2) + "\n");
    write_file_atomic(cfg.out_dir + "/ratios.csv", ratios_csv(rep, header));
    std::cout << rep.estimate_id << ": " << rep.verdict << "\n";
    return 0;
}

int run_admissible(const RunConfig& cfg) {
    const json& c = cfg.config;
    check_keys(c, {"equation", "d", "p", "r", "third_condition", "sweep"}, "admissible");
    std::string equation = get_or<std::string>(c, "equation", "kg");
    int d = get_or(c, "d", 1);
    ThirdConditionMode mode = ThirdConditionMode::reciprocal;
    std::string ms = get_or<std::string>(c, "third_condition", "reciprocal");
    if (ms == "as_written") mode = ThirdConditionMode::as_written;
    else if (ms == "reciprocal") mode = ThirdConditionMode::reciprocal;
    else if (ms == "off") mode = ThirdConditionMode::off;
    else throw ConfigError("admissible.third_condition: unknown mode '" + ms + "'");

    auto decide = [&](const Rat& p, const XReal& r) {
        return equation == "schrodinger" ? schrodinger_admissible(d, p, r, mode)
                                         : kg_admissible(d, p, r, mode);
    };

    if (get_or(c, "sweep", false)) {
        // Feasibility scan of the (p, r) rectangle, quarter steps in p and r.
        std::ostringstream os;
        os << "# " << json{{"config_hash", hash_hex(config_hash(c))},
                           {"conventions", convention_flags()}}
                          .dump()
           << "\n";
        os << "d,p,r,feasible,case_tag\n";
        for (long pn = 9; pn <= 16; ++pn) {
            for (long rn = 8; rn <= 48; ++rn) {
                Rat p(pn, 4), r(rn, 4);
                std::optional<AdmissibleWitness> w;
                try {
                    w = decide(p, XReal::of(r));
                } catch (const InvalidExponent&) {
                    continue;
                }
                os << d << "," << rat_str(p) << "," << rat_str(r) << "," << (w ? 1 : 0)
                   << "," << (w ? case_tag_str(w->case_tag) : "") << "\n";
            }
            Rat p(pn, 4);
            std::optional<AdmissibleWitness> w = decide(p, XReal::infinity());
            os << d << "," << rat_str(p) << ",inf," << (w ? 1 : 0) << ","
               << (w ? case_tag_str(w->case_tag) : "") << "\n";
        }
        write_file_atomic(cfg.out_dir + "/admissible_region.csv", os.str());
        return 0;
    }

    XReal p = parse_exponent(get_or<std::string>(c, "p", "5/2"));
    XReal r = parse_exponent(get_or<std::string>(c, "r", "3"));
    if (p.is_inf) throw ConfigError("admissible: p must be finite");
    std::optional<AdmissibleWitness> w = decide(p.v, r);

    json out;
    out["equation"] = equation;
    out["d"] = d;
    out["p"] = p.str();
    out["r"] = r.str();
    out["third_condition"] = ms;
    out["feasible"] = bool(w);
    if (w) {
        out["beta"] = rat_str(Rat(1) / w->inv_beta);
        out["inv_beta"] = rat_str(w->inv_beta);
        out["theta"] = rat_str(w->theta);
        out["case"] = case_tag_str(w->case_tag);
        out["proof_caveat"] = w->proof_caveat;
        out["consequences"] = {{"r_at_least_3", w->r_at_least_3},
                               {"r_finite", w->r_finite},
                               {"r_d_halfgap_gt_1", w->rd_halfgap_gt_1}};
    }
    out["config_hash"] = hash_hex(config_hash(c));
    out["seed"] = 0;
    out["conventions"] = convention_flags();
    std::cout << out.dump(2) << "\n";
    write_file_atomic(cfg.out_dir + "/admissible.json", out.dump(2) + "\n");
    return 0;
}

int run_embed(const RunConfig& cfg) {
    const json& c = cfg.config;
    check_keys(c, {"d", "p", "q", "s1", "s2", "witness", "grid"}, "embed");
    int d = get_or(c, "d", 1);
    XReal p = parse_exponent(get_or<std::string>(c, "p", "2"));
    XReal q = parse_exponent(get_or<std::string>(c, "q", "1"));
    XReal s1x = parse_exponent(get_or<std::string>(c, "s1", "0"));
    XReal s2x = parse_exponent(get_or<std::string>(c, "s2", "0"));
    if (s1x.is_inf || s2x.is_inf) throw ConfigError("embed: s1, s2 must be finite");

    EmbeddingQuery query{p, q, s1x.v, s2x.v};
    EmbeddingResult res = embedding_check(d, query);

    json out;
    out["d"] = d;
    out["p"] = p.str();
    out["q"] = q.str();
    out["s1"] = s1x.str();
    out["s2"] = s2x.str();
    out["holds"] = res.holds;
    out["tau"] = rat_str(res.tau);
    out["tau_value"] = rat_double(res.tau);
    out["case"] = res.case_id;

    if (get_or(c, "witness", false) && !res.holds) {
        GridSpec grid = c.contains("grid") ? parse_grid(c.at("grid"), "embed.grid")
                                           : GridSpec{d, 8192, 8.0};
        auto w = embedding_witness_search(d, p, q, s1x.v, s2x.v, grid);
        if (w) {
            out["witness"] = {{"family", w->family},
                              {"parameters", w->parameters},
                              {"ratios", w->ratios},
                              {"growth", w->growth}};
        } else {
            out["witness"] = nullptr;
        }
    }
    out["config_hash"] = hash_hex(config_hash(c));
    out["seed"] = 0;
    out["conventions"] = convention_flags();
    std::cout << out.dump(2) << "\n";
    write_file_atomic(cfg.out_dir + "/embed.json", out.dump(2) + "\n");
    return 0;
}

}  // namespace

std::uint64_t config_hash(const json& config) {
    std::string s = config.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

json convention_flags() {
    return json{{"fourier", "exp(-2*pi*i*x.xi), frequency in cycles"},
                {"weight", "(1+|k|^2)^(s/2)"},
                {"bessel", "(1+4*pi^2*|xi|^2)^(sigma/2)"},
                {"frac_phase", "exp(i*t*(2*pi*|xi|)^alpha)"},
                {"layout", "row-major, axis 0 slowest, FFT frequency order"}};
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::string tmp = path + ".tmp";
    FILE* fp = std::fopen(tmp.c_str(), "wb");
    if (!fp) throw IoError("write_file_atomic: cannot open " + tmp);
    bool ok = std::fwrite(contents.data(), 1, contents.size(), fp) == contents.size();
    ok = std::fclose(fp) == 0 && ok;
    if (!ok) throw IoError("write_file_atomic: short write to " + tmp);
    fs::rename(tmp, target);
}

void RunConfig::validate() const {
    static const std::vector<std::string> known = {"norm", "evolve", "verify", "admissible",
                                                   "embed"};
    bool ok = false;
    for (const std::string& k : known) ok = ok || k == subcommand;
    if (!ok) throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (subcommand == "verify" && estimate_id.empty() && !list_estimates)
        throw ConfigError("verify: need --estimate or --list");
}

int run(const RunConfig& cfg) {
    try {
        cfg.validate();
        if (cfg.subcommand == "norm") return run_norm(cfg);
        if (cfg.subcommand == "evolve") return run_evolve(cfg);
        if (cfg.subcommand == "verify") return run_verify(cfg);
        if (cfg.subcommand == "admissible") return run_admissible(cfg);
        if (cfg.subcommand == "embed") return run_embed(cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolated& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return 2;
    } catch (const InvalidExponent& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace modbox
