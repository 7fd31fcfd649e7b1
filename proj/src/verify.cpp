#include "modbox/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "modbox/kernels.hpp"
#include "modbox/propagators.hpp"
#include "modbox/random.hpp"

namespace modbox {

namespace {

double getx(const ExponentSet& e, const std::string& key, double fallback) {
    auto it = e.find(key);
    return it == e.end() ? fallback : it->second;
}

double require(const ExponentSet& e, const std::string& key) {
    auto it = e.find(key);
    if (it == e.end())
        throw HypothesisViolated("estimate requires exponent '" + key + "'");
    return it->second;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

void need(bool cond, const std::string& what) {
    if (!cond) throw HypothesisViolated("hypothesis failed: " + what);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

double conj_exp(double p) { return p == 1.0 ? inf : (std::isinf(p) ? 1.0 : p / (p - 1.0)); }

struct SampleEval {
    double lhs = 0.0, rhs = 0.0;
};

struct EstimateDef {
    int arity = 1;
    std::function<void(const ExponentSet&, int)> gate;
    std::function<SampleEval(const std::vector<const SampledField*>&, const ExponentSet&,
                             const WindowSystem&)> eval;
};

double mn(const SampledField& f, double p, double q, double s, const WindowSystem& ws) {
    return modulation_norm(f, NormSpec{p, q, s}, ws);
}

SampledField pointwise_product(const SampledField& a, const SampledField& b) {
    SampledField r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] *= b.values[i];
    return r;
}

HartreeKernel riesz_kernel(double gamma, int k) {
    HartreeKernel ker;
    ker.kind = HartreeKernel::Kind::riesz;
    ker.lambda = 1.0;
    ker.gamma = gamma;
    ker.power_k = k;
    return ker;
}

const std::map<std::string, EstimateDef>& catalogue() {
    static const std::map<std::string, EstimateDef> defs = [] {
        std::map<std::string, EstimateDef> m;

        m["algebra_product"] = EstimateDef{
            2,
            [](const ExponentSet& e, int) {
                double p1 = getx(e, "p1", 2), p2 = getx(e, "p2", 2);
                double q1 = getx(e, "q1", 1), q2 = getx(e, "q2", 1);
                double p0 = getx(e, "p0", 1), q0 = getx(e, "q0", 1);
                need(getx(e, "s", 0) >= 0.0, "s >= 0");
                need(near(inv(p1) + inv(p2), inv(p0)), "1/p1 + 1/p2 = 1/p0");
                need(near(inv(q1) + inv(q2), 1.0 + inv(q0)), "1/q1 + 1/q2 = 1 + 1/q0");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double s = getx(e, "s", 0);
                SampleEval r;
                r.lhs = mn(pointwise_product(*f[0], *f[1]), getx(e, "p0", 1), getx(e, "q0", 1),
                           s, ws);
                r.rhs = mn(*f[0], getx(e, "p1", 2), getx(e, "q1", 1), s, ws) *
                        mn(*f[1], getx(e, "p2", 2), getx(e, "q2", 1), s, ws);
                return r;
            }};

        m["bessel_isomorphism"] = EstimateDef{
            1,
            [](const ExponentSet& e, int) {
                need(getx(e, "p", 2) >= 1 && getx(e, "q", 1) >= 1, "p, q >= 1");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double p = getx(e, "p", 2), q = getx(e, "q", 1), s = getx(e, "s", 0);
                double sg = getx(e, "sigma", 1);
                double a = mn(bessel_potential(*f[0], sg), p, q, s - sg, ws);
                double b = mn(*f[0], p, q, s, ws);
                // Two-sided equivalence: bound max(r, 1/r).
                SampleEval r;
                r.lhs = std::max(a / b, b / a);
                r.rhs = 1.0;
                return r;
            }};

        m["hls_lebesgue"] = EstimateDef{
            1,
            [](const ExponentSet& e, int d) {
                double g = require(e, "gamma"), p = require(e, "p"), q = require(e, "q");
                need(g > 0 && g < d, "0 < gamma < d");
                need(p > 1 && q > p && !std::isinf(q), "1 < p < q < inf");
                need(near(inv(p) + g / d - 1.0, inv(q)), "1/p + gamma/d - 1 = 1/q");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem&) {
                SampleEval r;
                r.lhs = lp_norm(fractional_integral(*f[0], require(e, "gamma")),
                                require(e, "q"));
                r.rhs = lp_norm(*f[0], require(e, "p"));
                return r;
            }};

        m["hls_modulation"] = EstimateDef{
            1,
            [](const ExponentSet& e, int d) {
                double g = require(e, "gamma"), p1 = require(e, "p1"), p2 = require(e, "p2");
                need(g > 0 && g < d, "0 < gamma < d");
                need(p1 > 1 && p2 > p1 && !std::isinf(p2), "1 < p1 < p2 < inf");
                need(near(inv(p1) + g / d - 1.0, inv(p2)), "1/p1 + gamma/d - 1 = 1/p2");
                need(getx(e, "s", 0) >= 0, "s >= 0");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double q = getx(e, "q", 1), s = getx(e, "s", 0);
                SampleEval r;
                r.lhs = mn(fractional_integral(*f[0], require(e, "gamma")),
                           require(e, "p2"), q, s, ws);
                r.rhs = mn(*f[0], require(e, "p1"), q, s, ws);
                return r;
            }};

        auto hartree_gate = [](const ExponentSet& e, int d) {
            double g = require(e, "gamma"), p = require(e, "p");
            need(g > 0 && g < d, "0 < gamma < d");
            need(p > 1 && !std::isinf(p), "1 < p < inf");
            double lhs = inv(p) + g / d - 1.0;
            need(lhs > 0 && lhs < inv(p), "1/p + gamma/d - 1 = 1/(p + eps), eps > 0");
        };

        m["hartree_bound"] = EstimateDef{
            1, hartree_gate,
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double p = require(e, "p"), s = getx(e, "s", 0);
                int k = int(getx(e, "k", 1));
                SampleEval r;
                r.lhs = mn(hartree_nonlinearity(*f[0], riesz_kernel(require(e, "gamma"), k)),
                           p, 1, s, ws);
                r.rhs = std::pow(mn(*f[0], p, 1, s, ws), 2 * k + 1);
                return r;
            }};

        m["hartree_lipschitz"] = EstimateDef{
            2, hartree_gate,
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double p = require(e, "p"), s = getx(e, "s", 0);
                HartreeKernel ker = riesz_kernel(require(e, "gamma"), 1);
                double nf = mn(*f[0], p, 1, s, ws), ng = mn(*f[1], p, 1, s, ws);
                SampleEval r;
                r.lhs = mn(hartree_nonlinearity(*f[0], ker) - hartree_nonlinearity(*f[1], ker),
                           p, 1, s, ws);
                r.rhs = (nf * nf + nf * ng + ng * ng) * mn(*f[0] - *f[1], p, 1, s, ws);
                return r;
            }};

        m["hartree_lipschitz_dual"] = EstimateDef{
            2,
            [](const ExponentSet& e, int d) {
                double g = require(e, "gamma"), p = require(e, "p");
                double pc = conj_exp(p);
                need(p > 2 && p < 2 * pc, "2 < p < 2p'");
                need(g > 0 && g < d, "0 < gamma < d");
                need(near(inv(p) + g / d - 1.0, 1.0 / (2 * pc)),
                     "1/p + gamma/d - 1 = 1/(2p')");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double p = require(e, "p"), s = getx(e, "s", 0);
                double pc = conj_exp(p);
                HartreeKernel ker = riesz_kernel(require(e, "gamma"), 1);
                double nf = mn(*f[0], p, 1, s, ws), ng = mn(*f[1], p, 1, s, ws);
                SampleEval r;
                r.lhs = mn(hartree_nonlinearity(*f[0], ker) - hartree_nonlinearity(*f[1], ker),
                           pc, 1, s, ws);
                r.rhs = (nf * nf + nf * ng + ng * ng) * mn(*f[0] - *f[1], p, 1, s, ws);
                return r;
            }};

        m["embedding_chain"] = EstimateDef{
            1,
            [](const ExponentSet& e, int) {
                double p = getx(e, "p", 2);
                double q1 = getx(e, "q1", 1), q2 = getx(e, "q2", inf);
                double pc = conj_exp(p);
                need(q1 <= std::min(p, pc), "q1 <= min(p, p')");
                need(q2 >= std::max(p, pc), "q2 >= max(p, p')");
            },
            [](const std::vector<const SampledField*>& f, const ExponentSet& e,
               const WindowSystem& ws) {
                double p = getx(e, "p", 2);
                double q1 = getx(e, "q1", 1), q2 = getx(e, "q2", inf);
                double lp = lp_norm(*f[0], p);
                double low = mn(*f[0], p, q1, 0, ws);   // M^{p,q1} controls L^p
                double high = mn(*f[0], p, q2, 0, ws);  // L^p controls M^{p,q2}
                SampleEval r;
                r.lhs = std::max(lp / low, high / lp);
                r.rhs = 1.0;
                return r;
            }};

        return m;
    }();
    return defs;
}

struct RatioRun {
    std::vector<double> ratios;
    int skipped = 0;
};

RatioRun run_ratios(const EstimateDef& def, const ExponentSet& exps, const GridSpec& grid,
                    const CorpusSpec& corpus) {
    WindowSystem ws = build_windows(grid);
    std::vector<SampledField> fields = make_corpus(grid, corpus);
    RatioRun out;
    const std::size_t arity = std::size_t(def.arity);
    for (std::size_t i = 0; i + arity <= fields.size(); i += arity) {
        std::vector<const SampledField*> args;
        for (std::size_t a = 0; a < arity; ++a) args.push_back(&fields[i + a]);
        SampleEval ev = def.eval(args, exps, ws);
        if (ev.rhs == 0.0 && ev.lhs == 0.0) {
            ++out.skipped;
            continue;
        }
        out.ratios.push_back(ev.rhs == 0.0 ? inf : ev.lhs / ev.rhs);
    }
    return out;
}

double max_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi && i < v.size(); ++i) m = std::max(m, v[i]);
    return m;
}

void finish_report(EstimateReport& rep, const std::vector<double>& base,
                   const std::vector<double>& refined, const VerifyOptions& opt) {
    rep.ratios = base;
    rep.corpus_size = int(base.size());
    rep.train_size = int(std::ceil(0.7 * double(base.size())));
    rep.c_train = max_of(base, 0, std::size_t(rep.train_size));
    rep.holdout_max = max_of(base, std::size_t(rep.train_size), base.size());

    double c_base = max_of(base, 0, base.size());
    double c_ref = refined.empty() ? c_base : max_of(refined, 0, refined.size());
    rep.resolution_delta = c_base > 0.0 ? std::abs(c_ref - c_base) / c_base : 0.0;

    bool bounded = rep.holdout_max <= opt.holdout_slack * rep.c_train ||
                   rep.holdout_max == 0.0;
    bool stable = rep.resolution_delta < opt.stability_tol;
    bool slope_ok =
        !rep.has_slope || rep.slope <= rep.predicted_slope + opt.slope_slack;

    if (bounded && stable && slope_ok) {
        rep.verdict = "consistent";
    } else if (!bounded) {
        // Violation requires the excess to survive refinement.
        double ref_train = max_of(refined, 0, std::size_t(std::ceil(0.7 * refined.size())));
        double ref_hold = max_of(refined, std::size_t(std::ceil(0.7 * refined.size())),
                                 refined.size());
        double excess_base = rep.holdout_max / std::max(rep.c_train, 1e-300);
        double excess_ref = ref_hold / std::max(ref_train, 1e-300);
        rep.verdict = (!refined.empty() && excess_ref > excess_base * 1.000001)
                          ? "violated"
                          : "inconclusive";
    } else {
        rep.verdict = "inconclusive";
    }
}

}  // namespace

std::vector<std::string> list_estimates() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : catalogue()) ids.push_back(k);
    ids.push_back("kg_decay");
    ids.push_back("kg_bound");
    ids.push_back("schrodinger_decay");
    ids.push_back("frac_schrodinger_bound");
    ids.push_back("wave_bound_sine");
    ids.push_back("wave_bound_cosine");
    ids.push_back("strichartz_kg");
    ids.push_back("strichartz_schrodinger");
    return ids;
}

std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw ConfigError("fit_slope: need at least 3 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    double se = std::sqrt(ss / double(n - 2) / sxx);
    return {slope, se};
}

std::vector<double> log_spaced_times(double t0, double t1, int count) {
    std::vector<double> t(static_cast<std::size_t>(count), 0.0);
    for (int i = 0; i < count; ++i)
        t[std::size_t(i)] = t0 * std::pow(t1 / t0, double(i) / double(count - 1));
    return t;
}

EstimateReport verify_inequality(const std::string& estimate_id, const ExponentSet& exps,
                                 const GridSpec& grid, const CorpusSpec& corpus,
                                 const VerifyOptions& opt) {
    auto it = catalogue().find(estimate_id);
    if (it == catalogue().end())
        throw ConfigError("verify_inequality: unknown estimate '" + estimate_id + "'");
    const EstimateDef& def = it->second;
    def.gate(exps, grid.d);

    EstimateReport rep;
    rep.estimate_id = estimate_id;
    rep.exponents = exps;

    RatioRun base = run_ratios(def, exps, grid, corpus);
    rep.skipped = base.skipped;

    // Scaling sanity: both sides share homogeneity degree, so the ratio must
    // be invariant under scaling every input.
    {
        WindowSystem ws = build_windows(grid);
        std::vector<SampledField> f = make_corpus(grid, corpus);
        if (int(f.size()) >= def.arity) {
            std::vector<SampledField> scaled;
            std::vector<const SampledField*> a0, a1;
            for (int a = 0; a < def.arity; ++a) {
                scaled.push_back(cplx(2.0, 0.0) * f[std::size_t(a)]);
                a0.push_back(&f[std::size_t(a)]);
            }
            for (int a = 0; a < def.arity; ++a) a1.push_back(&scaled[std::size_t(a)]);
            SampleEval e0 = def.eval(a0, exps, ws);
            SampleEval e1 = def.eval(a1, exps, ws);
            if (e0.rhs > 0 && e1.rhs > 0) {
                double r0 = e0.lhs / e0.rhs, r1 = e1.lhs / e1.rhs;
                if (std::abs(r1 - r0) > 1e-8 * std::max(r0, 1e-300))
                    rep.note += "scaling sanity failed; ";
            }
        }
    }

    std::vector<double> refined;
    if (opt.refine_check) {
        GridSpec g2 = grid;
        g2.N *= 2;
        refined = run_ratios(def, exps, g2, corpus).ratios;
    }
    finish_report(rep, base.ratios, refined, opt);
    return rep;
}

namespace {

struct DecayDef {
    PropagatorKind kind;
    bool decay;  // slope-checked decay vs pure boundedness
};

DecayDef decay_def(const std::string& id) {
    if (id == "kg_decay") return {PropagatorKind::kg_group, true};
    if (id == "kg_bound") return {PropagatorKind::kg_group, false};
    if (id == "schrodinger_decay") return {PropagatorKind::frac_schrodinger, true};
    if (id == "frac_schrodinger_bound") return {PropagatorKind::frac_schrodinger, false};
    if (id == "wave_bound_sine") return {PropagatorKind::wave_sine, false};
    if (id == "wave_bound_cosine") return {PropagatorKind::wave_cosine, false};
    throw ConfigError("verify_decay: unknown kind '" + id + "'");
}

}  // namespace

EstimateReport verify_decay(const std::string& kind_id, const ExponentSet& exps,
                            const std::vector<double>& t_grid, const GridSpec& grid,
                            const CorpusSpec& corpus, const VerifyOptions& opt) {
    DecayDef dd = decay_def(kind_id);
    const int d = grid.d;
    const double p = getx(exps, "p", 2), q = getx(exps, "q", 1), s = getx(exps, "s", 0);
    const double theta = getx(exps, "theta", 1.0);
    const double alpha = getx(exps, "alpha", 2.0);

    if (t_grid.size() < 20 || t_grid.back() > 100.0 + 1e-9)
        throw HypothesisViolated("verify_decay: t grid must hold >= 20 points in [0, 100]");
    if (dd.decay) {
        need(p >= 2, "p >= 2");
        need(theta >= 0 && theta <= 1, "theta in [0, 1]");
        if (kind_id == "kg_decay") need(!std::isinf(q), "q < inf");
        if (kind_id == "schrodinger_decay") need(alpha >= 2, "alpha >= 2");
    }
    if (kind_id == "frac_schrodinger_bound")
        need(alpha > 0.5 && alpha <= 2.0, "alpha in (1/2, 2]");

    const double pc = conj_exp(p);
    double predicted = 0.0;
    NormSpec lhs_spec{p, q, s};
    NormSpec rhs_spec{p, q, s};
    std::function<double(double)> bound;
    if (kind_id == "kg_decay") {
        double two_sigma = (d + 2) * (0.5 - inv(p));
        predicted = -d * theta * (0.5 - inv(p));
        rhs_spec = NormSpec{pc, q, s + theta * two_sigma};
        bound = [=](double t) { return std::pow(1.0 + t, predicted); };
    } else if (kind_id == "kg_bound") {
        predicted = d * std::abs(0.5 - inv(p));
        bound = [=](double t) { return std::pow(1.0 + t, predicted); };
        predicted = 0.0;  // no decay claim
    } else if (kind_id == "schrodinger_decay") {
        predicted = -(2.0 * d / alpha) * (0.5 - inv(p));
        rhs_spec = NormSpec{pc, q, s};
        bound = [=](double t) { return std::pow(1.0 + t, predicted); };
    } else if (kind_id == "frac_schrodinger_bound") {
        double growth = d * std::abs(inv(p) - 0.5);
        bound = [=](double t) { return std::pow(1.0 + t, growth); };
    } else {  // wave bounds
        bound = [=](double t) { return std::pow(1.0 + t * t, 0.25 * d); };
    }

    auto run = [&](const GridSpec& g) {
        WindowSystem ws = build_windows(g);
        std::vector<SampledField> fields = make_corpus(g, corpus);
        std::vector<double> sample_ratio, slopes;
        for (const SampledField& f : fields) {
            double rhs_norm = modulation_norm(f, rhs_spec, ws);
            std::vector<double> lx, ly;
            double worst = 0.0;
            for (double t : t_grid) {
                PropagatorSpec ps{dd.kind, alpha, t};
                double lhs = modulation_norm(apply_propagator(f, ps), lhs_spec, ws);
                worst = std::max(worst, lhs / (bound(t) * rhs_norm));
                if (t >= 1.0) {
                    lx.push_back(std::log(1.0 + t));
                    ly.push_back(std::log(std::max(lhs, 1e-300)));
                }
            }
            sample_ratio.push_back(worst);
            if (dd.decay && lx.size() >= 3) slopes.push_back(fit_slope(lx, ly).first);
        }
        return std::pair{sample_ratio, slopes};
    };

    EstimateReport rep;
    rep.estimate_id = kind_id;
    rep.exponents = exps;
    rep.t_grid = t_grid;
    auto [ratios, slopes] = run(grid);

    if (dd.decay && !slopes.empty()) {
        rep.has_slope = true;
        rep.predicted_slope = predicted;
        std::sort(slopes.begin(), slopes.end());
        rep.slope = slopes[slopes.size() / 2];
        double mean = 0;
        for (double v : slopes) mean += v;
        mean /= double(slopes.size());
        double var = 0;
        for (double v : slopes) var += (v - mean) * (v - mean);
        rep.slope_stderr =
            slopes.size() > 1 ? std::sqrt(var / double(slopes.size() - 1)) : 0.0;
    }

    std::vector<double> refined;
    if (opt.refine_check) {
        GridSpec g2 = grid;
        g2.N *= 2;
        refined = run(g2).first;
    }
    finish_report(rep, ratios, refined, opt);
    return rep;
}

EstimateReport strichartz_check(const StrichartzConfig& cfg, const GridSpec& grid,
                                const VerifyOptions& opt) {
    EstimateReport rep;
    rep.estimate_id = cfg.equation == EquationKind::fhnls ? "strichartz_schrodinger"
                                                          : "strichartz_kg";
    rep.exponents["p"] = rat_double(cfg.p);
    rep.exponents["r"] = cfg.r.to_double();
    rep.exponents["s"] = cfg.s;

    std::optional<AdmissibleWitness> wit;
    try {
        wit = cfg.equation == EquationKind::fhnls
                  ? schrodinger_admissible(grid.d, cfg.p, cfg.r, cfg.third_condition)
                  : kg_admissible(grid.d, cfg.p, cfg.r, cfg.third_condition);
    } catch (const InvalidExponent&) {
        wit = std::nullopt;
    }
    if (!wit && !cfg.admissibility_override)
        throw HypothesisViolated("strichartz_check: (p, r) pair is not admissible");
    if (wit) rep.case_tag = case_tag_str(wit->case_tag);
    if (!wit) rep.note += "admissibility overridden; ";

    GammaResult gr = gamma_from_p(grid.d, cfg.p, /*range_check=*/!cfg.admissibility_override);
    rep.exponents["gamma"] = rat_double(gr.gamma);

    const double p = rat_double(cfg.p);
    const double rr = cfg.r.to_double();
    const std::size_t M = std::size_t(std::llround(cfg.T / cfg.dt));
    std::vector<double> times(M + 1);
    for (std::size_t j = 0; j <= M; ++j) times[j] = j * cfg.dt;

    auto run = [&](const GridSpec& g) {
        WindowSystem ws = build_windows(g);
        EquationSpec eq;
        eq.kind = cfg.equation;
        eq.kernel = riesz_kernel(rat_double(gr.gamma), 1);
        eq.alpha = 2.0;
        eq.u0 = SampledField(g, Space::physical);
        if (eq.second_order()) eq.u1 = SampledField(g, Space::physical);

        if (3.0 * cfg.band > double(ws.k_max() - 1))
            throw ConfigError("strichartz_check: need 3 * band <= K_max - 1");
        const long band = std::lround(cfg.band * g.L);
        Rng rng(cfg.seed);
        NormSpec spec{p, 1.0, cfg.s};
        std::vector<double> ratios;
        for (int sample = 0; sample < cfg.samples; ++sample) {
            // Two or three modes with smooth compactly supported envelopes.
            int nmodes = 2 + int(rng.raw() % 2);
            std::vector<std::size_t> mode_idx;
            std::vector<cplx> amp;
            std::vector<double> phase_rate;
            for (int mo = 0; mo < nmodes; ++mo) {
                std::array<int, 3> midx{0, 0, 0};
                for (int a = 0; a < g.d; ++a) {
                    long sidx = std::lround(rng.uniform(-double(band), double(band)));
                    midx[a] = int(sidx >= 0 ? sidx : sidx + g.N);
                }
                mode_idx.push_back(g.flatten(midx));
                amp.push_back(rng.cnormal());
                phase_rate.push_back(rng.uniform(-2.0, 2.0));
            }
            Trajectory cand;
            cand.times = times;
            for (std::size_t j = 0; j <= M; ++j) {
                SampledField fh(g, Space::frequency);
                double env = std::sin(3.14159265358979323846 * times[j] / cfg.T);
                env *= env;
                for (int mo = 0; mo < nmodes; ++mo)
                    fh.values[mode_idx[std::size_t(mo)]] +=
                        amp[std::size_t(mo)] * env *
                        std::polar(1.0, phase_rate[std::size_t(mo)] * times[j]);
                cand.u.push_back(transform(fh, Direction::inverse));
            }
            Trajectory J = duhamel_map(cand, eq);

            auto lr_norm = [&](const Trajectory& tr) {
                std::vector<double> v;
                for (const SampledField& f : tr.u)
                    v.push_back(modulation_norm(f, spec, ws));
                if (std::isinf(rr)) {
                    double mx = 0;
                    for (double x : v) mx = std::max(mx, x);
                    return mx;
                }
                double acc = 0;
                for (std::size_t j = 0; j + 1 < v.size(); ++j)
                    acc += 0.5 * (times[j + 1] - times[j]) *
                           (std::pow(v[j], rr) + std::pow(v[j + 1], rr));
                return std::pow(acc, 1.0 / rr);
            };
            double lhs = lr_norm(J);
            double rhs = std::pow(lr_norm(cand), 3.0);
            if (lhs == 0.0 && rhs == 0.0) {
                ++rep.skipped;
                continue;
            }
            ratios.push_back(rhs == 0.0 ? inf : lhs / rhs);
        }
        return ratios;
    };

    std::vector<double> base = run(grid);
    std::vector<double> refined;
    if (opt.refine_check) {
        GridSpec g2 = grid;
        g2.N *= 2;
        refined = run(g2);
    }
    finish_report(rep, base, refined, opt);
    return rep;
}

std::optional<WitnessReport> embedding_witness_search(int d, const XReal& p, const XReal& q,
                                                      const Rat& s1, const Rat& s2,
                                                      const GridSpec& grid) {
    EmbeddingQuery query{p, q, s1, s2};
    if (embedding_check(d, query).holds)
        throw HypothesisViolated("embedding_witness_search: the inclusion holds");
    if (grid.d != d) throw GridMismatch("embedding_witness_search: grid dimension differs");

    WindowSystem ws = build_windows(grid);
    const double pd = p.to_double(), qd = q.to_double();
    const double s1d = rat_double(s1), s2d = rat_double(s2);
    NormSpec mspec{pd, qd, s2d};
    ModNormOptions mopt;
    if (pd == 2.0) mopt.fast_l2_path = true;

    auto ratio_of = [&](const SampledField& f) {
        double lnorm = lp_norm(bessel_potential(f, s1d), pd);
        double mnorm = modulation_norm(f, mspec, ws, mopt);
        return lnorm / mnorm;
    };

    auto sweep = [&](const std::string& family,
                     const std::function<std::optional<SampledField>(int)>& make)
        -> std::optional<WitnessReport> {
        WitnessReport w;
        w.family = family;
        for (int j = 0;; ++j) {
            std::optional<SampledField> f = make(j);
            if (!f) break;
            w.parameters.push_back(double(1 << j));
            w.ratios.push_back(ratio_of(*f));
        }
        if (w.ratios.size() < 4) return std::nullopt;
        for (std::size_t i = 1; i < w.ratios.size(); ++i)
            if (!(w.ratios[i] > w.ratios[i - 1])) return std::nullopt;
        w.growth = w.ratios.back() / w.ratios.front();
        if (w.growth < 4.0) return std::nullopt;
        return w;
    };

    const int kmax = ws.k_max();

    // Shrinking Gaussians, spectrum width ~ 2^j; picks up failures far from
    // the sharp line.
    auto scaled = sweep("scaled_gaussian", [&](int j) -> std::optional<SampledField> {
        double width = std::pow(2.0, -j);
        if (3.0 / width > double(kmax - 1)) return std::nullopt;
        if (width < 4.0 * grid.dx()) return std::nullopt;
        return gaussian_field(grid, width, {0, 0, 0});
    });
    if (scaled) return scaled;

    // Frequency-translated Gaussians m = 4 * 2^j along the first axis; picks
    // up weight-driven failures near the sharp line.
    auto modulated = sweep("modulated_gaussian", [&](int j) -> std::optional<SampledField> {
        long m = 4L << j;
        if (m + 6 > kmax - 1) return std::nullopt;
        std::array<int, 3> mod{int(m), 0, 0};
        return gaussian_field(grid, 1.0, mod);
    });
    if (modulated) {
        for (std::size_t i = 0; i < modulated->parameters.size(); ++i)
            modulated->parameters[i] = 4.0 * modulated->parameters[i];
        return modulated;
    }

    // Box sums along the first axis with near-extremal coefficients.
    auto boxes = sweep("box_sum", [&](int j) -> std::optional<SampledField> {
        long R = 1L << (j + 1);
        if (R + 6 > kmax - 1) return std::nullopt;
        SampledField fh(grid, Space::frequency);
        const double expo = s2d - 2.0 * s1d;
        for (int m = 0; m < grid.N; ++m) {
            double xi = grid.freq(m);
            // Row of Gaussian bumps at integer centers k, |k| <= R.
            long klo = std::max(-R, std::lround(xi - 6.0));
            long khi = std::min(R, std::lround(xi + 6.0));
            cplx acc(0, 0);
            for (long k = klo; k <= khi; ++k) {
                double coef = std::pow(1.0 + double(k) * double(k), 0.5 * expo);
                double off = xi - double(k);
                acc += coef * std::exp(-3.14159265358979323846 * off * off);
            }
            std::array<int, 3> idx{m, 0, 0};
            fh.values[grid.flatten(idx)] = acc;
        }
        return transform(fh, Direction::inverse);
    });
    return boxes;
}

}  // namespace modbox
