#include "modbox/exponents.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace modbox {

double rat_double(const Rat& r) {
    return double(r.numerator()) / double(r.denominator());
}

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

double XReal::to_double() const {
    return is_inf ? std::numeric_limits<double>::infinity() : rat_double(v);
}

std::string XReal::str() const { return is_inf ? "inf" : rat_str(v); }

XReal parse_exponent(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity")
        return XReal::infinity();
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            long long num = std::stoll(s.substr(0, slash));
            long long den = std::stoll(s.substr(slash + 1));
            if (den == 0) throw InvalidExponent("parse_exponent: zero denominator");
            return XReal::of(Rat(num, den));
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return XReal::of(std::stoll(s));
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.size() > 15) fp = fp.substr(0, 15);
        long long den = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
        bool neg = !ip.empty() && ip[0] == '-';
        long long whole = ip.empty() || ip == "-" ? 0 : std::stoll(ip);
        long long frac = fp.empty() ? 0 : std::stoll(fp);
        Rat r = Rat(std::llabs(whole)) + Rat(frac, den);
        return XReal::of(neg ? -r : r);
    } catch (const std::exception&) {
        throw InvalidExponent("parse_exponent: cannot parse '" + s + "'");
    }
}

Rat rational_from_double(double x, double tol) {
    if (!std::isfinite(x)) throw InvalidExponent("rational_from_double: non-finite input");
    bool neg = x < 0;
    x = std::abs(x);
    // Continued-fraction convergents until within tol.
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int it = 0; it < 40; ++it) {
        long long a = (long long)std::floor(frac);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > (long long)1e12) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double approx = double(p1) / double(q1);
        if (std::abs(approx - x) <= tol * std::max(1.0, x)) break;
        double rem = frac - double(a);
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    Rat r(p1, q1);
    return neg ? -r : r;
}

std::string case_tag_str(CaseTag c) {
    switch (c) {
        case CaseTag::I: return "I";
        case CaseTag::II: return "II";
        case CaseTag::III: return "III";
        case CaseTag::IV: return "IV";
    }
    return "?";
}

namespace {

// Shared pieces of both admissibility systems.
struct Window {
    Rat inv_beta;
    Rat half_gap;  // d (1/2 - 1/p)
    bool ok = false;
};

Window common_window(int d, const Rat& p, const XReal& r) {
    if (d < 1) throw InvalidExponent("admissible: d must be >= 1");
    if (!(p > Rat(2))) throw InvalidExponent("admissible: p must exceed 2");
    if (!r.is_inf && r.v < Rat(1)) throw InvalidExponent("admissible: r must be >= 1");
    Window w;
    w.inv_beta = Rat(1) - Rat(2) * r.recip();
    w.half_gap = Rat(d) * (Rat(1, 2) - Rat(1) / p);
    return w;
}

bool third_condition(int d, const Rat& p, ThirdConditionMode mode) {
    Rat bound = Rat(1, 2) - Rat(1, 3 * (long long)d);
    switch (mode) {
        case ThirdConditionMode::as_written:
            return Rat(1, 4) <= p && p < bound;
        case ThirdConditionMode::reciprocal: {
            Rat ip = Rat(1) / p;
            return Rat(1, 4) <= ip && ip < bound;
        }
        case ThirdConditionMode::off:
            return true;
    }
    return false;
}

void fill_consequences(AdmissibleWitness& w, const XReal& r, const Rat& half_gap) {
    w.r_finite = !r.is_inf;
    w.r_at_least_3 = r.is_inf || r.v >= Rat(3);
    if (r.is_inf)
        w.rd_halfgap_gt_1 = half_gap > Rat(0);
    else
        w.rd_halfgap_gt_1 = r.v * half_gap > Rat(1);
}

}  // namespace

std::optional<AdmissibleWitness> kg_admissible(int d, const Rat& p, const XReal& r,
                                               ThirdConditionMode mode) {
    Window w = common_window(d, p, r);
    Rat cap = std::min(Rat(d, d + 2), w.half_gap);
    if (!(Rat(1, 3) <= w.inv_beta && w.inv_beta <= cap)) return std::nullopt;
    if (!third_condition(d, p, mode)) return std::nullopt;
    if (w.half_gap <= Rat(0)) return std::nullopt;

    AdmissibleWitness out;
    out.inv_beta = w.inv_beta;
    if (w.inv_beta == cap) {
        out.case_tag = CaseTag::I;
        out.theta = w.inv_beta / w.half_gap;  // in (0, 1] by the window bound
        // Corner r = 3 with 1/beta = d(1/2 - 1/p) = 1/3: the decay factor is
        // exactly borderline integrable and the convolution step needs r > 3.
        out.proof_caveat = (w.inv_beta == Rat(1, 3) && w.half_gap == Rat(1, 3));
    } else {
        out.case_tag = CaseTag::II;
        // Any theta with inv_beta < theta * half_gap <= cap works; return the
        // midpoint of the feasible interval, exactly.
        Rat lo = w.inv_beta / w.half_gap;
        Rat hi = std::min(Rat(1), cap / w.half_gap);
        out.theta = (lo + hi) / Rat(2);
    }
    fill_consequences(out, r, w.half_gap);
    return out;
}

std::optional<AdmissibleWitness> schrodinger_admissible(int d, const Rat& p, const XReal& r,
                                                        ThirdConditionMode mode) {
    Window w = common_window(d, p, r);
    Rat cap = std::min(Rat(1), w.half_gap);
    if (!(Rat(1, 3) <= w.inv_beta && w.inv_beta <= cap)) return std::nullopt;
    if (!third_condition(d, p, mode)) return std::nullopt;
    if (w.half_gap <= Rat(0)) return std::nullopt;

    // Excluded endpoint (p, r) = (2d/(d-2), inf).
    if (d > 2 && r.is_inf && p == Rat(2 * (long long)d, (long long)d - 2)) return std::nullopt;

    AdmissibleWitness out;
    out.inv_beta = w.inv_beta;
    out.theta = Rat(1);
    if (w.inv_beta < cap) {
        out.case_tag = CaseTag::I;
    } else if (w.half_gap > Rat(1)) {
        out.case_tag = CaseTag::II;  // beta = 1, r = inf
    } else if (w.half_gap < Rat(1)) {
        out.case_tag = CaseTag::III;
        // At r = 3 the one-dimensional convolution step needs r/3 > 1.
        out.proof_caveat = (w.inv_beta == Rat(1, 3));
    } else {
        return std::nullopt;  // case IV, the excluded endpoint
    }
    fill_consequences(out, r, w.half_gap);
    return out;
}

GammaResult gamma_from_p(int d, const Rat& p, bool range_check) {
    if (range_check && !(p > Rat(2) && p < Rat(3)))
        throw InvalidExponent("gamma_from_p: requires 2 < p < 3 (use override to relax)");
    if (!(p > Rat(1))) throw InfeasibleGamma("gamma_from_p: p must exceed 1");
    // 1/p + gamma/d - 1 = (1 - 1/p)/2  =>  gamma = (3d/2)(1 - 1/p).
    Rat gamma = Rat(3 * (long long)d, 2) * (Rat(1) - Rat(1) / p);
    if (!(gamma > Rat(0) && gamma < Rat(d)))
        throw InfeasibleGamma("gamma_from_p: resulting gamma lies outside (0, d)");
    GammaResult res;
    res.gamma = gamma;
    res.gamma_over_d_gt_half = gamma * Rat(2) > Rat(d);
    return res;
}

Rat sigma_exponent(int d, const XReal& p) {
    Rat ip = p.recip();
    if (ip > Rat(1, 2)) throw InvalidExponent("sigma_exponent: requires p >= 2");
    return Rat(d + 2) * (Rat(1, 2) - ip);
}

EmbeddingResult embedding_check(int d, const EmbeddingQuery& query) {
    Rat ip = query.p.recip(), iq = query.q.recip();
    if (!query.p.is_inf && query.p.v < Rat(1))
        throw InvalidExponent("embedding_check: p must be >= 1");
    if (!query.q.is_inf && query.q.v < Rat(1))
        throw InvalidExponent("embedding_check: q must be >= 1");

    Rat tau = std::max(Rat(0), std::max(Rat(d) * (iq - ip), Rat(d) * (iq + ip - Rat(1))));
    EmbeddingResult res;
    res.tau = tau;

    bool p_is_one = !query.p.is_inf && query.p.v == Rat(1);
    Rat gap = query.s1 - query.s2;
    if (p_is_one) {
        if (query.q.is_inf) {
            res.case_id = 3;
            res.holds = gap >= tau;
        } else {
            res.case_id = 4;
            res.holds = gap > tau;
        }
    } else if (iq <= ip) {  // q >= p > 1
        res.case_id = 1;
        res.holds = gap >= tau;
    } else {  // p > q
        res.case_id = 2;
        res.holds = gap > tau;
    }
    return res;
}

}  // namespace modbox
