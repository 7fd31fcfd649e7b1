#ifndef MODBOX_EXPONENTS_HPP
#define MODBOX_EXPONENTS_HPP

#include <boost/rational.hpp>

#include <optional>
#include <string>

#include "modbox/errors.hpp"

namespace modbox {

using Rat = boost::rational<long long>;

// Exact rational, or positive infinity (for p, q, r = inf).
struct XReal {
    bool is_inf = false;
    Rat v = Rat(0);

    static XReal infinity() { return {true, Rat(0)}; }
    static XReal of(Rat r) { return {false, r}; }
    static XReal of(long long n, long long d = 1) { return {false, Rat(n, d)}; }

    // 1/x, with 1/inf = 0; x must be nonzero.
    Rat recip() const {
        if (is_inf) return Rat(0);
        if (v == Rat(0)) throw InvalidExponent("reciprocal of zero exponent");
        return Rat(1) / v;
    }

    double to_double() const;
    std::string str() const;

    bool operator==(const XReal& o) const {
        return is_inf == o.is_inf && (is_inf || v == o.v);
    }
};

// Parses "inf", "a/b", integers, or finite decimals exactly.
XReal parse_exponent(const std::string& s);

// Nearest rational within tol via continued fractions (denominator-capped);
// doubles that are exactly representable small rationals come back exact.
Rat rational_from_double(double x, double tol = 1e-12);

std::string rat_str(const Rat& r);
double rat_double(const Rat& r);

enum class CaseTag { I, II, III, IV };
std::string case_tag_str(CaseTag c);

enum class ThirdConditionMode {
    as_written,  // 1/4 <= p < 1/2 - 1/(3d), literally on p
    reciprocal,  // 1/4 <= 1/p < 1/2 - 1/(3d), the reading consistent with p in (2,3)
    off,
};

struct AdmissibleWitness {
    Rat inv_beta;          // 1 - 2/r
    Rat theta;             // decay interpolation parameter (wave/Klein-Gordon)
    CaseTag case_tag = CaseTag::I;
    bool proof_caveat = false;  // boundary case where the argument degenerates
    // Re-substituted consequences.
    bool r_at_least_3 = false;
    bool r_finite = false;
    bool rd_halfgap_gt_1 = false;  // r d (1/2 - 1/p) > 1
};

// Klein-Gordon admissibility of (p, r): 1/beta + 2/r = 1 and
// 1/3 <= 1/beta <= min(d/(d+2), d(1/2 - 1/p)), plus the third condition as
// interpreted by `mode`.  Exact rational decision; returns the witness with
// the case split of the time-decay argument, or nullopt when infeasible.
std::optional<AdmissibleWitness> kg_admissible(int d, const Rat& p, const XReal& r,
                                               ThirdConditionMode mode);

// Schrodinger admissibility: 1/3 <= 1/beta <= min(1, d(1/2 - 1/p)), same
// third condition, and the excluded endpoint (p, r) = (2d/(d-2), inf).
std::optional<AdmissibleWitness> schrodinger_admissible(int d, const Rat& p, const XReal& r,
                                                        ThirdConditionMode mode);

struct GammaResult {
    Rat gamma;
    bool gamma_over_d_gt_half = false;
};

// Solves 1/p + gamma/d - 1 = 1/(2p') for gamma; requires 2 < p < 3 unless
// range_check is disabled, and always requires the result in (0, d).
GammaResult gamma_from_p(int d, const Rat& p, bool range_check = true);

// 2 sigma(p) = (d + 2)(1/2 - 1/p); requires p >= 2.
Rat sigma_exponent(int d, const XReal& p);

struct EmbeddingQuery {
    XReal p = XReal::of(2);
    XReal q = XReal::of(2);
    Rat s1 = Rat(0);
    Rat s2 = Rat(0);
};

struct EmbeddingResult {
    bool holds = false;
    Rat tau = Rat(0);
    int case_id = 0;  // 1..4
};

// Decides L^p_{s1} subset M^{p,q}_{s2} by the four sharp cases, with
// tau(p,q) = max{0, d(1/q - 1/p), d(1/q + 1/p - 1)}.
EmbeddingResult embedding_check(int d, const EmbeddingQuery& query);

}  // namespace modbox

#endif
