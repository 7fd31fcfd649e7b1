#ifndef MODBOX_VERIFY_HPP
#define MODBOX_VERIFY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modbox/corpus.hpp"
#include "modbox/exponents.hpp"
#include "modbox/modnorm.hpp"
#include "modbox/solver.hpp"

namespace modbox {

// Named exponent tuple for an estimate run; unknown names are rejected by
// each estimate's hypothesis gate.
using ExponentSet = std::map<std::string, double>;

struct EstimateReport {
    std::string estimate_id;
    ExponentSet exponents;
    int corpus_size = 0;
    int skipped = 0;                 // zero-ratio samples, logged not counted
    std::vector<double> ratios;      // per-sample LHS/RHS, train then holdout
    int train_size = 0;
    double c_train = 0.0;            // max ratio on the training split
    double holdout_max = 0.0;
    double resolution_delta = 0.0;   // fitted-constant change under refinement
    bool has_slope = false;
    double slope = 0.0;              // least-squares log-log decay exponent
    double slope_stderr = 0.0;
    double predicted_slope = 0.0;
    std::vector<double> t_grid;
    std::string verdict;             // consistent | violated | inconclusive
    std::string case_tag;
    std::string note;
};

// Catalogue of ratio estimates the harness can run.
std::vector<std::string> list_estimates();

struct VerifyOptions {
    bool refine_check = true;     // rerun at N*2 for the stability delta
    double holdout_slack = 1.05;
    double stability_tol = 0.20;
    double slope_slack = 0.15;
};

// Ratio-boundedness harness: evaluates both sides of the named inequality on
// the corpus, fits the constant on a 70/30 split, reruns on a refined grid,
// and issues the verdict.  Exponent tuples that violate the estimate's
// hypotheses are rejected with HypothesisViolated.
EstimateReport verify_inequality(const std::string& estimate_id, const ExponentSet& exps,
                                 const GridSpec& grid, const CorpusSpec& corpus,
                                 const VerifyOptions& opt = {});

// Time-decay/boundedness harness for the free propagators.  `kind_id` is one
// of: kg_decay, kg_bound, schrodinger_decay, frac_schrodinger_bound,
// wave_bound_sine, wave_bound_cosine.  The slope is fitted on log(LHS) vs
// log(1+t) over t >= 1.
EstimateReport verify_decay(const std::string& kind_id, const ExponentSet& exps,
                            const std::vector<double>& t_grid, const GridSpec& grid,
                            const CorpusSpec& corpus, const VerifyOptions& opt = {});

std::vector<double> log_spaced_times(double t0, double t1, int count);

// Space-time inhomogeneous estimate: the Duhamel integral of the Hartree
// nonlinearity of synthetic space-time samples, measured in L^r_t of the
// modulation norm, against the cubed norm of the sample.  The (p, r) pair
// must be admissible unless `admissibility_override` is set.
struct StrichartzConfig {
    EquationKind equation = EquationKind::hnlkg;  // hnlkg or fhnls kernels
    Rat p = Rat(5, 2);
    XReal r = XReal::of(3);
    double s = 0.0;
    double T = 2.0;
    double dt = 0.02;
    int samples = 50;
    std::uint64_t seed = 7;
    // Sample modes live inside |xi|_inf <= band so the cubic image stays in
    // the resolved band; requires 3 * band <= K_max - 1 on the grid.
    double band = 2.0;
    bool admissibility_override = false;
    ThirdConditionMode third_condition = ThirdConditionMode::reciprocal;
};

EstimateReport strichartz_check(const StrichartzConfig& cfg, const GridSpec& grid,
                                const VerifyOptions& opt = {});

// Parametric witness families for a failing embedding L^p_{s1} into
// M^{p,q}_{s2}: returns the first family whose L^p_{s1}-to-M^{p,q}_{s2}
// ratio grows monotonically by at least x4 across >= 3 dyadic steps.
struct WitnessReport {
    std::string family;               // modulated_gaussian | scaled_gaussian | box_sum
    std::vector<double> parameters;   // dyadic ladder actually swept
    std::vector<double> ratios;
    double growth = 0.0;              // last/first ratio
};

std::optional<WitnessReport> embedding_witness_search(int d, const XReal& p, const XReal& q,
                                                      const Rat& s1, const Rat& s2,
                                                      const GridSpec& grid);

// Least-squares slope of y against x with standard error.
std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace modbox

#endif
