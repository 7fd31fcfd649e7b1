#ifndef MODBOX_SOLVER_HPP
#define MODBOX_SOLVER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "modbox/kernels.hpp"
#include "modbox/modnorm.hpp"
#include "modbox/propagators.hpp"

namespace modbox {

enum class EquationKind { hnlkg, hnlw, fhnls };

// Cauchy problem selection.  The integral forms solved are
//   hnlkg:  u(t) = K'(t) u0 + K(t) u1 - int_0^t K(t - tau) F(u) dtau,
//           K = sin(t w)/w, K' = cos(t w), w = (1 + 4 pi^2 |xi|^2)^(1/2)
//   hnlw:   same with w = 2 pi |xi| and the zero mode evolved polynomially
//   fhnls:  u(t) = U(t) u0 - i int_0^t U(t - tau) F(u) dtau,
//           U(t) = e^{i t (2 pi |xi|)^alpha}
// with F(u) = (V * |u|^(2k)) u.
struct EquationSpec {
    EquationKind kind = EquationKind::fhnls;
    HartreeKernel kernel;
    double alpha = 2.0;          // fhnls only; requires 1/2 < alpha <= 2
    bool alpha_override = false; // permit alpha outside the theorem range
    SampledField u0;
    std::optional<SampledField> u1;  // second-order equations

    bool second_order() const { return kind != EquationKind::fhnls; }
    void validate() const;
};

enum class Method { picard, strang };
enum class Termination { completed, blowup_detected, picard_diverged };

struct SolveConfig {
    double T = 1.0;
    double dt = 0.01;
    Method method = Method::strang;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    double blowup_threshold = 1e6;  // factor over the initial tracked norm
    std::vector<NormSpec> tracked_norms = {NormSpec{2.0, 1.0, 0.0}};
    int snapshot_stride = 1;

    void validate() const {
        if (!(T > 0.0) || !(dt > 0.0) || dt > T)
            throw ConfigError("SolveConfig: need 0 < dt <= T");
        if (!(picard_tol > 0.0) || picard_max_iter < 1)
            throw ConfigError("SolveConfig: tolerances must be positive");
        if (snapshot_stride < 1) throw ConfigError("SolveConfig: snapshot_stride >= 1");
        if (tracked_norms.empty()) throw ConfigError("SolveConfig: need a tracked norm");
    }
};

struct Trajectory {
    std::vector<double> times;               // snapshot times, strictly increasing
    std::vector<SampledField> u;             // physical space
    std::vector<SampledField> ut;            // second-order equations only
    std::vector<NormSpec> tracked;           // norms carried in `norms`
    std::vector<std::vector<double>> norms;  // norms[i][j]: tracked norm j at time i
    std::vector<double> mass;                // L^2 norm series
    std::vector<double> energy;              // second-order energy diagnostic
    std::vector<double> picard_increment;    // last-sweep increment per snapshot
    Termination termination = Termination::completed;
    double blowup_time = 0.0;
};

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> increments;  // sup-in-time increment per iteration
    std::vector<double> rho;         // increment ratios
    bool converged = false;
};

// One application of the integral-equation map J to a candidate trajectory
// sampled on its full time mesh.  Free propagators act exactly per mode; the
// time integral uses composite trapezoid on the candidate's mesh.
Trajectory duhamel_map(const Trajectory& candidate, const EquationSpec& eq);

// Iterates J from the free flow until the sup-in-time increment of the first
// tracked norm falls below picard_tol.  Divergence (increment ratio >= 1
// three times in a row) terminates with Termination::picard_diverged.
std::pair<Trajectory, ConvergenceReport> picard_solve(const EquationSpec& eq,
                                                      const SolveConfig& cfg);

// Second-order-in-time splitting stepper with exact free flow per half step;
// terminates early at blow-up threshold crossing.
Trajectory evolve_strang(const EquationSpec& eq, const SolveConfig& cfg);

struct ScatteringReport {
    std::vector<double> times;
    // Adjacent profile increments ||v(t_{j+1}) - v(t_j)|| per tracked norm.
    std::vector<std::vector<double>> adjacent_increments;
    // Pairwise increments of the primary norm on a coarse snapshot subset.
    std::vector<double> pair_times;
    std::vector<std::vector<double>> pairwise;
    std::vector<double> residual;  // ||u(t) - free flow of the limit||, primary norm
    double early_max_increment = 0.0;
    double late_max_increment = 0.0;
    double halves_ratio = 0.0;  // early / late
    bool scattering_consistent = false;
    SampledField limit_state;                 // u_plus (fhnls) or v1_plus (hnlkg)
    std::optional<SampledField> limit_state2; // v2_plus for hnlkg
};

// Pulls the trajectory back along the free flow and reports Cauchy-tail
// diagnostics.  Throws NotApplicable on trajectories that did not complete.
// The limit is the tail average over the last quarter; the monotonicity
// verdict is evaluated on [9T/16, 3T/4], before the extrapolation window.
ScatteringReport scattering_profile(const Trajectory& traj, const EquationSpec& eq);

// Energy diagnostic for the second-order equations (exact invariant of the
// hnlkg flow when power_k = 1).
double kg_energy(const SampledField& u, const SampledField& ut, const EquationSpec& eq);

// Free flow of the equation's data, one snapshot per requested time.
Trajectory free_flow_trajectory(const EquationSpec& eq, const std::vector<double>& times);

}  // namespace modbox

#endif
