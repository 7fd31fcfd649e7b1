#ifndef MODBOX_WINDOWS_HPP
#define MODBOX_WINDOWS_HPP

#include <array>
#include <vector>

#include "modbox/field.hpp"
#include "modbox/grid.hpp"

namespace modbox {

enum class TransitionProfile {
    // phi(r) = 1 for r <= 1/2, 0 for r >= 1, and on the transition band
    // h(1-r) / (h(1-r) + h(r-1/2)) with h(t) = exp(-1/t); C-infinity.
    smooth_bump,
};

// The family of unit frequency-box windows sigma_k = rho_k / sum_l rho_l for
// integer lattice points |k|_inf <= K_max, where rho(xi) = prod_i phi(|xi_i|).
// The system is separable, so only per-axis data is stored.
class WindowSystem {
public:
    static WindowSystem build(const GridSpec& grid, TransitionProfile profile);

    const GridSpec& grid() const { return grid_; }
    int k_max() const { return k_max_; }
    TransitionProfile profile() const { return profile_; }

    // Guaranteed lower bound of sigma_k on its own unit cube Q_k (realized at
    // cube corners).
    double box_lower_bound() const { return box_lower_bound_; }

    // Base bump rho at a continuum frequency point.
    double rho(const double* xi, int d) const;

    // sigma_k at the grid frequency with per-axis stored indices m[0..d-1].
    double sigma(const std::array<int, 3>& k, const std::array<int, 3>& m) const;

    // Per-axis factor sigma restricted to one axis: phi(|xi_j - c|) / norm(j).
    double axis_sigma(int c, int m) const;

    // Stored axis indices j whose frequency satisfies |xi_j - c| < 1
    // (the support of the axis-c window); contiguous as signed frequencies.
    std::vector<int> axis_support(int c) const;

    // Integer boxes k whose window is nonzero at grid point m, with values.
    void boxes_at(const std::array<int, 3>& m,
                  std::vector<std::pair<std::array<int, 3>, double>>& out) const;

    static double phi(double r);

private:
    GridSpec grid_;
    TransitionProfile profile_ = TransitionProfile::smooth_bump;
    int k_max_ = 0;
    double box_lower_bound_ = 0.0;
    std::vector<double> axis_norm_;  // sum_l phi(|xi_j - l|) per stored index j
};

// Builds the window family; throws GridTooCoarse when floor(N/(2L)) - 1 < 2.
WindowSystem build_windows(const GridSpec& grid,
                           TransitionProfile profile = TransitionProfile::smooth_bump);

// Frequency projection onto box k: F^{-1} sigma_k F.  Output space matches
// the input.  Throws BoxOutOfRange for |k|_inf > K_max.
SampledField box_project(const SampledField& f, const std::array<int, 3>& k,
                         const WindowSystem& ws);

}  // namespace modbox

#endif
