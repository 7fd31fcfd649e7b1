#ifndef MODBOX_MODNORM_HPP
#define MODBOX_MODNORM_HPP

#include <limits>
#include <optional>
#include <vector>

#include "modbox/field.hpp"
#include "modbox/windows.hpp"

namespace modbox {

constexpr double inf = std::numeric_limits<double>::infinity();

// Selects the mixed norm: L^p in space, weighted l^q over frequency boxes,
// weight <k>^s = (1 + |k|^2)^(s/2).
struct NormSpec {
    double p = 2.0;
    double q = 2.0;
    double s = 0.0;

    void validate() const {
        if (!(p >= 1.0) || !(q >= 1.0))
            throw InvalidExponent("NormSpec: p and q must be >= 1");
    }
};

inline double weight_bracket(double k_abs2, double s) {
    return s == 0.0 ? 1.0 : std::pow(1.0 + k_abs2, s / 2.0);
}

// Bessel bracket in cycle frequency: <xi> = (1 + 4 pi^2 |xi|^2)^(1/2).
double bessel_bracket(const double* xi, int d);

struct ModNormOptions {
    double escaping_mass_tol = 1e-8;
    // Evaluate per-box L^2 norms in frequency space (Plancherel) instead of
    // one inverse FFT per box; valid only for p = 2.
    bool fast_l2_path = false;
};

struct ModNormResult {
    double value = 0.0;
    double escaping_mass = 0.0;
    std::vector<double> per_box;  // ||box_k f||_Lp in enumeration order
};

// Decomposition-side norm (sum_k (<k>^s ||box_k f||_Lp)^q)^(1/q), k over
// |k|_inf <= K_max; max over boxes for q = inf.  Throws SpectrumNotResolved
// when the spectral mass outside |xi|_inf <= K_max - 1 exceeds the tolerance.
double modulation_norm(const SampledField& f, const NormSpec& spec, const WindowSystem& ws,
                       const ModNormOptions& opt = {});
ModNormResult modulation_norm_detail(const SampledField& f, const NormSpec& spec,
                                     const WindowSystem& ws, const ModNormOptions& opt = {});

// Short-time Fourier transform lattice parameters.  The window g defaults to
// the L^2-normalized Gaussian 2^(d/4) e^{-pi |x|^2}.
struct StftSpec {
    std::optional<SampledField> window;  // physical space, unit L^2 norm
    double a = 0.5;                      // spatial lattice step
    double b = 0.5;                      // frequency lattice step

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || a > 0.5 || b > 0.5)
            throw ConfigError("StftSpec: lattice steps must lie in (0, 1/2]");
    }
};

SampledField default_gaussian_window(const GridSpec& grid);

struct StftNormResult {
    double value = 0.0;            // at the refined lattice (a/2, b/2)
    double coarse_value = 0.0;     // at (a, b)
    double refinement_delta = 0.0; // |value - coarse| / value
};

// STFT-side norm: the mixed L^p_x l^q_w quadrature of |V_g f| with weight
// <w>^s.  Evaluates at (a, b) and (a/2, b/2); throws LatticeNotConverged if
// the two differ by more than 1%.
double stft_norm(const SampledField& f, const NormSpec& spec, const StftSpec& stft);
StftNormResult stft_norm_detail(const SampledField& f, const NormSpec& spec,
                                const StftSpec& stft, double convergence_tol = 0.01);

// Bessel potential (I - Laplacian)^(sigma/2), symbol <xi>^sigma.
SampledField bessel_potential(const SampledField& f, double sigma);

}  // namespace modbox

#endif
