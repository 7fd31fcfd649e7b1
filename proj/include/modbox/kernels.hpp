#ifndef MODBOX_KERNELS_HPP
#define MODBOX_KERNELS_HPP

#include <optional>
#include <vector>

#include "modbox/field.hpp"

namespace modbox {

// Handling of the |xi|^(gamma-d) singularity at xi = 0.
enum class ZeroModePolicy {
    zero,
    // Exact cell average of the symbol over [-dxi/2, dxi/2]^d; second-order
    // consistent with the continuum convolution.
    box_average,
};

// Fourier coefficient of lambda |x|^(-gamma): lambda c(d, gamma) |xi|^(gamma-d)
// with c = pi^(gamma - d/2) Gamma((d-gamma)/2) / Gamma(gamma/2).
double riesz_constant(int d, double gamma);

// Unit-cube integral of |x|^(gamma-d) over [0,1]^d, used by the cell average.
double riesz_unit_cube_integral(int d, double gamma);

// Symbol table for convolution with lambda |x|^(-gamma) on the grid.
// Requires 0 < gamma < d.
std::vector<cplx> riesz_multiplier(const GridSpec& grid, double gamma, double lambda,
                                   ZeroModePolicy zero_mode);

// Fractional integral: convolution with lambda |x|^(-gamma).
SampledField fractional_integral(const SampledField& f, double gamma,
                                 ZeroModePolicy zero_mode = ZeroModePolicy::box_average,
                                 double lambda = 1.0);

struct HartreeKernel {
    enum class Kind { riesz, sampled };
    Kind kind = Kind::riesz;
    double lambda = 1.0;   // riesz only
    double gamma = 0.5;    // riesz only
    std::optional<SampledField> sampled;  // physical space, real-valued
    int power_k = 1;       // convolution carries |u|^(2k)
    ZeroModePolicy zero_mode = ZeroModePolicy::box_average;
    bool dealias = false;  // optional 2/3-rule truncation of |u|^(2k)

    void validate(const GridSpec& grid) const;
};

// Returns the cached convolution symbol for the kernel on this grid.
std::vector<cplx> kernel_symbol(const HartreeKernel& kernel, const GridSpec& grid);

// Convolution part only: V * |u|^(2k), real-valued up to round-off.
SampledField hartree_potential(const SampledField& u, const HartreeKernel& kernel);

// Full nonlinearity (V * |u|^(2k)) u in physical space.
SampledField hartree_nonlinearity(const SampledField& u, const HartreeKernel& kernel);

}  // namespace modbox

#endif
