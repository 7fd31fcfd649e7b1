#ifndef MODBOX_FIELD_HPP
#define MODBOX_FIELD_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "modbox/grid.hpp"

namespace modbox {

using cplx = std::complex<double>;

enum class Space : int { physical = 0, frequency = 1 };
enum class Direction { forward, inverse };

// Complex samples of a function on the torus, in physical or frequency space.
// Row-major layout, axis 0 slowest; frequency axes in FFT order.
struct SampledField {
    GridSpec grid;
    Space space = Space::physical;
    std::vector<cplx> values;

    SampledField() = default;
    SampledField(const GridSpec& g, Space s)
        : grid(g), space(s), values(g.total_points(), cplx(0.0, 0.0)) {}

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
};

// A multiplier symbol evaluated at a frequency point xi[0..d-1] (cycles).
using Symbol = std::function<cplx(const double* xi, int d)>;

// Discrete Fourier transform with the 2*pi-in-exponent convention.  The
// forward transform approximates f_hat(xi) = integral f(x) e^{-2 pi i x.xi} dx
// via the dx^d-weighted sum; Plancherel holds exactly:
//   sum |f_hat|^2 dxi^d = sum |f|^2 dx^d.
SampledField transform(const SampledField& f, Direction dir);

// Discrete L^p quadrature norm (sum |f|^p dx^d)^(1/p); max norm for p = inf.
// Requires physical space and p >= 1 (use std::numeric_limits infinity).
double lp_norm(const SampledField& f, double p);

// l^2(dxi^d) norm of a frequency-space field.
double freq_l2_norm(const SampledField& fhat);

// Applies F^{-1} m F.  Output space matches the input space.  Throws
// SingularSymbol if m is non-finite at any grid frequency.
SampledField apply_multiplier(const SampledField& f, const Symbol& m);

// Same, with a precomputed symbol table in grid (FFT) order.
SampledField apply_multiplier(const SampledField& f, const std::vector<cplx>& table);

// Evaluates a symbol at every grid frequency; throws SingularSymbol with the
// offending point if any value is non-finite.
std::vector<cplx> tabulate_symbol(const GridSpec& grid, const Symbol& m);

bool all_finite(const SampledField& f);

// Fraction of |f_hat|^2 mass at frequencies with |xi|_inf > band.
double spectral_mass_outside(const SampledField& f, double band);

// Fraction of |f|^2 mass in the outer 1/8-wide shell of the physical box.
double boundary_shell_mass(const SampledField& f);

// Pointwise helpers; grids must match.
SampledField operator+(const SampledField& a, const SampledField& b);
SampledField operator-(const SampledField& a, const SampledField& b);
SampledField operator*(cplx c, const SampledField& a);

// Binary field snapshot, little-endian:
// "MSPF", u32 version, u32 d, u32 N, f64 L, u8 space, N^d (re, im) f64 pairs.
void write_snapshot(const std::string& path, const SampledField& f);
SampledField read_snapshot(const std::string& path);

}  // namespace modbox

#endif
