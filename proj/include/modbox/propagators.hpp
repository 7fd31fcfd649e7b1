#ifndef MODBOX_PROPAGATORS_HPP
#define MODBOX_PROPAGATORS_HPP

#include <utility>

#include "modbox/field.hpp"

namespace modbox {

enum class PropagatorKind {
    frac_schrodinger,  // e^{i t (2 pi |xi|)^alpha}
    schrodinger,       // alpha = 2 case
    kg_group,          // e^{i t omega(xi)},            omega = (1 + 4 pi^2 |xi|^2)^(1/2)
    kg_sine,           // sin(t omega) / omega
    kg_cosine,         // cos(t omega)
    wave_sine,         // sin(2 pi t |xi|) / (2 pi |xi|), value t at xi = 0
    wave_cosine,       // cos(2 pi t |xi|)
};

struct PropagatorSpec {
    PropagatorKind kind = PropagatorKind::schrodinger;
    double alpha = 2.0;  // frac_schrodinger only, must be > 0
    double t = 0.0;

    void validate() const {
        if (kind == PropagatorKind::frac_schrodinger && !(alpha > 0.0))
            throw ConfigError("PropagatorSpec: alpha must be positive");
    }
};

// Dispersion value omega(xi) for the Klein-Gordon group.
double kg_omega(const double* xi, int d);

cplx propagator_symbol(const PropagatorSpec& spec, const double* xi, int d);

SampledField apply_propagator(const SampledField& f, const PropagatorSpec& spec);

// Free flow of u_tt + (I - Laplacian) u = 0: returns (u(t), u_t(t)).
std::pair<SampledField, SampledField> free_kg_flow(const SampledField& u0,
                                                   const SampledField& u1, double t);

// Free flow of u_tt - Laplacian u = 0; the xi = 0 mode evolves as u + t u_t.
std::pair<SampledField, SampledField> free_wave_flow(const SampledField& u0,
                                                     const SampledField& u1, double t);

}  // namespace modbox

#endif
