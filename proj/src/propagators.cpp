#include "modbox/propagators.hpp"

#include <cmath>

namespace modbox {

namespace {
constexpr double two_pi = 2.0 * 3.14159265358979323846;

double radial(const double* xi, int d) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += xi[i] * xi[i];
    return std::sqrt(r2);
}
}  // namespace

double kg_omega(const double* xi, int d) {
    double r = two_pi * radial(xi, d);
    return std::sqrt(1.0 + r * r);
}

cplx propagator_symbol(const PropagatorSpec& spec, const double* xi, int d) {
    spec.validate();
    const double t = spec.t;
    switch (spec.kind) {
        case PropagatorKind::frac_schrodinger: {
            double r = two_pi * radial(xi, d);
            return std::polar(1.0, t * std::pow(r, spec.alpha));
        }
        case PropagatorKind::schrodinger: {
            double r = two_pi * radial(xi, d);
            return std::polar(1.0, t * r * r);
        }
        case PropagatorKind::kg_group:
            return std::polar(1.0, t * kg_omega(xi, d));
        case PropagatorKind::kg_sine: {
            double w = kg_omega(xi, d);
            return cplx(std::sin(t * w) / w, 0.0);
        }
        case PropagatorKind::kg_cosine:
            return cplx(std::cos(t * kg_omega(xi, d)), 0.0);
        case PropagatorKind::wave_sine: {
            double r = two_pi * radial(xi, d);
            // Removable singularity: sin(t r)/r -> t as r -> 0.
            return cplx(r == 0.0 ? t : std::sin(t * r) / r, 0.0);
        }
        case PropagatorKind::wave_cosine:
            return cplx(std::cos(t * two_pi * radial(xi, d)), 0.0);
    }
    return cplx(0.0, 0.0);
}

SampledField apply_propagator(const SampledField& f, const PropagatorSpec& spec) {
    spec.validate();
    return apply_multiplier(f, [&spec](const double* xi, int d) {
        return propagator_symbol(spec, xi, d);
    });
}

std::pair<SampledField, SampledField> free_kg_flow(const SampledField& u0,
                                                   const SampledField& u1, double t) {
    if (!(u0.grid == u1.grid)) throw GridMismatch("free_kg_flow: data on different grids");
    SampledField a = (u0.space == Space::frequency) ? u0 : transform(u0, Direction::forward);
    SampledField b = (u1.space == Space::frequency) ? u1 : transform(u1, Direction::forward);
    const GridSpec& g = u0.grid;
    SampledField uh(g, Space::frequency), vh(g, Space::frequency);
    double xi[3] = {0, 0, 0};
    for (std::size_t i = 0; i < uh.values.size(); ++i) {
        auto idx = g.unflatten(i);
        for (int ax = 0; ax < g.d; ++ax) xi[ax] = g.freq(idx[ax]);
        double w = kg_omega(xi, g.d);
        double c = std::cos(t * w), s = std::sin(t * w);
        uh.values[i] = c * a.values[i] + (s / w) * b.values[i];
        vh.values[i] = -w * s * a.values[i] + c * b.values[i];
    }
    bool phys = (u0.space == Space::physical);
    if (phys)
        return {transform(uh, Direction::inverse), transform(vh, Direction::inverse)};
    return {uh, vh};
}

std::pair<SampledField, SampledField> free_wave_flow(const SampledField& u0,
                                                     const SampledField& u1, double t) {
    if (!(u0.grid == u1.grid)) throw GridMismatch("free_wave_flow: data on different grids");
    SampledField a = (u0.space == Space::frequency) ? u0 : transform(u0, Direction::forward);
    SampledField b = (u1.space == Space::frequency) ? u1 : transform(u1, Direction::forward);
    const GridSpec& g = u0.grid;
    SampledField uh(g, Space::frequency), vh(g, Space::frequency);
    double xi[3] = {0, 0, 0};
    for (std::size_t i = 0; i < uh.values.size(); ++i) {
        auto idx = g.unflatten(i);
        for (int ax = 0; ax < g.d; ++ax) xi[ax] = g.freq(idx[ax]);
        double w = two_pi * radial(xi, g.d);
        if (w == 0.0) {
            // Exact polynomial solution of the zero mode.
            uh.values[i] = a.values[i] + t * b.values[i];
            vh.values[i] = b.values[i];
        } else {
            double c = std::cos(t * w), s = std::sin(t * w);
            uh.values[i] = c * a.values[i] + (s / w) * b.values[i];
            vh.values[i] = -w * s * a.values[i] + c * b.values[i];
        }
    }
    bool phys = (u0.space == Space::physical);
    if (phys)
        return {transform(uh, Direction::inverse), transform(vh, Direction::inverse)};
    return {uh, vh};
}

}  // namespace modbox
