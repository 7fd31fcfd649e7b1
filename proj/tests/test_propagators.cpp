#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modbox/modnorm.hpp"
#include "modbox/propagators.hpp"
#include "modbox/random.hpp"

using namespace modbox;

namespace {
constexpr double pi = 3.14159265358979323846;

SampledField random_bandlimited(const GridSpec& g, double band, Rng& rng) {
    SampledField fh(g, Space::frequency);
    for (std::size_t i = 0; i < fh.size(); ++i) {
        auto idx = g.unflatten(i);
        double linf = 0;
        for (int a = 0; a < g.d; ++a) linf = std::max(linf, std::abs(g.freq(idx[a])));
        if (linf <= band) fh.values[i] = rng.cnormal();
    }
    return transform(fh, Direction::inverse);
}

double rel_diff(const SampledField& a, const SampledField& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}
}  // namespace

TEST_CASE("symbol values at t = 0 and at the origin") {
    double xi0[1] = {0.0}, xi1[1] = {1.5};
    for (PropagatorKind k : {PropagatorKind::frac_schrodinger, PropagatorKind::schrodinger,
                             PropagatorKind::kg_group, PropagatorKind::kg_cosine,
                             PropagatorKind::wave_cosine}) {
        PropagatorSpec s{k, 1.5, 0.0};
        CHECK(std::abs(propagator_symbol(s, xi1, 1) - cplx(1, 0)) < 1e-15);
    }
    PropagatorSpec ks{PropagatorKind::kg_sine, 2.0, 0.0};
    CHECK(std::abs(propagator_symbol(ks, xi1, 1)) == 0.0);
    PropagatorSpec wsn{PropagatorKind::wave_sine, 2.0, 0.0};
    CHECK(std::abs(propagator_symbol(wsn, xi1, 1)) == 0.0);

    // kg_sine at xi = 0 is sin(t); wave_sine at xi = 0 is t.
    PropagatorSpec ks2{PropagatorKind::kg_sine, 2.0, 0.7};
    CHECK(propagator_symbol(ks2, xi0, 1).real() == doctest::Approx(std::sin(0.7)));
    PropagatorSpec ws2{PropagatorKind::wave_sine, 2.0, 0.7};
    CHECK(propagator_symbol(ws2, xi0, 1).real() == doctest::Approx(0.7));
}

TEST_CASE("symbol magnitude bounds") {
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        double xi[2] = {rng.uniform(-8, 8), rng.uniform(-8, 8)};
        double t = rng.uniform(-20, 20);
        for (PropagatorKind k :
             {PropagatorKind::frac_schrodinger, PropagatorKind::schrodinger,
              PropagatorKind::kg_group}) {
            PropagatorSpec s{k, 0.75, t};
            CHECK(std::abs(std::abs(propagator_symbol(s, xi, 2)) - 1.0) < 1e-14);
        }
        PropagatorSpec ks{PropagatorKind::kg_sine, 2.0, t};
        CHECK(std::abs(propagator_symbol(ks, xi, 2)) <=
              std::min(std::abs(t), 1.0) + 1e-14);
        PropagatorSpec wc{PropagatorKind::wave_cosine, 2.0, t};
        CHECK(std::abs(propagator_symbol(wc, xi, 2)) <= 1.0 + 1e-14);
    }
}

TEST_CASE("free Schrodinger Gaussian matches the closed form") {
    // u(t,x) = (1 - 4 pi i t)^{-1/2} exp(-pi x^2 / (1 - 4 pi i t)).
    GridSpec g{1, 4096, 256.0};
    SampledField f(g, Space::physical);
    for (int n = 0; n < g.N; ++n) {
        double x = g.coord(n);
        f.values[std::size_t(n)] = std::exp(-pi * x * x);
    }
    for (double t : {0.1, 1.0}) {
        SampledField ut = apply_propagator(f, {PropagatorKind::schrodinger, 2.0, t});
        cplx denom(1.0, -4.0 * pi * t);
        cplx amp = 1.0 / std::sqrt(denom);
        double worst = 0;
        for (int n = 0; n < g.N; ++n) {
            double x = g.coord(n);
            cplx expect = amp * std::exp(-pi * x * x / denom);
            worst = std::max(worst, std::abs(ut.values[std::size_t(n)] - expect));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("group law and inverses") {
    Rng rng(4);
    GridSpec g{1, 256, 16.0};
    SampledField f = random_bandlimited(g, 6.0, rng);
    for (PropagatorKind k : {PropagatorKind::frac_schrodinger, PropagatorKind::kg_group}) {
        SampledField two = apply_propagator(apply_propagator(f, {k, 1.5, 0.7}), {k, 1.5, 1.6});
        SampledField one = apply_propagator(f, {k, 1.5, 2.3});
        CHECK(rel_diff(two, one) < 1e-11);
    }
    SampledField round = apply_propagator(
        apply_propagator(f, {PropagatorKind::kg_group, 2.0, 5.0}),
        {PropagatorKind::kg_group, 2.0, -5.0});
    CHECK(rel_diff(round, f) < 1e-11);

    // L^2 isometry of unimodular kinds.
    double base = lp_norm(f, 2.0);
    SampledField moved = apply_propagator(f, {PropagatorKind::schrodinger, 2.0, 3.0});
    CHECK(std::abs(lp_norm(moved, 2.0) - base) < 1e-12 * base);
}

TEST_CASE("Klein-Gordon operator identities") {
    Rng rng(6);
    GridSpec g{1, 256, 16.0};
    SampledField f = random_bandlimited(g, 6.0, rng);
    const double t = 1.3;

    // G(t) = K'(t) + i1 omega^{1/2} K(t), with omega^{1/2} the bessel bracket.
    SampledField lhs = apply_propagator(f, {PropagatorKind::kg_group, 2.0, t});
    SampledField kc = apply_propagator(f, {PropagatorKind::kg_cosine, 2.0, t});
    SampledField ks =
        bessel_potential(apply_propagator(f, {PropagatorKind::kg_sine, 2.0, t}), 1.0);
    SampledField rhs = kc + cplx(0, 1) * ks;
    CHECK(rel_diff(lhs, rhs) < 1e-12);

    // d/dt K(t) f = K'(t) f (finite differences).
    const double h = 1e-5;
    SampledField kp = apply_propagator(f, {PropagatorKind::kg_sine, 2.0, t + h});
    SampledField km = apply_propagator(f, {PropagatorKind::kg_sine, 2.0, t - h});
    SampledField fd = cplx(1.0 / (2 * h), 0) * (kp - km);
    CHECK(rel_diff(fd, kc) < 1e-7);
}

TEST_CASE("free Klein-Gordon flow conserves per-mode energy") {
    Rng rng(8);
    GridSpec g{1, 256, 16.0};
    SampledField u0 = random_bandlimited(g, 6.0, rng);
    SampledField u1 = random_bandlimited(g, 6.0, rng);

    auto [a0, b0] = free_kg_flow(u0, u1, 0.0);
    CHECK(rel_diff(a0, u0) < 1e-13);
    CHECK(rel_diff(b0, u1) < 1e-13);

    SampledField uh0 = transform(u0, Direction::forward);
    SampledField uh1 = transform(u1, Direction::forward);
    std::vector<double> e0(uh0.size());
    for (std::size_t i = 0; i < uh0.size(); ++i) {
        auto idx = g.unflatten(i);
        double xi[1] = {g.freq(idx[0])};
        double w = kg_omega(xi, 1);
        e0[i] = std::norm(uh1.values[i]) + w * w * std::norm(uh0.values[i]);
    }
    for (double t : {0.1, 1.0, 10.0}) {
        auto [u, ut] = free_kg_flow(u0, u1, t);
        SampledField uh = transform(u, Direction::forward);
        SampledField uth = transform(ut, Direction::forward);
        double worst = 0;
        for (std::size_t i = 0; i < uh.size(); ++i) {
            auto idx = g.unflatten(i);
            double xi[1] = {g.freq(idx[0])};
            double w = kg_omega(xi, 1);
            double e = std::norm(uth.values[i]) + w * w * std::norm(uh.values[i]);
            if (e0[i] > 1e-20) worst = std::max(worst, std::abs(e - e0[i]) / e0[i]);
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("free flow solves the mode recurrence exactly") {
    // u(t+h) + u(t-h) = 2 cos(h w) u(t) for every mode of the exact flow.
    Rng rng(10);
    GridSpec g{1, 128, 8.0};
    SampledField u0 = random_bandlimited(g, 3.0, rng);
    SampledField u1 = random_bandlimited(g, 3.0, rng);
    const double t = 0.9, h = 0.35;
    auto um = free_kg_flow(u0, u1, t - h);
    auto uc = free_kg_flow(u0, u1, t);
    auto up = free_kg_flow(u0, u1, t + h);
    SampledField mh = transform(um.first, Direction::forward);
    SampledField ch = transform(uc.first, Direction::forward);
    SampledField ph = transform(up.first, Direction::forward);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
        auto idx = g.unflatten(i);
        double xi[1] = {g.freq(idx[0])};
        double w = kg_omega(xi, 1);
        worst = std::max(worst, std::abs(ph.values[i] + mh.values[i] -
                                         2.0 * std::cos(h * w) * ch.values[i]));
        scale = std::max(scale, std::abs(ch.values[i]));
    }
    CHECK(worst < 1e-10 * scale);
}

TEST_CASE("single-mode Klein-Gordon flow from velocity data") {
    GridSpec g{1, 128, 8.0};
    SampledField u0(g, Space::physical);
    SampledField u1(g, Space::frequency);
    std::array<int, 3> at{int(std::lround(2.0 * g.L)), 0, 0};
    u1.values[g.flatten(at)] = 1.0;
    SampledField u1p = transform(u1, Direction::inverse);
    const double t = 0.8;
    auto [u, ut] = free_kg_flow(u0, u1p, t);
    double xi[1] = {2.0};
    double w = kg_omega(xi, 1);
    SampledField uh = transform(u, Direction::forward);
    CHECK(std::abs(uh.values[g.flatten(at)] - cplx(std::sin(t * w) / w, 0)) < 1e-12);
}

TEST_CASE("wave flow: zero mode is polynomial in t") {
    GridSpec g{1, 128, 8.0};
    SampledField u0(g, Space::physical), u1(g, Space::physical);
    for (cplx& z : u0.values) z = cplx(0.5, 0);
    for (cplx& z : u1.values) z = cplx(0.25, 0);
    auto [u, ut] = free_wave_flow(u0, u1, 3.0);
    // Constant data stays constant: u = u0 + t u1 pointwise.
    for (const cplx& z : u.values) CHECK(std::abs(z - cplx(1.25, 0)) < 1e-12);
    for (const cplx& z : ut.values) CHECK(std::abs(z - cplx(0.25, 0)) < 1e-12);
}

TEST_CASE("grid mismatch is rejected") {
    GridSpec a{1, 128, 8.0}, b{1, 64, 8.0};
    SampledField u0(a, Space::physical), u1(b, Space::physical);
    CHECK_THROWS_AS(free_kg_flow(u0, u1, 1.0), GridMismatch);
}
