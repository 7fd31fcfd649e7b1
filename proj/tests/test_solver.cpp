#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "modbox/corpus.hpp"
#include "modbox/solver.hpp"

using namespace modbox;

namespace {
constexpr double pi = 3.14159265358979323846;

GridSpec grid1d() { return GridSpec{1, 512, 32.0}; }

HartreeKernel riesz(double lambda, double gamma, int k = 1) {
    HartreeKernel ker;
    ker.lambda = lambda;
    ker.gamma = gamma;
    ker.power_k = k;
    return ker;
}

EquationSpec fhnls_gaussian(const GridSpec& g, double scale, double lambda,
                            double gamma = 0.5) {
    EquationSpec eq;
    eq.kind = EquationKind::fhnls;
    eq.alpha = 2.0;
    eq.kernel = riesz(lambda, gamma);
    eq.u0 = gaussian_field(g, 1.0, {0, 0, 0});
    for (cplx& z : eq.u0.values) z *= scale;
    return eq;
}

EquationSpec kg_gaussian(const GridSpec& g, double scale, double lambda) {
    EquationSpec eq;
    eq.kind = EquationKind::hnlkg;
    eq.kernel = riesz(lambda, 0.5);
    eq.u0 = gaussian_field(g, 1.0, {0, 0, 0});
    for (cplx& z : eq.u0.values) z *= scale;
    eq.u1 = SampledField(g, Space::physical);
    return eq;
}

std::vector<double> mesh_times(double T, double dt) {
    std::size_t M = std::size_t(std::llround(T / dt));
    std::vector<double> t(M + 1);
    for (std::size_t j = 0; j <= M; ++j) t[j] = j * dt;
    return t;
}

double field_diff(const SampledField& a, const SampledField& b) {
    return lp_norm(a - b, 2.0);
}
}  // namespace

TEST_CASE("duhamel map with lambda = 0 reproduces the free flow") {
    GridSpec g = grid1d();
    EquationSpec eq = fhnls_gaussian(g, 0.1, 0.0);
    auto times = mesh_times(1.0, 0.05);
    Trajectory cand;
    cand.times = times;
    for (std::size_t j = 0; j < times.size(); ++j) cand.u.push_back(SampledField(g, Space::physical));
    Trajectory J = duhamel_map(cand, eq);
    Trajectory free = free_flow_trajectory(eq, times);
    for (std::size_t j = 0; j < times.size(); ++j)
        CHECK(field_diff(J.u[j], free.u[j]) < 1e-13);
}

TEST_CASE("duhamel map with zero data and zero candidate is zero") {
    GridSpec g = grid1d();
    EquationSpec eq;
    eq.kind = EquationKind::fhnls;
    eq.kernel = riesz(1.0, 0.5);
    eq.u0 = SampledField(g, Space::physical);
    auto times = mesh_times(0.5, 0.05);
    Trajectory cand;
    cand.times = times;
    for (std::size_t j = 0; j < times.size(); ++j)
        cand.u.push_back(SampledField(g, Space::physical));
    Trajectory J = duhamel_map(cand, eq);
    for (const SampledField& u : J.u) CHECK(lp_norm(u, 2.0) == 0.0);
}

TEST_CASE("one Picard sweep matches the exact single-mode solution to O(lambda^2)") {
    // For u0 = A e^{2 pi i xi0 x} (physical amplitude A) the flow stays a
    // single mode: u(t) = A e^{i t a(xi0)} e^{-i m0 A^2 t}, m0 the kernel
    // zero mode.  One sweep from the free flow reproduces the first-order
    // term, so the discrepancy scales like lambda^2.
    GridSpec g = grid1d();
    const double A = 0.5, xi0 = 2.0;

    double first_ratio = 0.0;
    for (double lambda : {1e-2, 1e-3, 1e-4}) {
        EquationSpec eq;
        eq.kind = EquationKind::fhnls;
        eq.kernel = riesz(lambda, 0.5);
        eq.u0 = SampledField(g, Space::physical);
        for (int n = 0; n < g.N; ++n)
            eq.u0.values[std::size_t(n)] = A * std::polar(1.0, 2 * pi * xi0 * g.coord(n));

        auto times = mesh_times(1.0, 1e-3);
        Trajectory free = free_flow_trajectory(eq, times);
        Trajectory J = duhamel_map(free, eq);

        auto symbol = kernel_symbol(eq.kernel, g);
        double m0 = symbol[0].real();
        double a0 = std::pow(2.0 * pi * xi0, 2.0);
        SampledField exact(g, Space::physical);
        cplx amp = A * std::polar(1.0, a0 * 1.0 - m0 * A * A * 1.0);
        for (int n = 0; n < g.N; ++n)
            exact.values[std::size_t(n)] = amp * std::polar(1.0, 2 * pi * xi0 * g.coord(n));

        double err = field_diff(J.u.back(), exact);
        double ratio = err / (lambda * lambda);
        if (first_ratio == 0.0)
            first_ratio = ratio;
        else
            CHECK(ratio < 3.0 * first_ratio + 1.0);
    }
}

TEST_CASE("Picard with lambda = 0 converges in one sweep") {
    GridSpec g = grid1d();
    EquationSpec eq = fhnls_gaussian(g, 0.1, 0.0);
    SolveConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 0.05;
    cfg.method = Method::picard;
    cfg.tracked_norms = {NormSpec{2, 1, 0}};
    auto [traj, rep] = picard_solve(eq, cfg);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(traj.termination == Termination::completed);
    auto free = free_flow_trajectory(eq, traj.times);
    for (std::size_t j = 0; j < traj.times.size(); ++j)
        CHECK(field_diff(traj.u[j], free.u[j]) < 1e-12);
}

TEST_CASE("Picard contracts on small data and the fixed point is resolution-stable") {
    SolveConfig cfg;
    cfg.T = 2.0;
    cfg.dt = 0.002;
    cfg.method = Method::picard;
    cfg.picard_tol = 1e-10;
    cfg.snapshot_stride = 100;
    cfg.tracked_norms = {NormSpec{2, 1, 0}};

    std::vector<std::vector<double>> norm_series;
    for (int N : {256, 512}) {
        GridSpec g{1, N, 16.0};
        EquationSpec eq = fhnls_gaussian(g, 0.05, 1.0);
        auto [traj, rep] = picard_solve(eq, cfg);
        CHECK(rep.converged);
        CHECK(rep.iterations <= 15);
        CHECK(rep.increments.back() < cfg.picard_tol);
        for (std::size_t i = 1; i < rep.rho.size(); ++i) CHECK(rep.rho[i - 1] < 1.0);
        std::vector<double> series;
        for (const auto& row : traj.norms) series.push_back(row[0]);
        norm_series.push_back(series);
    }
    for (std::size_t j = 0; j < norm_series[0].size(); ++j)
        CHECK(std::abs(norm_series[0][j] - norm_series[1][j]) < 1e-6);
}

TEST_CASE("Picard diverges on large data") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = fhnls_gaussian(g, 5.0, 1.0);  // datum x100 over the small run
    SolveConfig cfg;
    cfg.T = 2.0;
    cfg.dt = 0.01;
    cfg.method = Method::picard;
    cfg.picard_max_iter = 25;
    auto [traj, rep] = picard_solve(eq, cfg);
    CHECK(!rep.converged);
    CHECK(traj.termination == Termination::picard_diverged);
}

TEST_CASE("fixed-point consistency of the converged Picard solution") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = fhnls_gaussian(g, 0.05, 1.0);
    SolveConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 0.002;
    cfg.method = Method::picard;
    cfg.picard_tol = 1e-11;
    cfg.snapshot_stride = 1;
    cfg.tracked_norms = {NormSpec{2, 1, 0}};
    auto [traj, rep] = picard_solve(eq, cfg);
    REQUIRE(rep.converged);
    Trajectory J = duhamel_map(traj, eq);
    WindowSystem ws = build_windows(g);
    double worst = 0;
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        ModNormOptions opt;
        opt.escaping_mass_tol = 1.0;
        worst = std::max(worst,
                         modulation_norm(J.u[j] - traj.u[j], NormSpec{2, 1, 0}, ws, opt));
    }
    CHECK(worst <= 10.0 * cfg.picard_tol);
}

TEST_CASE("Strang with lambda = 0 matches the exact free flow") {
    GridSpec g = grid1d();
    EquationSpec eq = fhnls_gaussian(g, 0.1, 0.0);
    SolveConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 0.01;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 20;
    Trajectory traj = evolve_strang(eq, cfg);
    Trajectory free = free_flow_trajectory(eq, traj.times);
    for (std::size_t j = 0; j < traj.times.size(); ++j)
        CHECK(field_diff(traj.u[j], free.u[j]) < 1e-10);
}

TEST_CASE("Strang is second order against a Picard reference") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = fhnls_gaussian(g, 0.2, 1.0);
    SolveConfig ref;
    ref.T = 0.5;
    ref.dt = 1e-3;
    ref.method = Method::picard;
    ref.picard_tol = 1e-12;
    ref.snapshot_stride = 500;
    auto [reft, rep] = picard_solve(eq, ref);
    REQUIRE(rep.converged);
    const SampledField& target = reft.u.back();

    auto err_at = [&](double dt) {
        SolveConfig cfg;
        cfg.T = 0.5;
        cfg.dt = dt;
        cfg.method = Method::strang;
        cfg.snapshot_stride = int(std::llround(0.5 / dt));
        Trajectory t = evolve_strang(eq, cfg);
        return field_diff(t.u.back(), target);
    };
    double e1 = err_at(0.025), e2 = err_at(0.0125), e3 = err_at(0.00625);
    double order12 = std::log2(e1 / e2), order23 = std::log2(e2 / e3);
    CHECK(order12 > 1.8);
    CHECK(order12 < 2.2);
    CHECK(order23 > 1.7);
    CHECK(order23 < 2.3);
}

TEST_CASE("mass conservation for the first-order flow") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = fhnls_gaussian(g, 0.05, 1.0);

    SolveConfig sc;
    sc.T = 2.0;
    sc.dt = 0.01;
    sc.method = Method::strang;
    sc.snapshot_stride = 10;
    Trajectory st = evolve_strang(eq, sc);
    for (double m : st.mass) CHECK(std::abs(m - st.mass[0]) <= 1e-10 * st.mass[0]);

    SolveConfig pc;
    pc.T = 1.0;
    pc.dt = 5e-4;
    pc.method = Method::picard;
    pc.snapshot_stride = 200;
    auto [pt, rep] = picard_solve(eq, pc);
    REQUIRE(rep.converged);
    for (double m : pt.mass) CHECK(std::abs(m - pt.mass[0]) <= 1e-8 * pt.mass[0]);
}

TEST_CASE("Klein-Gordon energy drift stays small for small data") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = kg_gaussian(g, 0.05, 1.0);
    SolveConfig cfg;
    cfg.T = 2.0;
    cfg.dt = 0.002;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 50;
    Trajectory traj = evolve_strang(eq, cfg);
    REQUIRE(traj.termination == Termination::completed);
    for (double e : traj.energy)
        CHECK(std::abs(e - traj.energy[0]) <= 1e-6 * std::abs(traj.energy[0]));
}

TEST_CASE("time continuity: adjacent increments shrink linearly with dt") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = fhnls_gaussian(g, 0.1, 1.0);
    WindowSystem ws = build_windows(g);
    auto max_increment = [&](double dt) {
        SolveConfig cfg;
        cfg.T = 0.5;
        cfg.dt = dt;
        cfg.method = Method::strang;
        cfg.snapshot_stride = 1;
        Trajectory t = evolve_strang(eq, cfg);
        double worst = 0;
        ModNormOptions opt;
        opt.escaping_mass_tol = 1.0;
        for (std::size_t j = 0; j + 1 < t.u.size(); ++j)
            worst = std::max(worst, modulation_norm(t.u[j + 1] - t.u[j],
                                                    NormSpec{2, 1, 0}, ws, opt));
        return worst;
    };
    double i1 = max_increment(0.02), i2 = max_increment(0.01);
    CHECK(i1 / i2 > 1.5);
    CHECK(i1 / i2 < 2.5);
}

TEST_CASE("focusing large datum trips the blow-up monitor") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = kg_gaussian(g, 1.5, -2.0);
    SolveConfig cfg;
    cfg.T = 20.0;
    cfg.dt = 0.005;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 1;
    cfg.blowup_threshold = 1e3;
    Trajectory traj = evolve_strang(eq, cfg);
    REQUIRE(traj.termination == Termination::blowup_detected);
    CHECK(traj.blowup_time > 0.0);
    // Monotone escalation at the tail of the recorded history.
    std::size_t n = traj.norms.size();
    REQUIRE(n >= 11);
    for (std::size_t k = n - 10; k < n; ++k)
        CHECK(traj.norms[k][0] > traj.norms[k - 1][0]);
}

TEST_CASE("free solutions scatter to themselves") {
    GridSpec g = grid1d();
    EquationSpec eq = fhnls_gaussian(g, 0.1, 0.0);
    SolveConfig cfg;
    cfg.T = 10.0;
    cfg.dt = 0.05;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 20;
    Trajectory traj = evolve_strang(eq, cfg);
    ScatteringReport rep = scattering_profile(traj, eq);
    for (const auto& series : rep.adjacent_increments)
        for (double v : series) CHECK(v <= 1e-11);
    for (double r : rep.residual) CHECK(r <= 1e-11);
    CHECK(rep.scattering_consistent);
}

TEST_CASE("small-data dispersive run has Cauchy profile tails") {
    GridSpec g{1, 1024, 128.0};
    EquationSpec eq;
    eq.kind = EquationKind::fhnls;
    eq.alpha = 2.0;
    eq.kernel = riesz(1.0, 0.8);
    eq.u0 = gaussian_field(g, 1.5, {0, 0, 0});
    for (cplx& z : eq.u0.values) z *= 0.05;
    SolveConfig cfg;
    cfg.T = 50.0;
    cfg.dt = 0.02;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 50;
    cfg.tracked_norms = {NormSpec{2, 1, 0}};
    Trajectory traj = evolve_strang(eq, cfg);
    REQUIRE(traj.termination == Termination::completed);
    ScatteringReport rep = scattering_profile(traj, eq);
    CHECK(rep.halves_ratio >= 5.0);
    CHECK(rep.scattering_consistent);
}

TEST_CASE("Klein-Gordon scattering reconstruction residual decreases") {
    GridSpec g{1, 512, 64.0};
    EquationSpec eq = kg_gaussian(g, 0.05, 1.0);
    SolveConfig cfg;
    cfg.T = 40.0;
    cfg.dt = 0.02;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 50;
    cfg.tracked_norms = {NormSpec{4, 1, 0}};
    Trajectory traj = evolve_strang(eq, cfg);
    REQUIRE(traj.termination == Termination::completed);
    ScatteringReport rep = scattering_profile(traj, eq);
    CHECK(rep.scattering_consistent);
    CHECK(rep.halves_ratio > 1.0);
}

TEST_CASE("scattering is not applicable to incomplete or wave runs") {
    GridSpec g{1, 256, 16.0};
    EquationSpec eq = kg_gaussian(g, 1.5, -2.0);
    SolveConfig cfg;
    cfg.T = 20.0;
    cfg.dt = 0.005;
    cfg.method = Method::strang;
    cfg.snapshot_stride = 1;
    cfg.blowup_threshold = 1e3;
    Trajectory traj = evolve_strang(eq, cfg);
    REQUIRE(traj.termination == Termination::blowup_detected);
    CHECK_THROWS_AS(scattering_profile(traj, eq), NotApplicable);
}

TEST_CASE("config validation") {
    SolveConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    GridSpec g{1, 256, 16.0};
    EquationSpec eq;
    eq.kind = EquationKind::hnlkg;
    eq.kernel = riesz(1.0, 0.5);
    eq.u0 = SampledField(g, Space::physical);
    CHECK_THROWS_AS(eq.validate(), ConfigError);  // missing u1
    EquationSpec fr;
    fr.kind = EquationKind::fhnls;
    fr.alpha = 0.3;
    fr.kernel = riesz(1.0, 0.5);
    fr.u0 = SampledField(g, Space::physical);
    CHECK_THROWS_AS(fr.validate(), ConfigError);
    fr.alpha_override = true;
    CHECK_NOTHROW(fr.validate());
}
