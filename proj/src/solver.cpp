#include "modbox/solver.hpp"

#include <algorithm>
#include <cmath>

namespace modbox {

namespace {

constexpr double two_pi = 2.0 * 3.14159265358979323846;

// Per-mode dispersion rate: the free flow is e^{i t a(xi)} for fhnls and the
// cos/sin pair in w(xi) for the second-order equations (w = 0 marks the wave
// zero mode, handled polynomially).
std::vector<double> dispersion_rates(const EquationSpec& eq, const GridSpec& g) {
    std::vector<double> rate(g.total_points());
    double xi[3] = {0, 0, 0};
    for (std::size_t i = 0; i < rate.size(); ++i) {
        auto idx = g.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            xi[a] = g.freq(idx[a]);
            r2 += xi[a] * xi[a];
        }
        double r = two_pi * std::sqrt(r2);
        switch (eq.kind) {
            case EquationKind::fhnls: rate[i] = std::pow(r, eq.alpha); break;
            case EquationKind::hnlkg: rate[i] = std::sqrt(1.0 + r * r); break;
            case EquationKind::hnlw: rate[i] = r; break;
        }
    }
    return rate;
}

using Spectrum = std::vector<cplx>;

SampledField to_field(const GridSpec& g, const Spectrum& s, Space space) {
    SampledField f(g, Space::frequency);
    f.values = s;
    return space == Space::frequency ? f : transform(f, Direction::inverse);
}

Spectrum spectrum_of(const SampledField& f) {
    return (f.space == Space::frequency ? f : transform(f, Direction::forward)).values;
}

Spectrum nonlinearity_hat(const GridSpec& g, const Spectrum& uhat, const EquationSpec& eq) {
    SampledField u = to_field(g, uhat, Space::physical);
    SampledField F = hartree_nonlinearity(u, eq.kernel);
    return transform(F, Direction::forward).values;
}

struct MeshResult {
    std::vector<Spectrum> u;
    std::vector<Spectrum> ut;  // second order only
};

// J applied to candidate spectra on the mesh `times`; trapezoid in time with
// the propagator applied exactly per mode.
MeshResult duhamel_core(const EquationSpec& eq, const GridSpec& g,
                        const std::vector<double>& times,
                        const std::vector<Spectrum>& cand) {
    const std::size_t M = times.size();
    const std::size_t n = g.total_points();
    if (cand.size() != M || M == 0)
        throw MeshMismatch("duhamel_map: candidate does not cover the time mesh");
    for (std::size_t j = 1; j < M; ++j)
        if (!(times[j] > times[j - 1]))
            throw MeshMismatch("duhamel_map: times must be strictly increasing");

    const std::vector<double> rate = dispersion_rates(eq, g);
    const Spectrum u0 = spectrum_of(eq.u0);
    Spectrum u1;
    if (eq.second_order()) u1 = spectrum_of(*eq.u1);

    MeshResult out;
    out.u.assign(M, Spectrum(n));
    if (eq.second_order()) out.ut.assign(M, Spectrum(n));

    if (eq.kind == EquationKind::fhnls) {
        Spectrum A(n, cplx(0, 0)), Gprev(n);
        for (std::size_t j = 0; j < M; ++j) {
            Spectrum Fj = nonlinearity_hat(g, cand[j], eq);
            for (std::size_t i = 0; i < n; ++i) {
                cplx Gj = std::polar(1.0, -times[j] * rate[i]) * Fj[i];
                if (j > 0) A[i] += 0.5 * (times[j] - times[j - 1]) * (Gprev[i] + Gj);
                Gprev[i] = Gj;
                out.u[j][i] = std::polar(1.0, times[j] * rate[i]) *
                              (u0[i] - cplx(0, 1) * A[i]);
            }
        }
        return out;
    }

    // Second order: integral kernels sin((t-tau)w)/w and cos((t-tau)w) split
    // into e^{+-itw} prefix sums; zero wave mode uses moment sums instead.
    Spectrum A(n, cplx(0, 0)), B(n, cplx(0, 0)), Gp(n), Gm(n);
    cplx S0(0, 0), S1(0, 0), S0p(0, 0), S1p(0, 0);
    std::size_t zero_idx = g.flatten({0, 0, 0});
    for (std::size_t j = 0; j < M; ++j) {
        Spectrum Fj = nonlinearity_hat(g, cand[j], eq);
        double t = times[j];
        double dt = j > 0 ? times[j] - times[j - 1] : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double w = rate[i];
            if (w == 0.0) continue;
            cplx gp = std::polar(1.0, -t * w) * Fj[i];
            cplx gm = std::polar(1.0, t * w) * Fj[i];
            if (j > 0) {
                A[i] += 0.5 * dt * (Gp[i] + gp);
                B[i] += 0.5 * dt * (Gm[i] + gm);
            }
            Gp[i] = gp;
            Gm[i] = gm;
            double c = std::cos(t * w), s = std::sin(t * w);
            cplx ep = std::polar(1.0, t * w), em = std::polar(1.0, -t * w);
            cplx integral_sin = (ep * A[i] - em * B[i]) / (cplx(0, 2) * w);
            cplx integral_cos = 0.5 * (ep * A[i] + em * B[i]);
            out.u[j][i] = c * u0[i] + (s / w) * u1[i] - integral_sin;
            out.ut[j][i] = -w * s * u0[i] + c * u1[i] - integral_cos;
        }
        if (eq.kind == EquationKind::hnlw) {
            cplx f0 = Fj[zero_idx];
            if (j > 0) {
                S0 += 0.5 * dt * (S0p + f0);
                S1 += 0.5 * dt * (S1p + t * f0);
            }
            S0p = f0;
            S1p = t * f0;
            out.u[j][zero_idx] = u0[zero_idx] + t * u1[zero_idx] - (t * S0 - S1);
            out.ut[j][zero_idx] = u1[zero_idx] - S0;
        }
    }
    return out;
}

std::vector<Spectrum> free_mesh(const EquationSpec& eq, const GridSpec& g,
                                const std::vector<double>& times,
                                std::vector<Spectrum>* ut_out = nullptr) {
    const std::vector<double> rate = dispersion_rates(eq, g);
    const Spectrum u0 = spectrum_of(eq.u0);
    Spectrum u1;
    if (eq.second_order()) u1 = spectrum_of(*eq.u1);
    std::vector<Spectrum> mesh(times.size(), Spectrum(rate.size()));
    if (ut_out) ut_out->assign(times.size(), Spectrum(rate.size()));
    for (std::size_t j = 0; j < times.size(); ++j) {
        double t = times[j];
        for (std::size_t i = 0; i < rate.size(); ++i) {
            double w = rate[i];
            if (eq.kind == EquationKind::fhnls) {
                mesh[j][i] = std::polar(1.0, t * w) * u0[i];
            } else if (w == 0.0) {  // wave zero mode
                mesh[j][i] = u0[i] + t * u1[i];
                if (ut_out) (*ut_out)[j][i] = u1[i];
            } else {
                double c = std::cos(t * w), s = std::sin(t * w);
                mesh[j][i] = c * u0[i] + (s / w) * u1[i];
                if (ut_out) (*ut_out)[j][i] = -w * s * u0[i] + c * u1[i];
            }
        }
    }
    return mesh;
}

double tracked_norm_of(const SampledField& f, const NormSpec& spec, const WindowSystem& ws) {
    // Diagnostics must not abort mid-run, so the resolved-band gate is off.
    ModNormOptions opt;
    opt.escaping_mass_tol = 1.0;
    return modulation_norm(f, spec, ws, opt);
}

double grad_l2_sq(const SampledField& u) {
    SampledField uhat = transform(u, Direction::forward);
    const GridSpec& g = u.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < uhat.values.size(); ++i) {
        auto idx = g.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double xi = g.freq(idx[a]);
            r2 += xi * xi;
        }
        acc += two_pi * two_pi * r2 * std::norm(uhat.values[i]);
    }
    return acc * std::pow(g.dxi(), g.d);
}

}  // namespace

void EquationSpec::validate() const {
    u0.grid.validate();
    kernel.validate(u0.grid);
    if (second_order()) {
        if (!u1) throw ConfigError("EquationSpec: second-order equation needs u1");
        if (!(u1->grid == u0.grid)) throw GridMismatch("EquationSpec: u0/u1 grids differ");
    }
    if (kind == EquationKind::fhnls && !alpha_override &&
        !(alpha > 0.5 && alpha <= 2.0))
        throw ConfigError("EquationSpec: alpha must lie in (1/2, 2] (or set the override)");
    if (!all_finite(u0) || (u1 && !all_finite(*u1)))
        throw InvalidField("EquationSpec: non-finite initial data");
}

double kg_energy(const SampledField& u, const SampledField& ut, const EquationSpec& eq) {
    double kin = lp_norm(ut, 2.0);
    double msq = lp_norm(u, 2.0);
    double quad = 0.5 * (kin * kin + grad_l2_sq(u));
    if (eq.kind == EquationKind::hnlkg) quad += 0.5 * msq * msq;
    SampledField W = hartree_potential(u, eq.kernel);
    double quart = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        quart += W.values[i].real() * std::norm(u.values[i]);
    quart *= std::pow(u.grid.dx(), u.grid.d);
    return quad + 0.25 * quart;
}

Trajectory free_flow_trajectory(const EquationSpec& eq, const std::vector<double>& times) {
    eq.validate();
    const GridSpec& g = eq.u0.grid;
    std::vector<Spectrum> ut;
    std::vector<Spectrum> mesh = free_mesh(eq, g, times, eq.second_order() ? &ut : nullptr);
    Trajectory traj;
    traj.times = times;
    for (std::size_t j = 0; j < times.size(); ++j) {
        traj.u.push_back(to_field(g, mesh[j], Space::physical));
        if (eq.second_order()) traj.ut.push_back(to_field(g, ut[j], Space::physical));
        traj.mass.push_back(lp_norm(traj.u.back(), 2.0));
    }
    return traj;
}

Trajectory duhamel_map(const Trajectory& candidate, const EquationSpec& eq) {
    eq.validate();
    const GridSpec& g = eq.u0.grid;
    if (candidate.u.size() != candidate.times.size())
        throw MeshMismatch("duhamel_map: candidate fields do not match its times");
    std::vector<Spectrum> cand;
    cand.reserve(candidate.u.size());
    for (const SampledField& f : candidate.u) {
        if (!(f.grid == g)) throw GridMismatch("duhamel_map: candidate grid differs");
        cand.push_back(spectrum_of(f));
    }
    MeshResult res = duhamel_core(eq, g, candidate.times, cand);

    Trajectory out;
    out.times = candidate.times;
    out.tracked = candidate.tracked;
    std::optional<WindowSystem> ws;
    if (!out.tracked.empty()) ws = build_windows(g);
    for (std::size_t j = 0; j < out.times.size(); ++j) {
        out.u.push_back(to_field(g, res.u[j], Space::physical));
        if (eq.second_order()) out.ut.push_back(to_field(g, res.ut[j], Space::physical));
        out.mass.push_back(lp_norm(out.u.back(), 2.0));
        if (ws) {
            std::vector<double> row;
            for (const NormSpec& spec : out.tracked)
                row.push_back(tracked_norm_of(out.u.back(), spec, *ws));
            out.norms.push_back(row);
        }
    }
    return out;
}

std::pair<Trajectory, ConvergenceReport> picard_solve(const EquationSpec& eq,
                                                      const SolveConfig& cfg) {
    eq.validate();
    cfg.validate();
    const GridSpec& g = eq.u0.grid;
    const WindowSystem ws = build_windows(g);

    const std::size_t M = std::size_t(std::llround(cfg.T / cfg.dt));
    std::vector<double> times(M + 1);
    for (std::size_t j = 0; j <= M; ++j) times[j] = j * cfg.dt;

    std::vector<std::size_t> probes;  // increment is measured at snapshots
    for (std::size_t j = 0; j <= M; j += std::size_t(cfg.snapshot_stride)) probes.push_back(j);
    if (probes.back() != M) probes.push_back(M);

    std::vector<Spectrum> cand = free_mesh(eq, g, times);
    const NormSpec primary = cfg.tracked_norms.front();

    ConvergenceReport rep;
    MeshResult latest;
    std::vector<double> last_sweep_inc(probes.size(), 0.0);
    int consecutive_bad = 0;
    bool diverged = false;

    for (int it = 0; it < cfg.picard_max_iter; ++it) {
        try {
            latest = duhamel_core(eq, g, times, cand);
        } catch (const InvalidField&) {
            // The cubic map overflowed mid-sweep: numerically out of the
            // contraction regime.
            diverged = true;
            break;
        }
        double inc = 0.0;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            std::size_t j = probes[pi];
            Spectrum diff(latest.u[j].size());
            for (std::size_t i = 0; i < diff.size(); ++i)
                diff[i] = latest.u[j][i] - cand[j][i];
            double nj = tracked_norm_of(to_field(g, diff, Space::frequency), primary, ws);
            last_sweep_inc[pi] = nj;
            inc = std::max(inc, nj);
        }
        rep.iterations = it + 1;
        rep.increments.push_back(inc);
        if (rep.increments.size() >= 2) {
            double prev = rep.increments[rep.increments.size() - 2];
            double rho = prev > 0.0 ? inc / prev : 0.0;
            rep.rho.push_back(rho);
            consecutive_bad = (rho >= 1.0) ? consecutive_bad + 1 : 0;
        }
        cand.swap(latest.u);
        double magnitude = 0.0;
        for (const cplx& z : cand.back())
            magnitude = std::max(magnitude, std::max(std::abs(z.real()), std::abs(z.imag())));
        if (!std::isfinite(inc) || magnitude > 1e60) {
            diverged = true;
            break;
        }
        if (inc < cfg.picard_tol) {
            rep.converged = true;
            break;
        }
        if (consecutive_bad >= 3) {
            diverged = true;
            break;
        }
    }
    // After the swap, latest.ut is the time derivative paired with `cand`.
    MeshResult& fin = latest;

    Trajectory traj;
    traj.tracked = cfg.tracked_norms;
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        std::size_t j = probes[pi];
        traj.times.push_back(times[j]);
        traj.u.push_back(to_field(g, cand[j], Space::physical));
        if (eq.second_order()) traj.ut.push_back(to_field(g, fin.ut[j], Space::physical));
        std::vector<double> row;
        for (const NormSpec& spec : cfg.tracked_norms)
            row.push_back(tracked_norm_of(traj.u.back(), spec, ws));
        traj.norms.push_back(row);
        traj.mass.push_back(lp_norm(traj.u.back(), 2.0));
        if (eq.second_order())
            traj.energy.push_back(kg_energy(traj.u.back(), traj.ut.back(), eq));
        traj.picard_increment.push_back(last_sweep_inc[pi]);
    }
    traj.termination = diverged ? Termination::picard_diverged : Termination::completed;
    return {traj, rep};
}

Trajectory evolve_strang(const EquationSpec& eq, const SolveConfig& cfg) {
    eq.validate();
    cfg.validate();
    const GridSpec& g = eq.u0.grid;
    const WindowSystem ws = build_windows(g);
    const std::vector<double> rate = dispersion_rates(eq, g);
    const std::size_t n = g.total_points();
    const std::size_t M = std::size_t(std::llround(cfg.T / cfg.dt));
    const double dt = cfg.dt;

    // Exact free flow over half a step, per mode.
    std::vector<cplx> half_phase(n);
    std::vector<double> half_cos(n), half_sin_ow(n), half_wsin(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = rate[i];
        if (eq.kind == EquationKind::fhnls) {
            half_phase[i] = std::polar(1.0, 0.5 * dt * w);
        } else if (w == 0.0) {
            half_cos[i] = 1.0;
            half_sin_ow[i] = 0.5 * dt;
            half_wsin[i] = 0.0;
        } else {
            half_cos[i] = std::cos(0.5 * dt * w);
            half_sin_ow[i] = std::sin(0.5 * dt * w) / w;
            half_wsin[i] = w * std::sin(0.5 * dt * w);
        }
    }

    Trajectory traj;
    traj.tracked = cfg.tracked_norms;
    const NormSpec primary = cfg.tracked_norms.front();

    Spectrum uhat = spectrum_of(eq.u0);
    Spectrum vhat;
    if (eq.second_order()) vhat = spectrum_of(*eq.u1);

    auto half_step = [&]() {
        if (eq.kind == EquationKind::fhnls) {
            for (std::size_t i = 0; i < n; ++i) uhat[i] *= half_phase[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                cplx u = uhat[i], v = vhat[i];
                uhat[i] = half_cos[i] * u + half_sin_ow[i] * v;
                vhat[i] = -half_wsin[i] * u + half_cos[i] * v;
            }
        }
    };

    double initial_norm = -1.0;
    auto snapshot = [&](double t) -> bool {
        SampledField u = to_field(g, uhat, Space::physical);
        traj.times.push_back(t);
        traj.u.push_back(u);
        std::vector<double> row;
        for (const NormSpec& spec : cfg.tracked_norms)
            row.push_back(tracked_norm_of(u, spec, ws));
        traj.norms.push_back(row);
        traj.mass.push_back(lp_norm(u, 2.0));
        if (eq.second_order()) {
            traj.ut.push_back(to_field(g, vhat, Space::physical));
            traj.energy.push_back(kg_energy(traj.u.back(), traj.ut.back(), eq));
        }
        double nrm = row.front();
        if (initial_norm < 0.0) initial_norm = nrm;
        if (!std::isfinite(nrm)) {
            traj.termination = Termination::blowup_detected;
            traj.blowup_time = t;
            return true;
        }
        // Blow-up surrogate: threshold crossing plus monotone growth over the
        // last ten snapshots.
        if (nrm > cfg.blowup_threshold * initial_norm && traj.norms.size() >= 11) {
            bool monotone = true;
            for (std::size_t k = traj.norms.size() - 10; k < traj.norms.size(); ++k)
                if (!(traj.norms[k][0] > traj.norms[k - 1][0])) monotone = false;
            if (monotone) {
                traj.termination = Termination::blowup_detected;
                traj.blowup_time = t;
                return true;
            }
        }
        return false;
    };

    // Overflow guard: |u|^(2k) and the kick must stay representable, so the
    // state is declared blown up well before the double range runs out.
    auto state_ok = [&]() {
        constexpr double cap = 1e80;
        for (const cplx& z : uhat)
            if (!(std::abs(z.real()) < cap) || !(std::abs(z.imag()) < cap)) return false;
        for (const cplx& z : vhat)
            if (!(std::abs(z.real()) < cap) || !(std::abs(z.imag()) < cap)) return false;
        return true;
    };

    if (snapshot(0.0)) return traj;
    for (std::size_t step = 1; step <= M; ++step) {
        if (!state_ok()) {
            traj.termination = Termination::blowup_detected;
            traj.blowup_time = (step - 1) * dt;
            return traj;
        }
        half_step();
        if (eq.kind == EquationKind::fhnls) {
            SampledField u = to_field(g, uhat, Space::physical);
            SampledField W = hartree_potential(u, eq.kernel);
            for (std::size_t i = 0; i < n; ++i)
                u.values[i] *= std::polar(1.0, -dt * W.values[i].real());
            uhat = spectrum_of(u);
        } else {
            SampledField u = to_field(g, uhat, Space::physical);
            SampledField F = hartree_nonlinearity(u, eq.kernel);
            Spectrum Fhat = spectrum_of(F);
            for (std::size_t i = 0; i < n; ++i) vhat[i] -= dt * Fhat[i];
        }
        half_step();
        if (step % std::size_t(cfg.snapshot_stride) == 0 || step == M) {
            if (snapshot(step * dt)) return traj;
        }
    }
    traj.termination = Termination::completed;
    return traj;
}

ScatteringReport scattering_profile(const Trajectory& traj, const EquationSpec& eq) {
    eq.validate();
    if (traj.termination != Termination::completed)
        throw NotApplicable("scattering_profile: trajectory did not complete");
    if (eq.kind == EquationKind::hnlw)
        throw NotApplicable("scattering_profile: defined for the fhnls and hnlkg flows");
    if (traj.u.size() < 8)
        throw NotApplicable("scattering_profile: too few snapshots");

    const GridSpec& g = eq.u0.grid;
    const WindowSystem ws = build_windows(g);
    const std::vector<double> rate = dispersion_rates(eq, g);
    const std::size_t n = g.total_points();
    const std::size_t M = traj.u.size();
    const std::vector<NormSpec> tracked =
        traj.tracked.empty() ? std::vector<NormSpec>{NormSpec{2.0, 1.0, 0.0}} : traj.tracked;
    const NormSpec primary = tracked.front();

    // Pulled-back profiles at snapshot times.
    std::vector<Spectrum> prof1(M, Spectrum(n)), prof2;
    Spectrum u0 = spectrum_of(eq.u0);
    if (eq.kind == EquationKind::fhnls) {
        for (std::size_t j = 0; j < M; ++j) {
            Spectrum uh = spectrum_of(traj.u[j]);
            for (std::size_t i = 0; i < n; ++i)
                prof1[j][i] = std::polar(1.0, -traj.times[j] * rate[i]) * uh[i];
        }
    } else {
        // v1, v2 with u = G(t) v1 + G(-t) v2; trapezoid over snapshots.
        prof2.assign(M, Spectrum(n));
        Spectrum u1 = spectrum_of(*eq.u1);
        Spectrum P(n, cplx(0, 0)), Q(n, cplx(0, 0)), Pp(n), Qp(n);
        for (std::size_t j = 0; j < M; ++j) {
            Spectrum uh = spectrum_of(traj.u[j]);
            SampledField F = hartree_nonlinearity(to_field(g, uh, Space::physical), eq.kernel);
            Spectrum Fh = spectrum_of(F);
            double t = traj.times[j];
            double dt = j > 0 ? traj.times[j] - traj.times[j - 1] : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double w = rate[i];
                cplx iw(0.0, w);
                cplx gp = std::polar(1.0, -t * w) * Fh[i] / iw;
                cplx gq = std::polar(1.0, t * w) * Fh[i] / iw;
                if (j > 0) {
                    P[i] += 0.5 * dt * (Pp[i] + gp);
                    Q[i] += 0.5 * dt * (Qp[i] + gq);
                }
                Pp[i] = gp;
                Qp[i] = gq;
                cplx base1 = 0.5 * (u0[i] + u1[i] / iw);
                cplx base2 = 0.5 * (u0[i] - u1[i] / iw);
                prof1[j][i] = base1 - 0.5 * P[i];
                prof2[j][i] = base2 + 0.5 * Q[i];
            }
        }
    }

    ScatteringReport rep;
    rep.times = traj.times;

    auto diff_norm = [&](const Spectrum& a, const Spectrum& b, const NormSpec& spec) {
        Spectrum d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
        return tracked_norm_of(to_field(g, d, Space::frequency), spec, ws);
    };

    rep.adjacent_increments.assign(tracked.size(), {});
    for (std::size_t j = 0; j + 1 < M; ++j)
        for (std::size_t s = 0; s < tracked.size(); ++s) {
            double inc = diff_norm(prof1[j + 1], prof1[j], tracked[s]);
            if (eq.kind == EquationKind::hnlkg)
                inc += diff_norm(prof2[j + 1], prof2[j], tracked[s]);
            rep.adjacent_increments[s].push_back(inc);
        }

    const double t_lo = traj.times.front(), t_hi = traj.times.back();
    const double t_mid = 0.5 * (t_lo + t_hi);
    for (std::size_t j = 0; j + 1 < M; ++j) {
        double inc = rep.adjacent_increments[0][j];
        if (traj.times[j + 1] <= t_mid)
            rep.early_max_increment = std::max(rep.early_max_increment, inc);
        if (traj.times[j] >= t_mid)
            rep.late_max_increment = std::max(rep.late_max_increment, inc);
    }
    rep.halves_ratio = rep.late_max_increment > 0.0
                           ? rep.early_max_increment / rep.late_max_increment
                           : (rep.early_max_increment > 0.0 ? inf : 1.0);

    // Pairwise increment sample of the primary norm.
    std::size_t npair = std::min<std::size_t>(M, 10);
    std::vector<std::size_t> pick;
    for (std::size_t k = 0; k < npair; ++k) pick.push_back(k * (M - 1) / (npair - 1));
    for (std::size_t a : pick) rep.pair_times.push_back(traj.times[a]);
    for (std::size_t a : pick) {
        std::vector<double> row;
        for (std::size_t b : pick)
            row.push_back(a == b ? 0.0 : diff_norm(prof1[a], prof1[b], primary));
        rep.pairwise.push_back(row);
    }

    // Tail average over the last quarter of the run.
    auto tail_average = [&](const std::vector<Spectrum>& prof) {
        Spectrum avg(n, cplx(0, 0));
        std::size_t j0 = (3 * (M - 1)) / 4;
        std::size_t count = M - j0;
        for (std::size_t j = j0; j < M; ++j)
            for (std::size_t i = 0; i < n; ++i) avg[i] += prof[j][i];
        for (cplx& z : avg) z /= double(count);
        return avg;
    };
    Spectrum limit1 = tail_average(prof1);
    Spectrum limit2;
    if (eq.kind == EquationKind::hnlkg) limit2 = tail_average(prof2);

    // Residual against the reconstructed free wave.
    for (std::size_t j = 0; j < M; ++j) {
        Spectrum rec(n);
        double t = traj.times[j];
        for (std::size_t i = 0; i < n; ++i) {
            if (eq.kind == EquationKind::fhnls) {
                rec[i] = std::polar(1.0, t * rate[i]) * limit1[i];
            } else {
                rec[i] = std::polar(1.0, t * rate[i]) * limit1[i] +
                         std::polar(1.0, -t * rate[i]) * limit2[i];
            }
        }
        Spectrum uh = spectrum_of(traj.u[j]);
        rep.residual.push_back(diff_norm(uh, rec, primary));
    }

    // Monotonicity window [9T/16, 3T/4]: after transients, before the
    // averaging tail (where the residual necessarily turns around).
    double w_lo = t_lo + 0.5625 * (t_hi - t_lo);
    double w_hi = t_lo + 0.75 * (t_hi - t_lo);
    double window_max = 0.0;
    for (std::size_t j = 0; j < M; ++j)
        if (traj.times[j] >= w_lo && traj.times[j] <= w_hi)
            window_max = std::max(window_max, rep.residual[j]);
    double state_scale =
        tracked_norm_of(to_field(g, limit1, Space::frequency), primary, ws);
    const double slack = 1e-6 * window_max + 1e-12 * state_scale;
    bool monotone = true;
    for (std::size_t j = 0; j + 1 < M; ++j) {
        if (traj.times[j] < w_lo || traj.times[j + 1] > w_hi) continue;
        if (rep.residual[j + 1] > rep.residual[j] + slack) monotone = false;
    }
    rep.scattering_consistent = monotone;
    rep.limit_state = to_field(g, limit1, Space::physical);
    if (eq.kind == EquationKind::hnlkg)
        rep.limit_state2 = to_field(g, limit2, Space::physical);
    return rep;
}

}  // namespace modbox
