#include "modbox/modnorm.hpp"

#include <cmath>

namespace modbox {

double bessel_bracket(const double* xi, int d) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += xi[i] * xi[i];
    constexpr double four_pi2 = 4.0 * 3.14159265358979323846 * 3.14159265358979323846;
    return std::sqrt(1.0 + four_pi2 * r2);
}

namespace {

// Lexicographic enumeration of |k|_inf <= K_max, deterministic.
template <typename F>
void for_each_box(int d, int k_max, F&& fn) {
    std::array<int, 3> k{0, 0, 0};
    if (d == 1) {
        for (k[0] = -k_max; k[0] <= k_max; ++k[0]) fn(k);
    } else if (d == 2) {
        for (k[0] = -k_max; k[0] <= k_max; ++k[0])
            for (k[1] = -k_max; k[1] <= k_max; ++k[1]) fn(k);
    } else {
        for (k[0] = -k_max; k[0] <= k_max; ++k[0])
            for (k[1] = -k_max; k[1] <= k_max; ++k[1])
                for (k[2] = -k_max; k[2] <= k_max; ++k[2]) fn(k);
    }
}

double combine_lq(const std::vector<double>& weighted, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : weighted) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    if (q == 1.0) {
        for (double v : weighted) acc += v;
        return acc;
    }
    if (q == 2.0) {
        for (double v : weighted) acc += v * v;
        return std::sqrt(acc);
    }
    for (double v : weighted) acc += std::pow(v, q);
    return std::pow(acc, 1.0 / q);
}

}  // namespace

ModNormResult modulation_norm_detail(const SampledField& f, const NormSpec& spec,
                                     const WindowSystem& ws, const ModNormOptions& opt) {
    spec.validate();
    const GridSpec& g = ws.grid();
    if (!(f.grid == g)) throw GridMismatch("modulation_norm: field grid differs from windows");
    if (opt.fast_l2_path && spec.p != 2.0)
        throw InvalidExponent("modulation_norm: fast_l2_path requires p = 2");

    SampledField fhat = (f.space == Space::frequency) ? f : transform(f, Direction::forward);

    ModNormResult res;
    res.escaping_mass = spectral_mass_outside(fhat, double(ws.k_max() - 1));
    if (res.escaping_mass > opt.escaping_mass_tol)
        throw SpectrumNotResolved("modulation_norm: spectral mass escapes the resolved band",
                                  res.escaping_mass);

    const double cell = std::pow(g.dxi(), g.d);

    // Pass 1: windowed spectral mass per box, plus the rigorous cap
    //   ||box_k f||_Lp <= L^(d/p) 2^(d/2) ||sigma_k f_hat||_l2
    // (sup bounded by the l1 spectrum, Cauchy-Schwarz over the 2-cube
    // support).  Boxes whose cap is negligible against the total are skipped
    // without a transform.
    struct BoxInfo {
        std::array<int, 3> k;
        double mass2;
        double weight;
    };
    std::vector<BoxInfo> boxes;
    for_each_box(g.d, ws.k_max(), [&](const std::array<int, 3>& k) {
        std::array<std::vector<int>, 3> supp;
        for (int i = 0; i < g.d; ++i) supp[i] = ws.axis_support(k[i]);
        double mass2 = 0.0;
        std::array<int, 3> m{0, 0, 0};
        std::function<void(int)> walk = [&](int axis) {
            if (axis == g.d) {
                std::size_t flat = g.flatten(m);
                double sig = ws.sigma(k, m);
                if (sig != 0.0) mass2 += sig * sig * std::norm(fhat.values[flat]);
                return;
            }
            for (int idx : supp[axis]) {
                m[axis] = idx;
                walk(axis + 1);
            }
        };
        walk(0);
        double k2 = 0.0;
        for (int i = 0; i < g.d; ++i) k2 += double(k[i]) * k[i];
        boxes.push_back({k, mass2, weight_bracket(k2, spec.s)});
    });

    const double cap_factor = std::isinf(spec.p)
                                  ? std::pow(2.0, 0.5 * g.d)
                                  : std::pow(g.L, g.d / spec.p) * std::pow(2.0, 0.5 * g.d);
    double total_cap = 0.0;
    for (const BoxInfo& b : boxes)
        total_cap += b.weight * cap_factor * std::sqrt(b.mass2 * cell);
    const double skip_below = 1e-18 * total_cap;

    std::vector<double> weighted;
    SampledField masked(g, Space::frequency);
    for (const BoxInfo& b : boxes) {
        double norm_p;
        double cap = b.weight * cap_factor * std::sqrt(b.mass2 * cell);
        if (b.mass2 == 0.0 || cap <= skip_below) {
            norm_p = 0.0;
        } else if (spec.p == 2.0) {
            // Plancherel: the physical L^2 norm equals the frequency sum.
            norm_p = std::sqrt(b.mass2 * cell);
        } else {
            std::array<std::vector<int>, 3> supp;
            for (int i = 0; i < g.d; ++i) supp[i] = ws.axis_support(b.k[i]);
            std::array<int, 3> m{0, 0, 0};
            std::vector<std::size_t> touched;
            std::function<void(int)> fill = [&](int axis) {
                if (axis == g.d) {
                    std::size_t flat = g.flatten(m);
                    double sig = ws.sigma(b.k, m);
                    if (sig != 0.0) {
                        masked.values[flat] = sig * fhat.values[flat];
                        touched.push_back(flat);
                    }
                    return;
                }
                for (int idx : supp[axis]) {
                    m[axis] = idx;
                    fill(axis + 1);
                }
            };
            fill(0);
            SampledField piece = transform(masked, Direction::inverse);
            norm_p = lp_norm(piece, spec.p);
            for (std::size_t flat : touched) masked.values[flat] = cplx(0.0, 0.0);
        }
        res.per_box.push_back(norm_p);
        weighted.push_back(b.weight * norm_p);
    }

    res.value = combine_lq(weighted, spec.q);
    return res;
}

double modulation_norm(const SampledField& f, const NormSpec& spec, const WindowSystem& ws,
                       const ModNormOptions& opt) {
    return modulation_norm_detail(f, spec, ws, opt).value;
}

SampledField default_gaussian_window(const GridSpec& grid) {
    SampledField g(grid, Space::physical);
    const double pi = 3.14159265358979323846;
    const double amp = std::pow(2.0, grid.d / 4.0);  // unit L^2 norm on R^d
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.d; ++a) {
            double x = grid.coord(idx[a]);
            r2 += x * x;
        }
        g.values[i] = amp * std::exp(-pi * r2);
    }
    return g;
}

namespace {

double stft_norm_at(const SampledField& f, const NormSpec& spec, const SampledField& win,
                    int a_steps, int b_steps) {
    const GridSpec& g = f.grid;
    const int d = g.d;
    const int nx_axis = g.N / a_steps;  // lattice points per axis
    const double a_real = a_steps * g.dx();
    const double b_real = b_steps * g.dxi();

    // Frequency sublattice: stored indices whose signed index is a multiple
    // of b_steps.
    std::vector<int> wsub;
    for (int s = -g.N / 2; s < g.N / 2; ++s)
        if (s % b_steps == 0) wsub.push_back(s >= 0 ? s : s + g.N);

    std::size_t n_w = 1;
    for (int i = 0; i < d; ++i) n_w *= wsub.size();

    const bool p_inf = std::isinf(spec.p);
    std::vector<double> inner(n_w, 0.0);  // sum over x of |V|^p, or running max

    SampledField h(g, Space::physical);
    std::array<int, 3> shift{0, 0, 0};
    std::function<void(int)> over_x = [&](int axis) {
        if (axis == d) {
            // h(t) = f(t) conj(g(t - x)), circular shift by a_steps lattice.
            for (std::size_t i = 0; i < h.values.size(); ++i) {
                auto idx = g.unflatten(i);
                std::array<int, 3> src = idx;
                for (int ax = 0; ax < d; ++ax) src[ax] = idx[ax] - shift[ax];
                h.values[i] = f.values[i] * std::conj(win.values[g.flatten(src)]);
            }
            SampledField hhat = transform(h, Direction::forward);
            // Walk the w sublattice.
            std::array<std::size_t, 3> stridez{0, 0, 0};
            std::size_t w_flat = 0;
            std::array<int, 3> wi{0, 0, 0};
            std::function<void(int)> over_w = [&](int waxis) {
                if (waxis == d) {
                    std::array<int, 3> midx{0, 0, 0};
                    for (int ax = 0; ax < d; ++ax) midx[ax] = wsub[std::size_t(wi[ax])];
                    double mag = std::abs(hhat.values[g.flatten(midx)]);
                    std::size_t pos = 0;
                    for (int ax = 0; ax < d; ++ax) pos = pos * wsub.size() + std::size_t(wi[ax]);
                    if (p_inf)
                        inner[pos] = std::max(inner[pos], mag);
                    else
                        inner[pos] += std::pow(mag, spec.p);
                    return;
                }
                for (wi[waxis] = 0; wi[waxis] < int(wsub.size()); ++wi[waxis]) over_w(waxis + 1);
            };
            over_w(0);
            (void)stridez;
            (void)w_flat;
            return;
        }
        for (int j = 0; j < nx_axis; ++j) {
            shift[axis] = j * a_steps;
            over_x(axis + 1);
        }
    };
    over_x(0);

    // Assemble the outer weighted l^q sum over the w sublattice.
    const double xcell = std::pow(a_real, d);
    const double wcell = std::pow(b_real, d);
    std::vector<double> weighted;
    weighted.reserve(n_w);
    std::array<int, 3> wi{0, 0, 0};
    std::function<void(int)> emit = [&](int waxis) {
        if (waxis == d) {
            std::size_t pos = 0;
            double w2 = 0.0;
            for (int ax = 0; ax < d; ++ax) {
                pos = pos * wsub.size() + std::size_t(wi[ax]);
                double wfreq = g.freq(wsub[std::size_t(wi[ax])]);
                w2 += wfreq * wfreq;
            }
            double ip = p_inf ? inner[pos] : std::pow(inner[pos] * xcell, 1.0 / spec.p);
            weighted.push_back(weight_bracket(w2, spec.s) * ip);
            return;
        }
        for (wi[waxis] = 0; wi[waxis] < int(wsub.size()); ++wi[waxis]) emit(waxis + 1);
    };
    emit(0);

    if (std::isinf(spec.q)) return combine_lq(weighted, spec.q);
    double acc = 0.0;
    for (double v : weighted) acc += std::pow(v, spec.q);
    return std::pow(acc * wcell, 1.0 / spec.q);
}

}  // namespace

StftNormResult stft_norm_detail(const SampledField& f, const NormSpec& spec,
                                const StftSpec& stft, double convergence_tol) {
    spec.validate();
    stft.validate();
    const GridSpec& g = f.grid;
    SampledField fp = (f.space == Space::physical) ? f : transform(f, Direction::inverse);

    SampledField win = stft.window ? *stft.window : default_gaussian_window(g);
    if (!(win.grid == g)) throw GridMismatch("stft_norm: window grid differs from field");
    double gnorm = lp_norm(win, 2.0);
    if (std::abs(gnorm - 1.0) > 1e-10)
        throw ConfigError("stft_norm: window must have unit L^2 norm");

    auto steps_for = [&](double step, double cellwidth, const char* what) {
        int n = int(std::floor(step / cellwidth + 1e-12));
        if (n < 1)
            throw ConfigError(std::string("stft_norm: grid too coarse to realize the ") + what +
                              " lattice step");
        return n;
    };
    int a1 = steps_for(stft.a, g.dx(), "spatial");
    int b1 = steps_for(stft.b, g.dxi(), "frequency");
    int a2 = steps_for(stft.a / 2.0, g.dx(), "refined spatial");
    int b2 = steps_for(stft.b / 2.0, g.dxi(), "refined frequency");

    StftNormResult r;
    r.coarse_value = stft_norm_at(fp, spec, win, a1, b1);
    r.value = stft_norm_at(fp, spec, win, a2, b2);
    r.refinement_delta =
        r.value > 0.0 ? std::abs(r.value - r.coarse_value) / r.value : 0.0;
    if (r.refinement_delta > convergence_tol)
        throw LatticeNotConverged("stft_norm: halving the lattice steps changed the value by " +
                                  std::to_string(100.0 * r.refinement_delta) + "%");
    return r;
}

double stft_norm(const SampledField& f, const NormSpec& spec, const StftSpec& stft) {
    return stft_norm_detail(f, spec, stft).value;
}

SampledField bessel_potential(const SampledField& f, double sigma) {
    if (sigma == 0.0) return f;
    return apply_multiplier(f, [sigma](const double* xi, int d) {
        return cplx(std::pow(bessel_bracket(xi, d), sigma), 0.0);
    });
}

}  // namespace modbox
