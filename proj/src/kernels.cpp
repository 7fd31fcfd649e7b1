#include "modbox/kernels.hpp"

#include <cmath>

namespace modbox {

namespace {
constexpr double pi = 3.14159265358979323846;

// 24-point Gauss-Legendre nodes/weights on [0, 1].
struct GaussRule {
    std::vector<double> x, w;
    GaussRule() {
        // Nodes of P_24 on [-1,1], mapped below.  Symmetric half listed.
        static const double xs[12] = {
            0.0640568928626056, 0.1911188674736163, 0.3150426796961634,
            0.4337935076260451, 0.5454214713888396, 0.6480936519369755,
            0.7401241915785544, 0.8200019859739029, 0.8864155270044011,
            0.9382745520027328, 0.9747285559713095, 0.9951872199970213};
        static const double ws[12] = {
            0.1279381953467522, 0.1258374563468283, 0.1216704729278034,
            0.1155056680537256, 0.1074442701159656, 0.0976186521041139,
            0.0861901615319533, 0.0733464814110803, 0.0592985849154368,
            0.0442774388174198, 0.0285313886289337, 0.0123412297999872};
        for (int i = 11; i >= 0; --i) {
            x.push_back(0.5 * (1.0 - xs[i]));
            w.push_back(0.5 * ws[i]);
        }
        for (int i = 0; i < 12; ++i) {
            x.push_back(0.5 * (1.0 + xs[i]));
            w.push_back(0.5 * ws[i]);
        }
    }
};

const GaussRule& gauss() {
    static GaussRule r;
    return r;
}

// Integral of |x|^(gamma-d) over an axis-aligned cube [a, a+h]^... given by
// per-axis intervals; the integrand is smooth away from the origin.
double cube_integral_smooth(int d, double gamma, const double lo[3], const double hi[3]) {
    const GaussRule& gr = gauss();
    const int n = int(gr.x.size());
    double acc = 0.0;
    if (d == 1) {
        double len = hi[0] - lo[0];
        for (int i = 0; i < n; ++i) {
            double x = lo[0] + len * gr.x[i];
            acc += gr.w[i] * len * std::pow(std::abs(x), gamma - d);
        }
        return acc;
    }
    if (d == 2) {
        double lx = hi[0] - lo[0], ly = hi[1] - lo[1];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = lo[0] + lx * gr.x[i], y = lo[1] + ly * gr.x[j];
                acc += gr.w[i] * gr.w[j] * lx * ly *
                       std::pow(std::sqrt(x * x + y * y), gamma - d);
            }
        return acc;
    }
    double lx = hi[0] - lo[0], ly = hi[1] - lo[1], lz = hi[2] - lo[2];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double x = lo[0] + lx * gr.x[i], y = lo[1] + ly * gr.x[j],
                       z = lo[2] + lz * gr.x[k];
                acc += gr.w[i] * gr.w[j] * gr.w[k] * lx * ly * lz *
                       std::pow(std::sqrt(x * x + y * y + z * z), gamma - d);
            }
    return acc;
}

}  // namespace

double riesz_constant(int d, double gamma) {
    return std::pow(pi, gamma - 0.5 * d) * std::tgamma(0.5 * (d - gamma)) /
           std::tgamma(0.5 * gamma);
}

double riesz_unit_cube_integral(int d, double gamma) {
    if (d == 1) return 1.0 / gamma;
    // Scaling identity: the integral over [0, 1/2]^d is 2^(-gamma) times the
    // one over [0, 1]^d, so only the origin-free shell needs quadrature.
    double shell = 0.0;
    double lo[3], hi[3];
    int cells = 1 << d;
    for (int mask = 1; mask < cells; ++mask) {
        for (int a = 0; a < d; ++a) {
            lo[a] = (mask >> a) & 1 ? 0.5 : 0.0;
            hi[a] = lo[a] + 0.5;
        }
        shell += cube_integral_smooth(d, gamma, lo, hi);
    }
    return shell / (1.0 - std::pow(2.0, -gamma));
}

std::vector<cplx> riesz_multiplier(const GridSpec& grid, double gamma, double lambda,
                                   ZeroModePolicy zero_mode) {
    grid.validate();
    if (!(gamma > 0.0 && gamma < grid.d))
        throw InvalidGamma("riesz_multiplier: gamma must lie in (0, d)");

    const double c = riesz_constant(grid.d, gamma);
    const double h = grid.dxi();
    double zero_value = 0.0;
    if (zero_mode == ZeroModePolicy::box_average) {
        // (1/h^d) integral of c |xi|^(gamma-d) over the zero cell.
        zero_value = c * std::pow(0.5 * h, gamma - grid.d) *
                     riesz_unit_cube_integral(grid.d, gamma);
    }

    std::vector<cplx> table(grid.total_points());
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.d; ++a) {
            double xi = grid.freq(idx[a]);
            r2 += xi * xi;
        }
        double v = (r2 == 0.0) ? zero_value : c * std::pow(std::sqrt(r2), gamma - grid.d);
        table[i] = cplx(lambda * v, 0.0);
    }
    return table;
}

SampledField fractional_integral(const SampledField& f, double gamma,
                                 ZeroModePolicy zero_mode, double lambda) {
    return apply_multiplier(f, riesz_multiplier(f.grid, gamma, lambda, zero_mode));
}

void HartreeKernel::validate(const GridSpec& grid) const {
    if (power_k < 1) throw ConfigError("HartreeKernel: power_k must be a positive integer");
    if (kind == Kind::riesz) {
        if (!(gamma > 0.0 && gamma < grid.d))
            throw InvalidGamma("HartreeKernel: gamma must lie in (0, d)");
    } else {
        if (!sampled) throw ConfigError("HartreeKernel: sampled kernel missing its field");
        if (!(sampled->grid == grid))
            throw GridMismatch("HartreeKernel: sampled potential grid differs");
        if (sampled->space != Space::physical)
            throw ConfigError("HartreeKernel: sampled potential must be physical-space");
        double scale = 0.0, imag = 0.0;
        for (const cplx& z : sampled->values) {
            scale = std::max(scale, std::abs(z));
            imag = std::max(imag, std::abs(z.imag()));
        }
        if (scale > 0.0 && imag > 1e-12 * scale)
            throw ConfigError("HartreeKernel: sampled potential must be real-valued");
    }
}

std::vector<cplx> kernel_symbol(const HartreeKernel& kernel, const GridSpec& grid) {
    kernel.validate(grid);
    if (kernel.kind == HartreeKernel::Kind::riesz)
        return riesz_multiplier(grid, kernel.gamma, kernel.lambda, kernel.zero_mode);
    SampledField vhat = transform(*kernel.sampled, Direction::forward);
    return vhat.values;
}

namespace {

void dealias_two_thirds(SampledField& w) {
    SampledField what = transform(w, Direction::forward);
    const GridSpec& g = w.grid;
    const double cut = (2.0 / 3.0) * g.nyquist();
    for (std::size_t i = 0; i < what.values.size(); ++i) {
        auto idx = g.unflatten(i);
        for (int a = 0; a < g.d; ++a)
            if (std::abs(g.freq(idx[a])) > cut) {
                what.values[i] = cplx(0.0, 0.0);
                break;
            }
    }
    w = transform(what, Direction::inverse);
}

}  // namespace

SampledField hartree_potential(const SampledField& u, const HartreeKernel& kernel) {
    if (u.space != Space::physical)
        throw InvalidField("hartree_potential: u must be in physical space");
    kernel.validate(u.grid);

    SampledField w(u.grid, Space::physical);
    const int twok = 2 * kernel.power_k;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        double m2 = std::norm(u.values[i]);
        w.values[i] = (twok == 2) ? m2 : std::pow(m2, kernel.power_k);
    }
    if (kernel.dealias) dealias_two_thirds(w);
    return apply_multiplier(w, kernel_symbol(kernel, u.grid));
}

SampledField hartree_nonlinearity(const SampledField& u, const HartreeKernel& kernel) {
    SampledField w = hartree_potential(u, kernel);
    SampledField out = u;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= w.values[i];
    return out;
}

}  // namespace modbox
