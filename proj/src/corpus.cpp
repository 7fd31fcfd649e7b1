#include "modbox/corpus.hpp"

#include <cmath>

#include "modbox/random.hpp"
#include "modbox/windows.hpp"

namespace modbox {

namespace {
constexpr double pi = 3.14159265358979323846;

// Smooth rolloff: 1 inside half the band, 0 at the band edge.
double envelope(double r, double band) { return WindowSystem::phi(std::abs(r) / band); }
}  // namespace

SampledField gaussian_field(const GridSpec& grid, double width,
                            const std::array<int, 3>& modulation) {
    SampledField f(grid, Space::physical);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto idx = grid.unflatten(i);
        double r2 = 0.0, phase = 0.0;
        for (int a = 0; a < grid.d; ++a) {
            double x = grid.coord(idx[a]);
            r2 += (x / width) * (x / width);
            phase += 2.0 * pi * modulation[a] * x;
        }
        f.values[i] = std::polar(std::exp(-pi * r2), phase);
    }
    double nrm = lp_norm(f, 2.0);
    for (cplx& z : f.values) z /= nrm;
    return f;
}

std::vector<SampledField> make_corpus(const GridSpec& grid, const CorpusSpec& spec) {
    grid.validate();
    if (spec.count < 1) throw ConfigError("CorpusSpec: count must be positive");
    std::vector<SampledField> out;
    out.reserve(std::size_t(spec.count));

    if (spec.kind == CorpusKind::gaussian_family) {
        for (int i = 0; i < spec.count; ++i) {
            double w = spec.widths[std::size_t(i) % spec.widths.size()];
            auto m = spec.modulations[(std::size_t(i) / spec.widths.size()) %
                                      spec.modulations.size()];
            out.push_back(gaussian_field(grid, w, m));
        }
        return out;
    }

    if (spec.kind == CorpusKind::single_box) {
        for (int i = 0; i < spec.count; ++i) {
            auto k = spec.boxes[std::size_t(i) % spec.boxes.size()];
            SampledField fh(grid, Space::frequency);
            std::array<int, 3> m{0, 0, 0};
            for (int a = 0; a < grid.d; ++a) {
                long s = std::lround(k[a] * grid.L);  // xi = k sits on the grid
                if (std::abs(k[a] * grid.L - double(s)) > 1e-9 ||
                    s < -grid.N / 2 || s >= grid.N / 2)
                    throw ConfigError("single_box corpus: box center off the grid");
                m[a] = int(s >= 0 ? s : s + grid.N);
            }
            fh.values[grid.flatten(m)] = cplx(1.0, 0.0);
            SampledField f = transform(fh, Direction::inverse);
            double nrm = lp_norm(f, 2.0);
            for (cplx& z : f.values) z /= nrm;
            out.push_back(f);
        }
        return out;
    }

    // random_bandlimited: complex Gaussian coefficients on the frequency grid
    // inside the band, drawn in signed-index order.
    const double band = spec.band;
    if (!(band > 0.0) || band > grid.nyquist())
        throw ConfigError("CorpusSpec: band must lie in (0, nyquist]");
    const long bmax = long(std::floor(band * grid.L));
    Rng rng(spec.seed);
    for (int c = 0; c < spec.count; ++c) {
        SampledField fh(grid, Space::frequency);
        std::array<long, 3> s{0, 0, 0};
        std::function<void(int)> walk = [&](int axis) {
            if (axis == grid.d) {
                double env = 1.0;
                std::array<int, 3> m{0, 0, 0};
                for (int a = 0; a < grid.d; ++a) {
                    double xi = double(s[a]) / grid.L;
                    env *= envelope(xi, band);
                    m[a] = int(s[a] >= 0 ? s[a] : s[a] + grid.N);
                }
                cplx z = rng.cnormal();  // always drawn, keeps streams aligned
                if (env > 0.0) fh.values[grid.flatten(m)] = env * z;
                return;
            }
            for (s[axis] = -bmax; s[axis] <= bmax; ++s[axis]) walk(axis + 1);
        };
        walk(0);
        SampledField f = transform(fh, Direction::inverse);
        double nrm = lp_norm(f, 2.0);
        if (nrm < 1e-12) {  // norm floor; effectively unreachable
            out.push_back(f);
            continue;
        }
        for (cplx& z : f.values) z /= nrm;
        out.push_back(f);
    }
    return out;
}

}  // namespace modbox
