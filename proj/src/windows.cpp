#include "modbox/windows.hpp"

#include <cmath>

namespace modbox {

namespace {
inline double h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}

double WindowSystem::phi(double r) {
    r = std::abs(r);
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    double a = h(1.0 - r), b = h(r - 0.5);
    return a / (a + b);
}

WindowSystem WindowSystem::build(const GridSpec& grid, TransitionProfile profile) {
    grid.validate();
    WindowSystem ws;
    ws.grid_ = grid;
    ws.profile_ = profile;
    ws.k_max_ = int(std::floor(grid.nyquist())) - 1;
    if (ws.k_max_ < 2)
        throw GridTooCoarse("build_windows: need floor(N/(2L)) - 1 >= 2 interior boxes");

    ws.axis_norm_.resize(grid.N);
    double worst = 1.0;
    for (int m = 0; m < grid.N; ++m) {
        double xi = grid.freq(m);
        // phi(|xi - l|) is nonzero only for the two lattice neighbours of xi.
        int l0 = int(std::floor(xi));
        double s = 0.0;
        for (int l = l0 - 1; l <= l0 + 2; ++l) s += phi(xi - l);
        ws.axis_norm_[m] = s;
        if (std::abs(xi) <= ws.k_max_ + 0.5) worst = std::min(worst, 1.0 / s);
    }
    // On its own cube each axis factor is phi = 1 over a normaliser <= 2,
    // so the d-dimensional window is at least 2^-d there.
    ws.box_lower_bound_ = std::pow(0.5, grid.d);
    return ws;
}

WindowSystem build_windows(const GridSpec& grid, TransitionProfile profile) {
    return WindowSystem::build(grid, profile);
}

double WindowSystem::rho(const double* xi, int d) const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= phi(xi[i]);
    return v;
}

double WindowSystem::axis_sigma(int c, int m) const {
    double xi = grid_.freq(m);
    double f = phi(xi - c);
    return f == 0.0 ? 0.0 : f / axis_norm_[m];
}

double WindowSystem::sigma(const std::array<int, 3>& k, const std::array<int, 3>& m) const {
    double v = 1.0;
    for (int i = 0; i < grid_.d && v != 0.0; ++i) v *= axis_sigma(k[i], m[i]);
    return v;
}

std::vector<int> WindowSystem::axis_support(int c) const {
    std::vector<int> idx;
    const int N = grid_.N;
    const double L = grid_.L;
    // Signed frequency integers s with |s/L - c| < 1, clipped to the grid.
    long lo = long(std::floor((c - 1.0) * L)) + 1;
    long hi = long(std::ceil((c + 1.0) * L)) - 1;
    lo = std::max(lo, long(-N / 2));
    hi = std::min(hi, long(N / 2 - 1));
    idx.reserve(std::size_t(std::max(long(0), hi - lo + 1)));
    for (long s = lo; s <= hi; ++s) idx.push_back(int(s >= 0 ? s : s + N));
    return idx;
}

void WindowSystem::boxes_at(const std::array<int, 3>& m,
                            std::vector<std::pair<std::array<int, 3>, double>>& out) const {
    out.clear();
    const int d = grid_.d;
    std::array<std::vector<std::pair<int, double>>, 3> axis;
    for (int i = 0; i < d; ++i) {
        double xi = grid_.freq(m[i]);
        int c0 = int(std::floor(xi));
        for (int c = c0 - 1; c <= c0 + 2; ++c) {
            if (std::abs(c) > k_max_) continue;
            double w = axis_sigma(c, m[i]);
            if (w != 0.0) axis[i].push_back({c, w});
        }
    }
    std::array<int, 3> k{0, 0, 0};
    std::function<void(int, double)> rec = [&](int i, double w) {
        if (i == d) {
            out.push_back({k, w});
            return;
        }
        for (auto& [c, aw] : axis[i]) {
            k[i] = c;
            rec(i + 1, w * aw);
        }
    };
    rec(0, 1.0);
}

SampledField box_project(const SampledField& f, const std::array<int, 3>& k,
                         const WindowSystem& ws) {
    const GridSpec& g = ws.grid();
    if (!(f.grid == g)) throw GridMismatch("box_project: field grid differs from windows");
    for (int i = 0; i < g.d; ++i)
        if (std::abs(k[i]) > ws.k_max())
            throw BoxOutOfRange("box_project: |k|_inf exceeds K_max");

    const bool was_physical = (f.space == Space::physical);
    SampledField fhat = was_physical ? transform(f, Direction::forward) : f;
    SampledField out(g, Space::frequency);

    std::array<std::vector<int>, 3> supp;
    for (int i = 0; i < g.d; ++i) supp[i] = ws.axis_support(k[i]);

    std::array<int, 3> m{0, 0, 0};
    std::function<void(int)> rec = [&](int axis) {
        if (axis == g.d) {
            std::size_t flat = g.flatten(m);
            out.values[flat] = ws.sigma(k, m) * fhat.values[flat];
            return;
        }
        for (int idx : supp[axis]) {
            m[axis] = idx;
            rec(axis + 1);
        }
    };
    rec(0);
    return was_physical ? transform(out, Direction::inverse) : out;
}

}  // namespace modbox
