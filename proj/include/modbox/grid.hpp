#ifndef MODBOX_GRID_HPP
#define MODBOX_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "modbox/errors.hpp"

namespace modbox {

// Periodic grid on the torus [-L/2, L/2)^d.  Physical spacing is L/N,
// frequency spacing 1/L, frequencies run over k/L for integer
// k in [-N/2, N/2), stored in standard FFT order (0..N/2-1, -N/2..-1).
struct GridSpec {
    int d = 1;
    int N = 8;          // points per axis, power of two
    double L = 1.0;     // side length

    // Total points capped so a handful of fields fit in memory.
    static constexpr std::size_t max_points = std::size_t(1) << 26;

    double dx() const { return L / N; }
    double dxi() const { return 1.0 / L; }
    double nyquist() const { return N / (2.0 * L); }

    std::size_t total_points() const {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= std::size_t(N);
        return n;
    }

    void validate() const {
        if (d < 1 || d > 3) throw ConfigError("GridSpec: dimension must be 1, 2 or 3");
        if (N < 8 || (N & (N - 1)) != 0)
            throw ConfigError("GridSpec: N must be a power of two and at least 8");
        if (!(L > 0.0)) throw ConfigError("GridSpec: L must be positive");
        if (total_points() > max_points)
            throw ConfigError("GridSpec: N^d exceeds the memory budget of 2^26 points");
    }

    bool operator==(const GridSpec& o) const {
        return d == o.d && N == o.N && L == o.L;
    }

    // Signed frequency integer for a stored axis index m in [0, N).
    int signed_index(int m) const { return m < N / 2 ? m : m - N; }

    // Frequency coordinate for a stored axis index.
    double freq(int m) const { return signed_index(m) * dxi(); }

    // Physical coordinate for an axis index n in [0, N): x = -L/2 + n*dx.
    double coord(int n) const { return -L / 2.0 + n * dx(); }

    // Decodes a flat row-major index (axis 0 slowest) into per-axis indices.
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> m{0, 0, 0};
        for (int i = d - 1; i >= 0; --i) {
            m[i] = int(flat % N);
            flat /= N;
        }
        return m;
    }

    std::size_t flatten(const std::array<int, 3>& m) const {
        std::size_t flat = 0;
        for (int i = 0; i < d; ++i) flat = flat * N + std::size_t((m[i] % N + N) % N);
        return flat;
    }
};

}  // namespace modbox

#endif
