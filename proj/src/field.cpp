#include "modbox/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace modbox {

namespace {

// One cached plan pair per (d, N).  FFTW planning is not reentrant, so plan
// creation is serialized; execution reuses the plan's aligned buffers.
struct PlanEntry {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t n = 0;
};

std::map<std::pair<int, int>, PlanEntry>& plan_cache() {
    static std::map<std::pair<int, int>, PlanEntry> cache;
    return cache;
}

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

PlanEntry& get_plan(const GridSpec& g) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(g.d, g.N);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    PlanEntry e;
    e.n = g.total_points();
    e.in = fftw_alloc_complex(e.n);
    e.out = fftw_alloc_complex(e.n);
    int dims[3] = {g.N, g.N, g.N};
    // FFTW_ESTIMATE keeps plan selection deterministic across runs.
    e.fwd = fftw_plan_dft(g.d, dims, e.in, e.out, FFTW_FORWARD, FFTW_ESTIMATE);
    e.bwd = fftw_plan_dft(g.d, dims, e.in, e.out, FFTW_BACKWARD, FFTW_ESTIMATE);
    return plan_cache().emplace(key, e).first->second;
}

// Parity of the sum of axis indices; the (-1)^k checkerboard accounts for the
// grid origin sitting at -L/2 rather than 0.
inline int index_parity(const GridSpec& g, std::size_t flat) {
    int par = 0;
    for (int i = 0; i < g.d; ++i) {
        par ^= int(flat % g.N) & 1;
        flat /= g.N;
    }
    return par;
}

}  // namespace

bool all_finite(const SampledField& f) {
    for (const cplx& z : f.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

SampledField transform(const SampledField& f, Direction dir) {
    f.grid.validate();
    if (!all_finite(f)) throw InvalidField("transform: non-finite input field");
    if (dir == Direction::forward && f.space != Space::physical)
        throw InvalidField("transform: forward expects a physical-space field");
    if (dir == Direction::inverse && f.space != Space::frequency)
        throw InvalidField("transform: inverse expects a frequency-space field");

    const GridSpec& g = f.grid;
    const std::size_t n = g.total_points();
    PlanEntry& plan = get_plan(g);

    SampledField out(g, dir == Direction::forward ? Space::frequency : Space::physical);
    if (dir == Direction::forward) {
        for (std::size_t i = 0; i < n; ++i) {
            plan.in[i][0] = f.values[i].real();
            plan.in[i][1] = f.values[i].imag();
        }
        fftw_execute(plan.fwd);
        const double scale = std::pow(g.dx(), g.d);
        for (std::size_t i = 0; i < n; ++i) {
            double s = index_parity(g, i) ? -scale : scale;
            out.values[i] = cplx(plan.out[i][0] * s, plan.out[i][1] * s);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double s = index_parity(g, i) ? -1.0 : 1.0;
            plan.in[i][0] = f.values[i].real() * s;
            plan.in[i][1] = f.values[i].imag() * s;
        }
        fftw_execute(plan.bwd);
        const double scale = std::pow(g.dxi(), g.d);
        for (std::size_t i = 0; i < n; ++i)
            out.values[i] = cplx(plan.out[i][0] * scale, plan.out[i][1] * scale);
    }
    return out;
}

double lp_norm(const SampledField& f, double p) {
    if (f.space != Space::physical)
        throw InvalidField("lp_norm: field must be in physical space");
    if (!(p >= 1.0)) throw InvalidExponent("lp_norm: p must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cplx& z : f.values) m = std::max(m, std::abs(z));
        return m;
    }
    const double cell = std::pow(f.grid.dx(), f.grid.d);
    double acc = 0.0;
    if (p == 2.0) {
        for (const cplx& z : f.values) acc += std::norm(z);
    } else if (p == 1.0) {
        for (const cplx& z : f.values) acc += std::abs(z);
    } else if (p == 4.0) {
        for (const cplx& z : f.values) {
            double q = std::norm(z);
            acc += q * q;
        }
    } else {
        for (const cplx& z : f.values) acc += std::pow(std::abs(z), p);
    }
    return std::pow(acc * cell, 1.0 / p);
}

double freq_l2_norm(const SampledField& fhat) {
    if (fhat.space != Space::frequency)
        throw InvalidField("freq_l2_norm: field must be in frequency space");
    double acc = 0.0;
    for (const cplx& z : fhat.values) acc += std::norm(z);
    return std::sqrt(acc * std::pow(fhat.grid.dxi(), fhat.grid.d));
}

std::vector<cplx> tabulate_symbol(const GridSpec& grid, const Symbol& m) {
    grid.validate();
    const std::size_t n = grid.total_points();
    std::vector<cplx> table(n);
    double xi[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        auto idx = grid.unflatten(i);
        for (int a = 0; a < grid.d; ++a) xi[a] = grid.freq(idx[a]);
        cplx v = m(xi, grid.d);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "symbol is non-finite at xi = (";
            for (int a = 0; a < grid.d; ++a) os << (a ? ", " : "") << xi[a];
            os << ")";
            throw SingularSymbol(os.str());
        }
        table[i] = v;
    }
    return table;
}

SampledField apply_multiplier(const SampledField& f, const std::vector<cplx>& table) {
    if (table.size() != f.grid.total_points())
        throw GridMismatch("apply_multiplier: symbol table size does not match grid");
    const bool was_physical = (f.space == Space::physical);
    SampledField fhat = was_physical ? transform(f, Direction::forward) : f;
    for (std::size_t i = 0; i < fhat.values.size(); ++i) fhat.values[i] *= table[i];
    return was_physical ? transform(fhat, Direction::inverse) : fhat;
}

SampledField apply_multiplier(const SampledField& f, const Symbol& m) {
    return apply_multiplier(f, tabulate_symbol(f.grid, m));
}

double spectral_mass_outside(const SampledField& f, double band) {
    SampledField fhat = (f.space == Space::frequency) ? f : transform(f, Direction::forward);
    const GridSpec& g = f.grid;
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < fhat.values.size(); ++i) {
        double m2 = std::norm(fhat.values[i]);
        total += m2;
        auto idx = g.unflatten(i);
        double linf = 0.0;
        for (int a = 0; a < g.d; ++a) linf = std::max(linf, std::abs(g.freq(idx[a])));
        if (linf > band) outside += m2;
    }
    return total > 0.0 ? outside / total : 0.0;
}

double boundary_shell_mass(const SampledField& f) {
    if (f.space != Space::physical)
        throw InvalidField("boundary_shell_mass: field must be in physical space");
    const GridSpec& g = f.grid;
    const double edge = 0.375 * g.L;  // outer shell: |x|_inf >= 3L/8
    double total = 0.0, shell = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double m2 = std::norm(f.values[i]);
        total += m2;
        auto idx = g.unflatten(i);
        double linf = 0.0;
        for (int a = 0; a < g.d; ++a) linf = std::max(linf, std::abs(g.coord(idx[a])));
        if (linf >= edge) shell += m2;
    }
    return total > 0.0 ? shell / total : 0.0;
}

namespace {
void check_same(const SampledField& a, const SampledField& b) {
    if (!(a.grid == b.grid)) throw GridMismatch("field arithmetic: grids differ");
    if (a.space != b.space) throw GridMismatch("field arithmetic: spaces differ");
}
}  // namespace

SampledField operator+(const SampledField& a, const SampledField& b) {
    check_same(a, b);
    SampledField r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    return r;
}

SampledField operator-(const SampledField& a, const SampledField& b) {
    check_same(a, b);
    SampledField r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

SampledField operator*(cplx c, const SampledField& a) {
    SampledField r = a;
    for (cplx& z : r.values) z *= c;
    return r;
}

void write_snapshot(const std::string& path, const SampledField& f) {
    static_assert(sizeof(double) == 8);
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("write_snapshot: cannot open " + path);
    const char magic[4] = {'M', 'S', 'P', 'F'};
    std::uint32_t version = 1, d = std::uint32_t(f.grid.d), N = std::uint32_t(f.grid.N);
    double L = f.grid.L;
    std::uint8_t space = std::uint8_t(f.space);
    bool ok = std::fwrite(magic, 1, 4, fp) == 4 &&
              std::fwrite(&version, 4, 1, fp) == 1 && std::fwrite(&d, 4, 1, fp) == 1 &&
              std::fwrite(&N, 4, 1, fp) == 1 && std::fwrite(&L, 8, 1, fp) == 1 &&
              std::fwrite(&space, 1, 1, fp) == 1;
    for (const cplx& z : f.values) {
        double re = z.real(), im = z.imag();
        ok = ok && std::fwrite(&re, 8, 1, fp) == 1 && std::fwrite(&im, 8, 1, fp) == 1;
    }
    std::fclose(fp);
    if (!ok) throw IoError("write_snapshot: short write to " + path);
}

SampledField read_snapshot(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("read_snapshot: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, d = 0, N = 0;
    double L = 0;
    std::uint8_t space = 0;
    bool ok = std::fread(magic, 1, 4, fp) == 4 && std::memcmp(magic, "MSPF", 4) == 0 &&
              std::fread(&version, 4, 1, fp) == 1 && version == 1 &&
              std::fread(&d, 4, 1, fp) == 1 && std::fread(&N, 4, 1, fp) == 1 &&
              std::fread(&L, 8, 1, fp) == 1 && std::fread(&space, 1, 1, fp) == 1;
    if (!ok) {
        std::fclose(fp);
        throw IoError("read_snapshot: bad header in " + path);
    }
    GridSpec g{int(d), int(N), L};
    g.validate();
    SampledField f(g, space ? Space::frequency : Space::physical);
    for (cplx& z : f.values) {
        double re, im;
        if (std::fread(&re, 8, 1, fp) != 1 || std::fread(&im, 8, 1, fp) != 1) {
            std::fclose(fp);
            throw IoError("read_snapshot: truncated data in " + path);
        }
        z = cplx(re, im);
    }
    std::fclose(fp);
    if (!all_finite(f)) throw InvalidField("read_snapshot: non-finite samples in " + path);
    return f;
}

}  // namespace modbox
