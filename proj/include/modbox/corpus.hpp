#ifndef MODBOX_CORPUS_HPP
#define MODBOX_CORPUS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "modbox/field.hpp"

namespace modbox {

enum class CorpusKind { random_bandlimited, gaussian_family, single_box };

struct CorpusSpec {
    CorpusKind kind = CorpusKind::random_bandlimited;
    std::uint64_t seed = 1;
    int count = 100;
    double band = 4.0;  // random_bandlimited: spectrum inside |xi|_inf <= band
    std::vector<double> widths = {1.0};                    // gaussian_family
    std::vector<std::array<int, 3>> modulations = {{0, 0, 0}};  // gaussian_family
    std::vector<std::array<int, 3>> boxes = {{0, 0, 0}};   // single_box
};

// Deterministic test-field generator.  Draws are indexed by integer frequency
// so the same (seed, band) reproduces the same continuum field on a refined
// grid with the same side length.  All members are L^2-normalized.
std::vector<SampledField> make_corpus(const GridSpec& grid, const CorpusSpec& spec);

// Single members, used by witness searches.
SampledField gaussian_field(const GridSpec& grid, double width,
                            const std::array<int, 3>& modulation);

}  // namespace modbox

#endif
