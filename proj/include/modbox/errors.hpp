#ifndef MODBOX_ERRORS_HPP
#define MODBOX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace modbox {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidField : Error {
    using Error::Error;
};
struct InvalidExponent : Error {
    using Error::Error;
};
struct SingularSymbol : Error {
    using Error::Error;
};
struct GridTooCoarse : Error {
    using Error::Error;
};
struct BoxOutOfRange : Error {
    using Error::Error;
};

// Carries the fraction of spectral mass outside the resolved band.
struct SpectrumNotResolved : Error {
    double escaping_mass;
    SpectrumNotResolved(const std::string& what, double mass)
        : Error(what), escaping_mass(mass) {}
};

struct LatticeNotConverged : Error {
    using Error::Error;
};
struct InvalidGamma : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct MeshMismatch : Error {
    using Error::Error;
};
struct HypothesisViolated : Error {
    using Error::Error;
};
struct InfeasibleGamma : Error {
    using Error::Error;
};
struct NotApplicable : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace modbox

#endif
