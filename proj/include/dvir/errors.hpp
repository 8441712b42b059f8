#pragma once

#include <stdexcept>
#include <string>

namespace dvir {

struct DivisionByZero : std::domain_error {
    DivisionByZero() : std::domain_error("division by zero field element") {}
};

struct PoleAtSample : std::domain_error {
    PoleAtSample() : std::domain_error("denominator vanishes at sample point") {}
};

struct DegenerateBase : std::domain_error {
    DegenerateBase() : std::domain_error("pochhammer base power equals 1") {}
};

struct NonzeroConstantTerm : std::domain_error {
    NonzeroConstantTerm() : std::domain_error("series exp needs zero constant term") {}
};

struct NoCanonicalRoot : std::domain_error {
    explicit NoCanonicalRoot(const std::string& what)
        : std::domain_error("no canonical square root: " + what) {}
};

struct NotExponential : std::logic_error {
    NotExponential() : std::logic_error("operation requires exponential current specs") {}
};

struct RatioOrientationMismatch : std::logic_error {
    RatioOrientationMismatch()
        : std::logic_error("series ratio orientation does not match operator order") {}
};

struct NotStabilized : std::runtime_error {
    explicit NotStabilized(const std::string& what)
        : std::runtime_error("ratio support not stabilized: " + what) {}
};

struct NotDivisible : std::runtime_error {
    explicit NotDivisible(const std::string& what)
        : std::runtime_error("vanishing factor does not divide: " + what) {}
};

struct InconsistentSystem : std::runtime_error {
    InconsistentSystem() : std::runtime_error("linear system is inconsistent") {}
};

struct UnderdeterminedSystem : std::runtime_error {
    explicit UnderdeterminedSystem(const std::string& what)
        : std::runtime_error("underdetermined system: " + what) {}
};

} // namespace dvir
