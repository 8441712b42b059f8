#pragma once

#include <string>

#include "dvir/fraction.hpp"

namespace dvir {

/// Scalar context for exact symbolic computation in Q(I)(s,t,u).
struct SymbolicContext {
    using Scalar = FieldElem;

    Scalar from_long(long n) const { return FieldElem(n); }
    Scalar from_rational(const GaussianRational& c) const { return FieldElem(c); }
    Scalar monomial(const Monomial& m) const { return FieldElem(m); }
    /// base^{doubled/2}; takes the canonical square root when doubled is odd.
    Scalar pow_half(const Monomial& base, long long doubled) const {
        if (doubled % 2 == 0) return FieldElem(base.pow(doubled / 2));
        return FieldElem(monomial_sqrt(base).pow(doubled));
    }
    Scalar bracket(int n) const { return FieldElem(q_bracket(n)); }
    std::string render(const Scalar& x) const { return x.str(); }
};

/// Scalar context evaluating everything at an exact sample point.
struct SampledContext {
    using Scalar = GaussianRational;

    GaussianRational s, t, u;

    Scalar from_long(long n) const { return GaussianRational(n); }
    Scalar from_rational(const GaussianRational& c) const { return c; }
    Scalar monomial(const Monomial& m) const {
        return m.c * s.pow(m.e.s) * t.pow(m.e.t) * u.pow(m.e.u);
    }
    Scalar pow_half(const Monomial& base, long long doubled) const {
        if (doubled % 2 == 0) return monomial(base.pow(doubled / 2));
        return monomial(monomial_sqrt(base).pow(doubled));
    }
    Scalar bracket(int n) const {
        GaussianRational q = s * s;
        return (q.pow(n) - q.pow(-n)) / (q - q.inverse());
    }
    std::string render(const Scalar& x) const { return x.str(); }
};

} // namespace dvir
