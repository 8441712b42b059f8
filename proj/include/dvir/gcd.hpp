#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "dvir/poly.hpp"

namespace dvir {
namespace detail {

inline int exp_of(Exp3 e, int var) { return var == 0 ? e.s : (var == 1 ? e.t : e.u); }

/// Collects p by the exponent of `var`; index 0 is exponent `lo`.
struct UniView {
    int lo = 0;
    std::vector<LaurentPoly> coeff; // coefficients free of `var`

    int deg() const { return int(coeff.size()) - 1; }
};

inline UniView collect(const LaurentPoly& p, int var) {
    int lo = INT32_MAX, hi = INT32_MIN;
    for (const auto& t : p.terms()) {
        lo = std::min(lo, exp_of(t.e, var));
        hi = std::max(hi, exp_of(t.e, var));
    }
    UniView v;
    if (p.is_zero()) return v;
    v.lo = lo;
    v.coeff.assign(hi - lo + 1, LaurentPoly{});
    for (const auto& t : p.terms()) {
        Exp3 e = t.e;
        int k = exp_of(e, var) - lo;
        (var == 0 ? e.s : var == 1 ? e.t : e.u) = 0;
        v.coeff[k] += LaurentPoly(t.c, e);
    }
    while (!v.coeff.empty() && v.coeff.back().is_zero()) v.coeff.pop_back();
    return v;
}

inline LaurentPoly assemble(const UniView& v, int var) {
    LaurentPoly r;
    for (size_t k = 0; k < v.coeff.size(); ++k) {
        Exp3 sh{};
        (var == 0 ? sh.s : var == 1 ? sh.t : sh.u) = int32_t(v.lo + int(k));
        r += v.coeff[k].shifted(sh);
    }
    return r;
}

inline void strip_zeros(std::vector<LaurentPoly>& c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

/// Divides out the common rational content of all coefficients.
inline void strip_rational_content(std::vector<LaurentPoly>& c) {
    mpz_class g = 0;
    mpz_class l = 1;
    for (const auto& p : c) {
        mpq_class rc = p.rational_content();
        if (rc == 0) continue;
        g = gcd(g, rc.get_num());
        l = lcm(l, rc.get_den());
    }
    if (g == 0 || (g == 1 && l == 1)) return;
    GaussianRational inv(mpq_class(l, g));
    for (auto& p : c) p = p.scaled(inv);
}

inline size_t total_bits(const std::vector<LaurentPoly>& c) {
    size_t n = 0;
    for (const auto& p : c) n += p.bit_size();
    return n;
}

struct GcdEffortExceeded {};

/// Fraction-free pseudo-remainder of a by b in the collected variable, with
/// per-step content stripping (primitive PRS flavour) and an effort cap.
inline std::vector<LaurentPoly> pseudo_rem(std::vector<LaurentPoly> a,
                                           const std::vector<LaurentPoly>& b) {
    const LaurentPoly& lb = b.back();
    constexpr size_t kBitCap = 1 << 19;
    while (a.size() >= b.size()) {
        LaurentPoly la = a.back();
        size_t shift = a.size() - b.size();
        for (auto& c : a) c *= lb;
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= la * b[i];
        strip_zeros(a);
        if (a.empty()) break;
        strip_rational_content(a);
        if (total_bits(a) > kBitCap) throw GcdEffortExceeded{};
    }
    return a;
}

} // namespace detail

/// Normalizes a nonzero Laurent polynomial to its canonical associate:
/// min exponent 0 in every variable and lex-leading coefficient 1.
inline LaurentPoly primitive_associate(const LaurentPoly& p) {
    if (p.is_zero()) return p;
    Exp3 mn = p.min_exponents();
    LaurentPoly r = p.shifted({-mn.s, -mn.t, -mn.u});
    return r.scaled(r.leading().c.inverse());
}

/// GCD of Laurent polynomials, well defined up to monomial units; the result
/// is returned as a canonical associate.  Content/primitive-part recursion
/// one variable at a time with fraction-free pseudo-division inside.
inline LaurentPoly laurent_gcd(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero()) return b.is_zero() ? LaurentPoly{} : primitive_associate(b);
    if (b.is_zero()) return primitive_associate(a);
    LaurentPoly pa = primitive_associate(a), pb = primitive_associate(b);
    if (pa.is_monomial() || pb.is_monomial()) return LaurentPoly::one();
    if (pa == pb) return pa;

    // Main variable: present in both, smallest combined span.
    int var = -1, best = INT32_MAX;
    for (int v = 0; v < 3; ++v) {
        Exp3 ma = pa.max_exponents(), mb = pb.max_exponents();
        int sa = detail::exp_of(ma, v), sb = detail::exp_of(mb, v);
        if (sa <= 0 || sb <= 0) continue; // min exponents are 0 after normalization
        if (sa + sb < best) best = sa + sb, var = v;
    }
    if (var < 0) return LaurentPoly::one();

    auto va = detail::collect(pa, var), vb = detail::collect(pb, var);
    auto content = [](const detail::UniView& v) {
        LaurentPoly c;
        for (const auto& p : v.coeff)
            if (!p.is_zero()) c = laurent_gcd(c, p);
        return c;
    };
    LaurentPoly ca = content(va), cb = content(vb);
    LaurentPoly cg = laurent_gcd(ca, cb);

    auto primpart = [](std::vector<LaurentPoly> c, const LaurentPoly& cont) {
        for (auto& p : c)
            if (!p.is_zero()) p = *p.divided_by(cont);
        return c;
    };
    std::vector<LaurentPoly> A = primpart(va.coeff, ca), B = primpart(vb.coeff, cb);
    if (A.size() < B.size()) std::swap(A, B);
    while (!B.empty() && B.size() > 1) {
        std::vector<LaurentPoly> R;
        try {
            R = detail::pseudo_rem(A, B);
        } catch (const detail::GcdEffortExceeded&) {
            return LaurentPoly::one(); // give up: unreduced is still exact
        }
        A = std::move(B);
        B = std::move(R);
        if (!B.empty()) {
            LaurentPoly c;
            for (const auto& p : B)
                if (!p.is_zero()) c = laurent_gcd(c, p);
            if (!c.is_one()) B = primpart(B, c);
        }
    }
    LaurentPoly g;
    if (!B.empty()) {
        g = LaurentPoly(GaussianRational(1)); // pp-gcd is trivial
    } else {
        detail::UniView vg;
        vg.lo = 0;
        vg.coeff = A;
        g = primitive_associate(detail::assemble(vg, var));
    }
    return primitive_associate(g * cg);
}

} // namespace dvir
