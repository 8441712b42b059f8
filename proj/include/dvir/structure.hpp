#pragma once

#include <array>
#include <string>
#include <vector>

#include "dvir/series.hpp"

namespace dvir {

namespace qc {
inline Monomial q(int k = 1) { return {GaussianRational(1), {int32_t(2 * k), 0, 0}}; }
inline Monomial q1(int k = 1) { return {GaussianRational(1), {0, int32_t(2 * k), 0}}; }
inline Monomial q2(int k = 1) { return {GaussianRational(1), {int32_t(-4 * k), int32_t(-2 * k), 0}}; }
inline Monomial q3(int k = 1) { return {GaussianRational(1), {int32_t(4 * k), 0, 0}}; }
inline Monomial u(int k = 1) { return {GaussianRational(1), {0, 0, int32_t(k)}}; }
inline Monomial s_pow(int k) { return {GaussianRational(1), {int32_t(k), 0, 0}}; }
inline Monomial st(int k = 1) { return {GaussianRational(1), {int32_t(k), int32_t(k), 0}}; }
} // namespace qc

/// alpha_phi(x) = (q^4 x; q^4)/(q^2 x; q^4) as a truncated series.
template <class Ctx>
Series<Ctx> alpha_phi_series(const Ctx& ctx, int order, RatioDir dir) {
    return pochhammer_ratio_series(ctx, qc::q(4), qc::q(2), qc::q(4), order, dir);
}

/// alpha_psi(x) = (q^2 x; q^4)/(x; q^4).
template <class Ctx>
Series<Ctx> alpha_psi_series(const Ctx& ctx, int order, RatioDir dir) {
    return pochhammer_ratio_series(ctx, qc::q(2), Monomial::one(), qc::q(4), order, dir);
}

/// beta(x) = (q x; q^4)/(q^3 x; q^4).
template <class Ctx>
Series<Ctx> beta_series(const Ctx& ctx, int order, RatioDir dir) {
    return pochhammer_ratio_series(ctx, qc::s_pow(2), qc::s_pow(6), qc::q(4), order, dir);
}

/// Argument rescale: g(x) = f(a x) for a monomial a.
template <class Ctx>
Series<Ctx> series_arg_scale(const Ctx& ctx, const Series<Ctx>& f, const Monomial& a) {
    Series<Ctx> r = f;
    Monomial p = Monomial::one();
    for (int k = 1; k <= r.order(); ++k) {
        p = p.times(a);
        r.c[k] = r.c[k] * ctx.monomial(p);
    }
    return r;
}

/// The structure function f(x) = exp(sum_n (1-q1^n)(1-q2^n)/(n(1+q3^{-n})) x^n).
template <class Ctx>
Series<Ctx> f_series(const Ctx& ctx, int order, RatioDir dir = RatioDir::Plain) {
    Series<Ctx> l = Series<Ctx>::zero(dir, order);
    auto one = ctx.from_long(1);
    for (int n = 1; n <= order; ++n) {
        auto num = (one - ctx.monomial(qc::q1(n))) * (one - ctx.monomial(qc::q2(n)));
        auto den = (one + ctx.monomial(qc::q3(-n))) * ctx.from_long(n);
        l.c[n] = num * den.inverse();
    }
    return series_exp(ctx, l);
}

/// Fast route for f through the beta identity; the equality of the two
/// routes is itself one of the verified identities.
template <class Ctx>
Series<Ctx> f_series_fast(const Ctx& ctx, int order, RatioDir dir = RatioDir::Plain) {
    auto b1 = series_arg_scale(ctx, beta_series(ctx, order, dir), qc::st(2));
    auto b2 = series_arg_scale(ctx, beta_series(ctx, order, dir), qc::st(-2));
    auto geo = Series<Ctx>::zero(dir, order);
    for (int k = 0; k <= order; ++k) geo.c[k] = ctx.from_long(1);
    return geo * b1 * b2;
}

/// Residual of f(x) - 1/(1-x) * beta(q1 q x) * beta(q1^{-1} q^{-1} x).
template <class Ctx>
Series<Ctx> f_via_beta_residual(const Ctx& ctx, int order) {
    auto f = f_series(ctx, order);
    auto b1 = series_arg_scale(ctx, beta_series(ctx, order, RatioDir::Plain),
                               qc::st(2)); // q1 q = s^2 t^2
    auto b2 = series_arg_scale(ctx, beta_series(ctx, order, RatioDir::Plain),
                               qc::st(-2)); // (q1 q)^{-1}
    auto geo = Series<Ctx>::zero(RatioDir::Plain, order);
    for (int k = 0; k <= order; ++k) geo.c[k] = ctx.from_long(1); // 1/(1-x)
    return f - geo * b1 * b2;
}

/// A rational function of the formal ratio x with coefficients in the field:
/// num(x)/den(x) as coefficient lists.  Used for the R-matrix entries.
template <class Ctx>
struct RatioFraction {
    std::vector<typename Ctx::Scalar> num, den;

    Series<Ctx> expand(const Ctx& ctx, RatioDir dir, int order) const {
        return series_from_ratio(ctx, dir, order, num, den);
    }
    /// Exact value at x = m (a monomial), for tests.
    typename Ctx::Scalar eval(const Ctx& ctx, const Monomial& m) const {
        auto horner = [&](const std::vector<typename Ctx::Scalar>& c) {
            typename Ctx::Scalar acc{};
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * ctx.monomial(m) + *it;
            return acc;
        };
        return horner(num) * horner(den).inverse();
    }
};

/// The five rational kernels of the interchange propositions.
/// phi-type denominators (q^2 - x), psi-type (1 - q^2 x).
template <class Ctx>
struct RationalKernels {
    RatioFraction<Ctx> phi_diag;  // q(1-x)/(q^2-x)
    RatioFraction<Ctx> phi_off0;  // (q^2-1)/(q^2-x)
    RatioFraction<Ctx> phi_off1;  // (q^2-1)x/(q^2-x)
    RatioFraction<Ctx> psi_diag;  // q(1-x)/(1-q^2 x)
    RatioFraction<Ctx> psi_off0;  // (1-q^2)/(1-q^2 x)
    RatioFraction<Ctx> psi_off1;  // (1-q^2)x/(1-q^2 x)
};

template <class Ctx>
RationalKernels<Ctx> rational_kernels(const Ctx& ctx) {
    using S = typename Ctx::Scalar;
    S one = ctx.from_long(1), q = ctx.monomial(qc::q()), q2 = ctx.monomial(qc::q(2));
    RationalKernels<Ctx> k;
    k.phi_diag = {{q, -q}, {q2, -one}};
    k.phi_off0 = {{q2 - one}, {q2, -one}};
    k.phi_off1 = {{S{}, q2 - one}, {q2, -one}};
    k.psi_diag = {{q, -q}, {one, -q2}};
    k.psi_off0 = {{one - q2}, {one, -q2}};
    k.psi_off1 = {{S{}, one - q2}, {one, -q2}};
    return k;
}

/// R(x) in the basis v+v+, v+v-, v-v+, v-v-; entries as ratio fractions.
template <class Ctx>
std::array<std::array<RatioFraction<Ctx>, 4>, 4> r_matrix(const Ctx& ctx) {
    using S = typename Ctx::Scalar;
    auto k = rational_kernels(ctx);
    S one = ctx.from_long(1);
    RatioFraction<Ctx> zero{{S{}}, {one}}, unit{{one}, {one}};
    std::array<std::array<RatioFraction<Ctx>, 4>, 4> r{};
    for (auto& row : r)
        for (auto& e : row) e = zero;
    r[0][0] = unit;
    r[3][3] = unit;
    r[1][1] = k.psi_diag;
    r[1][2] = k.psi_off0;
    r[2][1] = k.psi_off1;
    r[2][2] = k.psi_diag;
    return r;
}

/// q^{3/2}(q1^{1/2} - q1^{-1/2}) / (1 - q1^{-1}), folded through the
/// certified value identity beta(q/q1) beta(1/(q q1)) = 1 - q1^{-1}.
template <class Ctx>
typename Ctx::Scalar folded_prefactor(const Ctx& ctx) {
    auto t = ctx.monomial(Monomial{GaussianRational(1), {0, 1, 0}});
    auto tinv = ctx.monomial(Monomial{GaussianRational(1), {0, -1, 0}});
    auto num = ctx.monomial(qc::s_pow(3)) * (t - tinv);
    auto den = ctx.from_long(1) - ctx.monomial(qc::q1(-1));
    return num * den.inverse();
}

/// (x; p)_inf partial product with a rigorous tail bound; exact rationals.
/// Returns the truncated value; |relative error| <= rel_bound on exit.
inline mpq_class pochhammer_value_truncated(const mpq_class& x, const mpq_class& p,
                                            const mpq_class& rel_bound) {
    mpq_class pa = abs(p);
    if (pa >= 1) throw std::invalid_argument("pochhammer value needs |p| < 1");
    mpq_class xa = abs(x), pk(1);
    // find K with 4 |x| |p|^K / (1-|p|) < rel_bound and |x p^K| < 1/2
    int K = 0;
    while (4 * xa * pk > rel_bound * (1 - pa) || 2 * xa * pk >= 1) {
        pk *= pa;
        ++K;
        if (K > 100000) throw std::runtime_error("pochhammer tail does not shrink");
    }
    mpq_class prod(1), xpk = x;
    for (int k = 0; k < K; ++k) {
        prod *= (1 - xpk);
        xpk *= p;
    }
    return prod;
}

/// |beta(q/q1) beta(1/(q q1)) - (1 - q1^{-1})| at an exact sample, with the
/// truncation error bounded by err_budget; returns the certified difference
/// bound (difference + propagated truncation error).
inline mpq_class beta_beta_identity_error(const mpq_class& q, const mpq_class& q1,
                                          const mpq_class& err_budget) {
    mpq_class p = q * q * q * q;
    auto beta_at = [&](const mpq_class& y) {
        mpq_class n = pochhammer_value_truncated(q * y, p, err_budget);
        mpq_class d = pochhammer_value_truncated(q * q * q * y, p, err_budget);
        if (d == 0) throw std::runtime_error("pochhammer denominator vanished");
        return n / d;
    };
    mpq_class lhs = beta_at(q / q1) * beta_at(1 / (q * q1));
    mpq_class rhs = 1 - 1 / q1;
    mpq_class diff = abs(lhs - rhs);
    // four truncated products, each with relative error <= err_budget
    mpq_class prop = abs(lhs) * 8 * err_budget;
    return diff + prop;
}

} // namespace dvir
