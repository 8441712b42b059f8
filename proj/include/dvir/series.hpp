#pragma once

#include <cassert>
#include <vector>

#include "dvir/context.hpp"
#include "dvir/errors.hpp"

namespace dvir {

/// Expansion variable of a truncated series.  Bivariate operator products are
/// multiplied by series in a declared ratio; the orientation is part of the
/// value and checked on every combination.
enum class RatioDir { Plain, WOverZ, ZOverW };

template <class Ctx>
struct Series {
    using S = typename Ctx::Scalar;

    RatioDir dir = RatioDir::Plain;
    std::vector<S> c; // coefficients of x^0 .. x^order

    int order() const { return int(c.size()) - 1; }
    const S& at(int k) const {
        assert(k >= 0 && k <= order());
        return c[k];
    }

    static Series zero(RatioDir d, int order) {
        Series s;
        s.dir = d;
        s.c.assign(order + 1, S{});
        return s;
    }
    static Series constant(const Ctx& ctx, RatioDir d, int order, const S& v) {
        Series s = zero(d, order);
        s.c[0] = v;
        (void)ctx;
        return s;
    }

    friend Series operator+(const Series& a, const Series& b) {
        if (a.dir != b.dir) throw RatioOrientationMismatch();
        Series r = zero(a.dir, std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) r.c[k] = a.c[k] + b.c[k];
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) {
        if (a.dir != b.dir) throw RatioOrientationMismatch();
        Series r = zero(a.dir, std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) r.c[k] = a.c[k] - b.c[k];
        return r;
    }
    friend Series operator*(const Series& a, const Series& b) {
        if (a.dir != b.dir) throw RatioOrientationMismatch();
        Series r = zero(a.dir, std::min(a.order(), b.order()));
        for (int i = 0; i <= r.order(); ++i) {
            if (a.c[i].is_zero()) continue;
            for (int j = 0; i + j <= r.order(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        }
        return r;
    }
    Series scaled(const S& v) const {
        Series r = *this;
        for (auto& x : r.c) x = x * v;
        return r;
    }
    bool is_zero() const {
        for (const auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }
    /// Index of the first nonzero coefficient, or -1.
    int first_nonzero() const {
        for (int k = 0; k <= order(); ++k)
            if (!c[k].is_zero()) return k;
        return -1;
    }
    Series truncated(int new_order) const {
        Series r = *this;
        r.c.resize(std::min<size_t>(r.c.size(), new_order + 1), S{});
        while (int(r.c.size()) <= new_order) r.c.push_back(S{});
        return r;
    }
};

/// exp of a series with zero constant term.
template <class Ctx>
Series<Ctx> series_exp(const Ctx& ctx, const Series<Ctx>& a) {
    if (!a.c.empty() && !a.c[0].is_zero()) throw NonzeroConstantTerm();
    Series<Ctx> e = Series<Ctx>::zero(a.dir, a.order());
    e.c[0] = ctx.from_long(1);
    for (int k = 1; k <= a.order(); ++k) {
        typename Ctx::Scalar acc{};
        for (int j = 1; j <= k; ++j) {
            if (a.c[j].is_zero()) continue;
            acc += a.c[j] * e.c[k - j] * ctx.from_long(j);
        }
        e.c[k] = acc * ctx.from_rational(GaussianRational::of(1, k));
    }
    return e;
}

/// Reciprocal of a series with invertible constant term.
template <class Ctx>
Series<Ctx> series_inverse(const Ctx& ctx, const Series<Ctx>& a) {
    if (a.c.empty() || a.c[0].is_zero()) throw DivisionByZero();
    Series<Ctx> r = Series<Ctx>::zero(a.dir, a.order());
    auto inv0 = a.c[0].inverse();
    r.c[0] = inv0;
    for (int k = 1; k <= a.order(); ++k) {
        typename Ctx::Scalar acc{};
        for (int j = 1; j <= k; ++j) acc += a.c[j] * r.c[k - j];
        r.c[k] = -(acc * inv0);
    }
    (void)ctx;
    return r;
}

/// log (a x; p)_inf = - sum_{m>=1} a^m x^m / (m (1 - p^m)), exactly.
template <class Ctx>
Series<Ctx> pochhammer_log_series(const Ctx& ctx, const Monomial& a, const Monomial& p,
                                  int order, RatioDir dir = RatioDir::Plain) {
    Series<Ctx> r = Series<Ctx>::zero(dir, order);
    if (a.is_zero()) return r;
    for (int m = 1; m <= order; ++m) {
        Monomial pm = p.pow(m);
        if (pm.is_one()) throw DegenerateBase();
        auto den = (ctx.from_long(1) - ctx.monomial(pm)) * ctx.from_long(m);
        if (den.is_zero()) throw PoleAtSample();
        r.c[m] = -(ctx.monomial(a.pow(m)) * den.inverse());
    }
    return r;
}

/// (a x; p)_inf / (b x; p)_inf via the first-order recurrence
/// f_k = (b - a p^{k-1}) / (1 - p^k) * f_{k-1}; much cheaper than exp(log).
template <class Ctx>
Series<Ctx> pochhammer_ratio_series(const Ctx& ctx, const Monomial& a, const Monomial& b,
                                    const Monomial& p, int order, RatioDir dir) {
    Series<Ctx> r = Series<Ctx>::zero(dir, order);
    r.c[0] = ctx.from_long(1);
    Monomial pk1 = Monomial::one(); // p^{k-1}
    for (int k = 1; k <= order; ++k) {
        Monomial pk = pk1.times(p);
        if (pk.is_one()) throw DegenerateBase();
        auto num = ctx.monomial(b) - ctx.monomial(a.times(pk1));
        auto den = ctx.from_long(1) - ctx.monomial(pk);
        if (den.is_zero()) throw PoleAtSample();
        r.c[k] = r.c[k - 1] * num * den.inverse();
        pk1 = pk;
    }
    return r;
}

/// Series expansion of (n0 + n1 x + ...)/(d0 + d1 x + ...) with d0 invertible.
template <class Ctx>
Series<Ctx> series_from_ratio(const Ctx& ctx, RatioDir dir, int order,
                              std::vector<typename Ctx::Scalar> num,
                              std::vector<typename Ctx::Scalar> den) {
    Series<Ctx> n = Series<Ctx>::zero(dir, order), d = Series<Ctx>::zero(dir, order);
    for (size_t i = 0; i < num.size() && int(i) <= order; ++i) n.c[i] = num[i];
    for (size_t i = 0; i < den.size() && int(i) <= order; ++i) d.c[i] = den[i];
    return n * series_inverse(ctx, d);
}

} // namespace dvir
