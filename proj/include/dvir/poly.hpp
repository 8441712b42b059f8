#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dvir/gaussian.hpp"

namespace dvir {

/// Exponent triple of a monomial in s = q^{1/2}, t = q1^{1/2}, u.
struct Exp3 {
    int32_t s = 0, t = 0, u = 0;

    friend Exp3 operator+(Exp3 a, Exp3 b) { return {a.s + b.s, a.t + b.t, a.u + b.u}; }
    friend Exp3 operator-(Exp3 a, Exp3 b) { return {a.s - b.s, a.t - b.t, a.u - b.u}; }
    bool operator==(const Exp3&) const = default;
    bool is_zero() const { return s == 0 && t == 0 && u == 0; }
};

namespace detail {
constexpr int64_t kExpBias = 1 << 20;
constexpr int64_t kExpMax = (1 << 20) - 1;

/// Packs an exponent triple into one integer, monotone in lex order on (s,t,u).
inline uint64_t pack(Exp3 e) {
    assert(std::abs(e.s) < kExpMax && std::abs(e.t) < kExpMax && std::abs(e.u) < kExpMax);
    return (uint64_t(e.s + kExpBias) << 42) | (uint64_t(e.t + kExpBias) << 21) |
           uint64_t(e.u + kExpBias);
}
inline Exp3 unpack(uint64_t k) {
    return {int32_t((k >> 42) & 0x1FFFFF) - int32_t(kExpBias),
            int32_t((k >> 21) & 0x1FFFFF) - int32_t(kExpBias),
            int32_t(k & 0x1FFFFF) - int32_t(kExpBias)};
}
} // namespace detail

/// Multivariate Laurent polynomial over the Gaussian rationals in s, t, u.
/// Terms are kept sorted by lex order on exponents, no zero coefficients.
class LaurentPoly {
  public:
    struct Term {
        Exp3 e;
        GaussianRational c;
    };

    LaurentPoly() = default;
    explicit LaurentPoly(GaussianRational c) {
        if (!c.is_zero()) terms_.push_back({Exp3{}, std::move(c)});
    }
    LaurentPoly(GaussianRational c, Exp3 e) {
        if (!c.is_zero()) terms_.push_back({e, std::move(c)});
    }

    static LaurentPoly zero() { return LaurentPoly(); }
    static LaurentPoly one() { return LaurentPoly(GaussianRational(1)); }
    static LaurentPoly monomial(GaussianRational c, int es, int et = 0, int eu = 0) {
        return LaurentPoly(std::move(c), Exp3{es, et, eu});
    }
    /// q = s^2 convenience: q^k.
    static LaurentPoly q_pow(int k) { return monomial(GaussianRational(1), 2 * k); }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const { return terms_.size() == 1 && terms_[0].e.is_zero() && terms_[0].c.is_one(); }
    bool is_monomial() const { return terms_.size() == 1; }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].e.is_zero()); }
    size_t term_count() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    const Term& leading() const { return terms_.back(); }

    friend LaurentPoly operator-(const LaurentPoly& a) {
        LaurentPoly r = a;
        for (auto& t : r.terms_) t.c = -t.c;
        return r;
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        size_t i = 0, j = 0;
        while (i < a.terms_.size() && j < b.terms_.size()) {
            uint64_t ka = detail::pack(a.terms_[i].e), kb = detail::pack(b.terms_[j].e);
            if (ka < kb) r.terms_.push_back(a.terms_[i++]);
            else if (kb < ka) r.terms_.push_back(b.terms_[j++]);
            else {
                GaussianRational c = a.terms_[i].c + b.terms_[j].c;
                if (!c.is_zero()) r.terms_.push_back({a.terms_[i].e, std::move(c)});
                ++i, ++j;
            }
        }
        for (; i < a.terms_.size(); ++i) r.terms_.push_back(a.terms_[i]);
        for (; j < b.terms_.size(); ++j) r.terms_.push_back(b.terms_[j]);
        return r;
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

    LaurentPoly& operator+=(const LaurentPoly& b) { return *this = *this + b; }
    LaurentPoly& operator-=(const LaurentPoly& b) { return *this = *this - b; }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (b.is_monomial()) return a.scaled(b.terms_[0].c, b.terms_[0].e);
        if (a.is_monomial()) return b.scaled(a.terms_[0].c, a.terms_[0].e);
        std::unordered_map<uint64_t, GaussianRational> acc;
        acc.reserve(a.terms_.size() * 2);
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) acc[detail::pack(ta.e + tb.e)] += ta.c * tb.c;
        return from_map(acc);
    }
    LaurentPoly& operator*=(const LaurentPoly& b) { return *this = *this * b; }

    LaurentPoly scaled(const GaussianRational& c, Exp3 shift = {}) const {
        if (c.is_zero()) return {};
        LaurentPoly r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            GaussianRational nc = t.c * c;
            if (!nc.is_zero()) r.terms_.push_back({t.e + shift, std::move(nc)});
        }
        return r;
    }
    LaurentPoly shifted(Exp3 shift) const {
        LaurentPoly r = *this;
        for (auto& t : r.terms_) t.e = t.e + shift;
        return r;
    }

    LaurentPoly pow(long long e) const {
        if (e < 0) {
            assert(is_monomial());
            const auto& t = terms_[0];
            return LaurentPoly(t.c.pow(e), Exp3{int32_t(t.e.s * e), int32_t(t.e.t * e),
                                                int32_t(t.e.u * e)});
        }
        LaurentPoly acc = one(), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            if ((e >>= 1)) base *= base;
        }
        return acc;
    }

    bool operator==(const LaurentPoly& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        for (size_t i = 0; i < terms_.size(); ++i)
            if (!(terms_[i].e == o.terms_[i].e) || terms_[i].c != o.terms_[i].c) return false;
        return true;
    }

    Exp3 min_exponents() const {
        Exp3 m{INT32_MAX, INT32_MAX, INT32_MAX};
        for (const auto& t : terms_) {
            m.s = std::min(m.s, t.e.s);
            m.t = std::min(m.t, t.e.t);
            m.u = std::min(m.u, t.e.u);
        }
        return m;
    }
    Exp3 max_exponents() const {
        Exp3 m{INT32_MIN, INT32_MIN, INT32_MIN};
        for (const auto& t : terms_) {
            m.s = std::max(m.s, t.e.s);
            m.t = std::max(m.t, t.e.t);
            m.u = std::max(m.u, t.e.u);
        }
        return m;
    }

    /// Exact division in the Laurent ring; nullopt if not divisible.
    std::optional<LaurentPoly> divided_by(const LaurentPoly& d) const {
        if (d.is_zero()) return std::nullopt;
        if (is_zero()) return LaurentPoly{};
        if (d.is_monomial()) {
            const auto& m = d.terms_[0];
            return scaled(m.c.inverse(), Exp3{-m.e.s, -m.e.t, -m.e.u});
        }
        Exp3 mn = min_exponents(), md = d.min_exponents();
        {
            // cheap filters: spans and the trailing/leading corner terms of an
            // exact product are forced
            Exp3 xa = max_exponents(), xd = d.max_exponents();
            if (xa.s - mn.s < xd.s - md.s || xa.t - mn.t < xd.t - md.t ||
                xa.u - mn.u < xd.u - md.u)
                return std::nullopt;
            Exp3 ta = terms_.front().e, td = d.terms_.front().e; // trailing (lex-lowest)
            if (ta.s - mn.s < td.s - md.s || ta.t - mn.t < td.t - md.t ||
                ta.u - mn.u < td.u - md.u)
                return std::nullopt;
        }
        LaurentPoly r = shifted({-mn.s, -mn.t, -mn.u});
        LaurentPoly dd = d.shifted({-md.s, -md.t, -md.u});
        const Term& dl = dd.leading();
        GaussianRational dlinv = dl.c.inverse();
        LaurentPoly q;
        size_t guard = r.terms_.size() * (dd.terms_.size() + 2) + 16;
        size_t swell = 2 * r.terms_.size() + 16; // exact quotients never swell much here
        while (!r.is_zero()) {
            const Term& rl = r.leading();
            Exp3 de = rl.e - dl.e;
            if (de.s < 0 || de.t < 0 || de.u < 0) return std::nullopt;
            LaurentPoly piece(rl.c * dlinv, de);
            q += piece;
            r -= piece * dd;
            if (guard-- == 0 || r.terms_.size() > swell) return std::nullopt;
        }
        Exp3 sh = {mn.s - md.s, mn.t - md.t, mn.u - md.u};
        return q.shifted(sh);
    }

    /// gcd of coefficient numerators over lcm of denominators (re and im parts),
    /// as a positive rational; 0 for the zero polynomial.
    mpq_class rational_content() const {
        mpz_class g = 0, l = 1;
        for (const auto& t : terms_) {
            for (const mpq_class* q : {&t.c.re(), &t.c.im()}) {
                if (*q == 0) continue;
                mpz_class n = q->get_num();
                g = gcd(g, n);
                l = lcm(l, q->get_den());
            }
        }
        if (g == 0) return 0;
        mpq_class c(abs(g), l);
        c.canonicalize();
        return c;
    }

    /// Rough size in bits, used as an effort cap inside gcd computations.
    size_t bit_size() const {
        size_t n = 0;
        for (const auto& t : terms_) {
            n += mpz_sizeinbase(t.c.re().get_num().get_mpz_t(), 2);
            n += mpz_sizeinbase(t.c.re().get_den().get_mpz_t(), 2);
            if (t.c.im() != 0) {
                n += mpz_sizeinbase(t.c.im().get_num().get_mpz_t(), 2);
                n += mpz_sizeinbase(t.c.im().get_den().get_mpz_t(), 2);
            }
        }
        return n;
    }

    /// Ring homomorphism at a sample point (s,t,u).
    GaussianRational eval(const GaussianRational& s, const GaussianRational& t,
                          const GaussianRational& u) const {
        GaussianRational acc(0);
        for (const auto& tm : terms_)
            acc += tm.c * s.pow(tm.e.s) * t.pow(tm.e.t) * u.pow(tm.e.u);
        return acc;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            std::string mono;
            auto var = [&](const char* v, int e) {
                if (e == 0) return;
                if (!mono.empty()) mono += "*";
                mono += v;
                if (e != 1) mono += "^" + std::to_string(e);
            };
            var("s", it->e.s);
            var("t", it->e.t);
            var("u", it->e.u);
            std::string c = it->c.str();
            bool composite = c.find('+') != std::string::npos ||
                             c.find('-', 1) != std::string::npos;
            std::string piece;
            if (mono.empty()) piece = c;
            else if (c == "1") piece = mono;
            else if (c == "-1") piece = "-" + mono;
            else piece = (composite ? "(" + c + ")" : c) + "*" + mono;
            if (!out.empty() && piece[0] != '-') out += "+";
            out += piece;
        }
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const LaurentPoly& p) { return os << p.str(); }

  private:
    static LaurentPoly from_map(std::unordered_map<uint64_t, GaussianRational>& acc) {
        std::vector<uint64_t> keys;
        keys.reserve(acc.size());
        for (auto& kv : acc)
            if (!kv.second.is_zero()) keys.push_back(kv.first);
        std::sort(keys.begin(), keys.end());
        LaurentPoly r;
        r.terms_.reserve(keys.size());
        for (uint64_t k : keys) r.terms_.push_back({detail::unpack(k), std::move(acc[k])});
        return r;
    }

    std::vector<Term> terms_;
};

/// [n] = (q^n - q^{-n}) / (q - q^{-1}) as a Laurent polynomial in s (q = s^2).
inline LaurentPoly q_bracket(int n) {
    assert(n >= 1);
    LaurentPoly r;
    for (int i = 0; i < n; ++i) r += LaurentPoly::monomial(GaussianRational(1), 2 * (n - 1 - 2 * i));
    return r;
}

} // namespace dvir
