#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "dvir/errors.hpp"
#include "dvir/gcd.hpp"
#include "dvir/poly.hpp"

namespace dvir {

/// A strict monomial value c * s^es t^et u^eu.
struct Monomial {
    GaussianRational c;
    Exp3 e;

    static Monomial one() { return {GaussianRational(1), {}}; }
    bool is_one() const { return c.is_one() && e.is_zero(); }
    bool is_zero() const { return c.is_zero(); }
    Monomial times(const Monomial& o) const { return {c * o.c, e + o.e}; }
    Monomial pow(long long k) const {
        return {c.pow(k), Exp3{int32_t(e.s * k), int32_t(e.t * k), int32_t(e.u * k)}};
    }
    LaurentPoly poly() const { return LaurentPoly(c, e); }
};

/// Canonical square root of a monomial inside Q(I)[s^±,t^±,u^±]; the global
/// branch convention (-1)^{1/2} = I lives here.
inline Monomial monomial_sqrt(const Monomial& m) {
    if (m.e.s % 2 || m.e.t % 2 || m.e.u % 2)
        throw NoCanonicalRoot("odd exponent in " + m.poly().str());
    Exp3 h{m.e.s / 2, m.e.t / 2, m.e.u / 2};
    GaussianRational c = m.c;
    GaussianRational unit(1);
    if (!c.is_rational()) throw NoCanonicalRoot("imaginary coefficient " + c.str());
    if (c.re() < 0) {
        unit = GaussianRational::i();
        c = -c;
    }
    mpq_class q = c.re();
    mpz_class ns = sqrt(q.get_num()), ds = sqrt(q.get_den());
    if (ns * ns != q.get_num() || ds * ds != q.get_den())
        throw NoCanonicalRoot("non-square coefficient " + m.c.str());
    return {unit * GaussianRational(mpq_class(ns, ds)), h};
}

/// Element of the field Q(I)(s,t,u).  The denominator is kept as a product of
/// primitive non-monomial atoms; monomial factors always fold into the
/// numerator, which makes the zero test a plain numerator check.
class FieldElem {
  public:
    using Atom = std::pair<LaurentPoly, int>; // canonical associate, multiplicity

    FieldElem() = default;
    FieldElem(long n) : num_(GaussianRational(n)) {}
    explicit FieldElem(GaussianRational c) : num_(std::move(c)) {}
    explicit FieldElem(LaurentPoly p) : num_(std::move(p)) {}
    explicit FieldElem(const Monomial& m) : num_(m.c, m.e) {}

    static FieldElem ratio(const LaurentPoly& n, const LaurentPoly& d) {
        if (d.is_zero()) throw DivisionByZero();
        FieldElem r(n);
        r.divide_poly(d);
        return r;
    }

    const LaurentPoly& num() const { return num_; }
    const std::vector<Atom>& den_atoms() const { return den_; }
    LaurentPoly den_expanded() const {
        LaurentPoly d = LaurentPoly::one();
        for (const auto& [p, k] : den_)
            for (int i = 0; i < k; ++i) d *= p;
        return d;
    }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.empty() && num_.is_one(); }

    friend FieldElem operator-(const FieldElem& a) {
        FieldElem r = a;
        r.num_ = -r.num_;
        return r;
    }

    friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        FieldElem r;
        if (a.same_den(b)) {
            r.num_ = a.num_ + b.num_;
            r.den_ = a.den_;
        } else {
            r.den_ = merge_max(a.den_, b.den_);
            r.num_ = a.num_ * missing_product(r.den_, a.den_) +
                     b.num_ * missing_product(r.den_, b.den_);
        }
        if (r.num_.is_zero()) r.den_.clear();
        else r.cancel();
        return r;
    }
    friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }

    friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
        if (a.is_zero() || b.is_zero()) return {};
        FieldElem r;
        r.num_ = a.num_ * b.num_;
        r.den_ = merge_sum(a.den_, b.den_);
        r.cancel();
        return r;
    }

    FieldElem inverse() const {
        if (is_zero()) throw DivisionByZero();
        FieldElem r(den_expanded());
        r.divide_poly(num_);
        return r;
    }
    friend FieldElem operator/(const FieldElem& a, const FieldElem& b) {
        if (b.is_zero()) throw DivisionByZero();
        if (a.is_zero()) return {};
        FieldElem r = a;
        r.num_ = r.num_ * b.den_expanded();
        r.divide_poly(b.num_);
        return r;
    }

    FieldElem& operator+=(const FieldElem& b) { return *this = *this + b; }
    FieldElem& operator-=(const FieldElem& b) { return *this = *this - b; }
    FieldElem& operator*=(const FieldElem& b) { return *this = *this * b; }
    FieldElem& operator/=(const FieldElem& b) { return *this = *this / b; }

    FieldElem pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        FieldElem acc(1), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            if ((e >>= 1)) base *= base;
        }
        return acc;
    }

    bool operator==(const FieldElem& o) const {
        if (same_den(o)) return num_ == o.num_;
        return (*this - o).is_zero();
    }
    bool operator!=(const FieldElem& o) const { return !(*this == o); }

    /// Full reduction: every denominator atom is coprime to the numerator.
    /// Idempotent; the denominator is canonically monic by construction.
    FieldElem& reduce() {
        if (num_.is_zero()) {
            den_.clear();
            return *this;
        }
        std::vector<Atom> work = std::move(den_);
        den_.clear();
        while (!work.empty()) {
            Atom a = std::move(work.back());
            work.pop_back();
            if (a.second <= 0) continue;
            LaurentPoly g = laurent_gcd(num_, a.first);
            if (g.is_one() || g.is_monomial()) {
                insert_atom_sorted(den_, a);
                continue;
            }
            auto q = num_.divided_by(g);
            if (!q) { // gcd failed to divide; keep the atom untouched
                insert_atom_sorted(den_, a);
                continue;
            }
            num_ = std::move(*q);
            if (g == a.first) {
                if (a.second > 1) work.push_back({a.first, a.second - 1});
            } else {
                // A = mu * g * R with mu a monomial; A^m becomes g^{m-1} R^m
                // after cancelling one g, and mu^m folds into the numerator.
                LaurentPoly rest_raw = *a.first.divided_by(g);
                LaurentPoly rest = primitive_associate(rest_raw);
                int m = a.second;
                Exp3 mn = rest_raw.min_exponents();
                GaussianRational lead = rest_raw.leading().c;
                num_ = num_.scaled(lead.pow(-m),
                                   {int32_t(-mn.s * m), int32_t(-mn.t * m), int32_t(-mn.u * m)});
                if (m > 1) work.push_back({g, m - 1});
                if (!rest.is_one()) work.push_back({rest, m});
            }
        }
        std::erase_if(den_, [](const Atom& a) { return a.second == 0; });
        return *this;
    }

    /// Reduced canonical rendering "num / den" with monic denominator.
    std::string str() const {
        FieldElem c = *this;
        c.reduce();
        if (c.den_.empty()) return c.num_.str();
        LaurentPoly d = c.den_expanded();
        return "(" + c.num_.str() + ")/(" + d.str() + ")";
    }

    GaussianRational eval(const GaussianRational& s, const GaussianRational& t,
                          const GaussianRational& u) const {
        GaussianRational d(1);
        for (const auto& [p, k] : den_) d *= p.eval(s, t, u).pow(k);
        if (d.is_zero()) throw PoleAtSample();
        return num_.eval(s, t, u) / d;
    }

    /// The value as a strict monomial, if it is one.
    std::optional<Monomial> as_monomial() const {
        if (!den_.empty() || !num_.is_monomial()) return std::nullopt;
        return Monomial{num_.leading().c, num_.leading().e};
    }

    /// Batched addition over one common denominator; linear instead of the
    /// quadratic re-expansion an operator+ chain would do.
    static FieldElem sum(const std::vector<FieldElem>& terms) {
        FieldElem r;
        if (terms.empty()) return r;
        for (const auto& t : terms) r.den_ = merge_max(r.den_, t.den_);
        for (const auto& t : terms) {
            if (t.is_zero()) continue;
            r.num_ += t.num_ * missing_product(r.den_, t.den_);
        }
        if (r.num_.is_zero()) {
            r.den_.clear();
            return r;
        }
        r.cancel();
        return r;
    }

  private:
    bool same_den(const FieldElem& o) const {
        if (den_.size() != o.den_.size()) return false;
        for (size_t i = 0; i < den_.size(); ++i)
            if (den_[i].second != o.den_[i].second || !(den_[i].first == o.den_[i].first))
                return false;
        return true;
    }

    static bool atom_less(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.term_count() != b.term_count()) return a.term_count() < b.term_count();
        for (size_t i = 0; i < a.term_count(); ++i) {
            uint64_t ka = detail::pack(a.terms()[i].e), kb = detail::pack(b.terms()[i].e);
            if (ka != kb) return ka < kb;
            if (a.terms()[i].c != b.terms()[i].c) return a.terms()[i].c < b.terms()[i].c;
        }
        return false;
    }

    static void insert_atom_sorted(std::vector<Atom>& den, const Atom& a) {
        for (auto& e : den)
            if (e.first == a.first) {
                e.second += a.second;
                return;
            }
        den.push_back(a);
        std::sort(den.begin(), den.end(),
                  [](const Atom& x, const Atom& y) { return atom_less(x.first, y.first); });
    }

    static std::vector<Atom> merge_max(const std::vector<Atom>& a, const std::vector<Atom>& b) {
        std::vector<Atom> r = a;
        for (const auto& [p, k] : b) {
            bool found = false;
            for (auto& e : r)
                if (e.first == p) {
                    e.second = std::max(e.second, k);
                    found = true;
                    break;
                }
            if (!found) r.push_back({p, k});
        }
        std::sort(r.begin(), r.end(),
                  [](const Atom& x, const Atom& y) { return atom_less(x.first, y.first); });
        return r;
    }
    static std::vector<Atom> merge_sum(const std::vector<Atom>& a, const std::vector<Atom>& b) {
        std::vector<Atom> r = a;
        for (const auto& av : b) insert_atom_sorted(r, av);
        return r;
    }
    static LaurentPoly missing_product(const std::vector<Atom>& total,
                                       const std::vector<Atom>& have) {
        LaurentPoly m = LaurentPoly::one();
        for (const auto& [p, k] : total) {
            int h = 0;
            for (const auto& e : have)
                if (e.first == p) {
                    h = e.second;
                    break;
                }
            for (int i = h; i < k; ++i) m *= p;
        }
        return m;
    }

    /// Divides by an arbitrary nonzero polynomial: monomial part folds into
    /// the numerator, the primitive part joins the denominator atoms unless
    /// it divides the numerator exactly.
    void divide_poly(const LaurentPoly& d) {
        if (d.is_zero()) throw DivisionByZero();
        if (num_.is_zero()) { den_.clear(); return; }
        if (auto q = num_.divided_by(d)) {
            num_ = std::move(*q);
            return;
        }
        LaurentPoly prim = primitive_associate(d);
        // fold the monomial unit d / prim into the numerator
        Exp3 mn = d.min_exponents();
        GaussianRational lead = d.leading().c;
        num_ = num_.scaled(lead.inverse(), {-mn.s, -mn.t, -mn.u});
        if (!prim.is_one()) insert_atom_sorted(den_, {prim, 1});
        cancel();
    }

    /// Cheap cancellation pass: exact division of the numerator by atoms.
    /// Skipped for very large numerators; equality and zero tests are exact
    /// either way, and reduce() still cancels on demand.
    void cancel() {
        if (num_.is_zero()) { den_.clear(); return; }
        if (num_.term_count() > 384) return;
        for (auto& [atom, mult] : den_) {
            while (mult > 0) {
                auto q = num_.divided_by(atom);
                if (!q) break;
                num_ = std::move(*q);
                --mult;
            }
        }
        std::erase_if(den_, [](const Atom& a) { return a.second == 0; });
    }

    void normalize_monic() {
        // atoms are canonical associates already; nothing else to do
    }

    LaurentPoly num_;
    std::vector<Atom> den_; // sorted, canonical associates, multiplicity >= 1
};

inline FieldElem operator*(const FieldElem& a, const GaussianRational& c) {
    return a * FieldElem(c);
}

} // namespace dvir
