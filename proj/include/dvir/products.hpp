#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dvir/currents.hpp"
#include "dvir/series.hpp"

namespace dvir {

/// Which written order a two-variable product has.  The radial convention
/// ties it to the ratio orientation that may multiply it: products written
/// P(z)Q(w) take series in w/z, products written P(w)Q(z) take series in z/w.
enum class WrittenOrder { ZThenW, WThenZ };

inline RatioDir allowed_dir(WrittenOrder o) {
    return o == WrittenOrder::ZThenW ? RatioDir::WOverZ : RatioDir::ZOverW;
}

/// Lazy exact view of a two-variable family of block matrices indexed by the
/// doubled exponents (a, b) of z^{a/2} w^{b/2}, for one fixed source block.
template <class Ctx>
class ProductExpr {
  public:
    using S = typename Ctx::Scalar;

    virtual ~ProductExpr() = default;

    BlockKey src() const { return src_; }
    WrittenOrder order() const { return order_; }

    /// Target block of the antidiagonal a + b = c; d = -1 when empty.
    virtual BlockKey dst(long long c) const = 0;
    /// Lower bound for the first-acting variable's doubled exponent.
    virtual long long first_min() const = 0;
    /// Doubled-exponent parities (mod 2) of (a, b); entries off-parity vanish.
    virtual std::pair<int, int> parity() const = 0;

    const BlockMatrix<S>& at(long long a, long long b) {
        auto key = std::make_pair(a, b);
        auto it = memo_.find(key);
        if (it != memo_.end()) return *it->second;
        auto m = std::make_unique<BlockMatrix<S>>(compute(a, b));
        return *memo_.emplace(key, std::move(m)).first->second;
    }

  protected:
    ProductExpr(BlockKey src, WrittenOrder order) : src_(src), order_(order) {}
    virtual BlockMatrix<S> compute(long long a, long long b) = 0;

    BlockMatrix<S> zero_at(long long c) const {
        return BlockMatrix<S>::zero(src_, dst(c));
    }

    BlockKey src_;
    WrittenOrder order_;

  private:
    std::map<std::pair<long long, long long>, std::unique_ptr<BlockMatrix<S>>> memo_;
};

template <class Ctx>
using ExprPtr = std::shared_ptr<ProductExpr<Ctx>>;

/// Ordered product of two currents.  For ZThenW the w-current acts first,
/// for WThenZ the z-current acts first.
template <class Ctx>
class RawProduct final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    RawProduct(Engine<Ctx>& eng, WrittenOrder order, CurrentPtr at_z, CurrentPtr at_w,
               BlockKey src)
        : ProductExpr<Ctx>(src, order), eng_(eng), at_z_(std::move(at_z)),
          at_w_(std::move(at_w)) {}

    BlockKey dst(long long c) const override {
        if (this->order_ == WrittenOrder::ZThenW) {
            long long b0 = eng_.min_mode(at_w_, this->src_);
            BlockKey mid = eng_.mode_dst(at_w_, b0, this->src_);
            if (!mid.valid()) return {0, -1};
            return eng_.mode_dst(at_z_, c - b0, mid);
        }
        long long a0 = eng_.min_mode(at_z_, this->src_);
        BlockKey mid = eng_.mode_dst(at_z_, a0, this->src_);
        if (!mid.valid()) return {0, -1};
        return eng_.mode_dst(at_w_, c - a0, mid);
    }

    long long first_min() const override {
        return this->order_ == WrittenOrder::ZThenW ? eng_.min_mode(at_w_, this->src_)
                                                    : eng_.min_mode(at_z_, this->src_);
    }

    std::pair<int, int> parity() const override {
        if (this->order_ == WrittenOrder::ZThenW) {
            int pb = eng_.mode_parity(at_w_, this->src_.j);
            int pa = eng_.mode_parity(at_z_, this->src_.j + at_w_->sector_shift);
            return {pa, pb};
        }
        int pa = eng_.mode_parity(at_z_, this->src_.j);
        int pb = eng_.mode_parity(at_w_, this->src_.j + at_z_->sector_shift);
        return {pa, pb};
    }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        BlockKey dst = this->dst(a + b);
        auto r = BlockMatrix<S>::zero(this->src_, dst);
        if (!dst.valid()) return r;
        if (this->order_ == WrittenOrder::ZThenW) {
            BlockKey mid = eng_.mode_dst(at_w_, b, this->src_);
            if (!mid.valid() || !(eng_.mode_dst(at_z_, a, mid) == dst)) return r;
            return eng_.mode(at_z_, a, mid) * eng_.mode(at_w_, b, this->src_);
        }
        BlockKey mid = eng_.mode_dst(at_z_, a, this->src_);
        if (!mid.valid() || !(eng_.mode_dst(at_w_, b, mid) == dst)) return r;
        return eng_.mode(at_w_, b, mid) * eng_.mode(at_z_, a, this->src_);
    }

  private:
    Engine<Ctx>& eng_;
    CurrentPtr at_z_, at_w_;
};

/// Product multiplied by a truncated series in the declared ratio; exact on
/// every entry because the first-acting exponent is bounded below.
template <class Ctx>
class SeriesTimes final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    SeriesTimes(ExprPtr<Ctx> inner, Series<Ctx> s)
        : ProductExpr<Ctx>(inner->src(), inner->order()), inner_(std::move(inner)),
          s_(std::move(s)) {
        if (s_.dir != allowed_dir(this->order_)) throw RatioOrientationMismatch();
    }

    BlockKey dst(long long c) const override { return inner_->dst(c); }
    long long first_min() const override { return inner_->first_min(); }
    std::pair<int, int> parity() const override { return inner_->parity(); }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        auto r = this->zero_at(a + b);
        long long lo = inner_->first_min();
        // series in w/z moves (a+2k, b-2k); series in z/w moves (a-2k, b+2k)
        bool wz = this->order_ == WrittenOrder::ZThenW;
        for (int k = 0; k <= s_.order(); ++k) {
            long long aa = wz ? a + 2 * k : a - 2 * k;
            long long bb = wz ? b - 2 * k : b + 2 * k;
            long long first = wz ? bb : aa;
            if (first < lo) break;
            if (s_.at(k).is_zero()) continue;
            r = r + inner_->at(aa, bb).scaled(s_.at(k));
        }
        return r;
    }

  private:
    ExprPtr<Ctx> inner_;
    Series<Ctx> s_;
};

/// Product multiplied by a Laurent polynomial in z, w (finite term list).
template <class Ctx>
class PolyTimes final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;
    struct Term {
        Monomial coeff;
        long long da, db; // doubled exponent shifts
    };

    PolyTimes(ExprPtr<Ctx> inner, std::vector<Term> terms, const Ctx& ctx)
        : ProductExpr<Ctx>(inner->src(), inner->order()), inner_(std::move(inner)),
          terms_(std::move(terms)), ctx_(ctx) {}

    BlockKey dst(long long c) const override {
        BlockKey last{0, -1};
        for (const auto& t : terms_) {
            last = inner_->dst(c - t.da - t.db);
            if (last.valid()) return last;
        }
        return last;
    }
    long long first_min() const override {
        long long m = INT64_MAX;
        for (const auto& t : terms_)
            m = std::min(m, inner_->first_min() +
                                (this->order_ == WrittenOrder::ZThenW ? t.db : t.da));
        return m;
    }
    std::pair<int, int> parity() const override {
        auto p = inner_->parity();
        if (!terms_.empty()) {
            p.first = int(((p.first + terms_[0].da) % 2 + 2) % 2);
            p.second = int(((p.second + terms_[0].db) % 2 + 2) % 2);
        }
        return p;
    }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        auto r = this->zero_at(a + b);
        if (!r.dst.valid()) return r;
        for (const auto& t : terms_) {
            const auto& m = inner_->at(a - t.da, b - t.db);
            if (!m.dst.valid()) continue;
            if (!(m.dst == r.dst)) continue; // differently graded: contributes nothing here
            r = r + m.scaled(ctx_.monomial(t.coeff));
        }
        return r;
    }

  private:
    ExprPtr<Ctx> inner_;
    std::vector<Term> terms_;
    const Ctx& ctx_;
};

/// q-commutator [V(z,w), x]_p of a whole product family with one mode.
template <class Ctx>
class QCommProduct final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;
    using Factory = std::function<ExprPtr<Ctx>(BlockKey)>;

    QCommProduct(Engine<Ctx>& eng, const Factory& inner, XMode x, Monomial p, BlockKey src)
        : ProductExpr<Ctx>(src, inner(src)->order()), eng_(eng), x_(std::move(x)),
          p_(std::move(p)) {
        inner_src_ = inner(src);
        BlockKey xd = eng_.mode_dst(x_.current, x_.doubled_exp, src);
        if (xd.valid()) inner_x_ = inner(xd);
    }

    BlockKey dst(long long c) const override {
        if (inner_x_) {
            BlockKey d = inner_x_->dst(c);
            if (d.valid()) return d;
        }
        BlockKey d = inner_src_->dst(c);
        if (d.valid()) return eng_.mode_dst(x_.current, x_.doubled_exp, d);
        return {0, -1};
    }
    long long first_min() const override {
        long long m = inner_src_->first_min();
        if (inner_x_) m = std::min(m, inner_x_->first_min());
        return m;
    }
    std::pair<int, int> parity() const override {
        return inner_x_ ? inner_x_->parity() : inner_src_->parity();
    }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        BlockKey dd = dst(a + b);
        auto r = BlockMatrix<S>::zero(this->src_, dd);
        if (!dd.valid()) return r;
        if (inner_x_) {
            const auto& vm = inner_x_->at(a, b);
            if (vm.dst == dd) {
                const auto& xm = eng_.mode(x_.current, x_.doubled_exp, this->src_);
                r = r + vm * xm;
            }
        }
        const auto& vs = inner_src_->at(a, b);
        if (vs.dst.valid()) {
            BlockKey after = eng_.mode_dst(x_.current, x_.doubled_exp, vs.dst);
            if (after == dd) {
                const auto& xm = eng_.mode(x_.current, x_.doubled_exp, vs.dst);
                r = r - (xm * vs).scaled(eng_.ctx().monomial(p_));
            }
        }
        return r;
    }

  private:
    Engine<Ctx>& eng_;
    ExprPtr<Ctx> inner_src_, inner_x_;
    XMode x_;
    Monomial p_;
};

/// Linear combination of equally-shaped products.
template <class Ctx>
class SumExpr final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    SumExpr(std::vector<std::pair<S, ExprPtr<Ctx>>> terms)
        : ProductExpr<Ctx>(terms.at(0).second->src(), terms.at(0).second->order()),
          terms_(std::move(terms)) {}

    BlockKey dst(long long c) const override {
        for (const auto& [s, e] : terms_) {
            BlockKey d = e->dst(c);
            if (d.valid()) return d;
        }
        return terms_[0].second->dst(c);
    }
    long long first_min() const override {
        long long m = INT64_MAX;
        for (const auto& [s, e] : terms_) m = std::min(m, e->first_min());
        return m;
    }
    std::pair<int, int> parity() const override { return terms_[0].second->parity(); }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        BlockKey dd = dst(a + b);
        auto r = BlockMatrix<S>::zero(this->src_, dd);
        if (!dd.valid()) return r;
        for (const auto& [s, e] : terms_) {
            const auto& m = e->at(a, b);
            if (m.dst == dd) r = r + m.scaled(s);
        }
        return r;
    }

  private:
    std::vector<std::pair<S, ExprPtr<Ctx>>> terms_;
};

/// The formal distribution term scalar * (-1)^∂ * delta, where delta is
/// delta(z, q^2 w) (eta = +1, coefficient q^b) or delta(q^2 z, w) (eta = -1,
/// coefficient q^a) on the antidiagonal a + b = -2 (doubled).
template <class Ctx>
class DeltaTerm final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    DeltaTerm(Engine<Ctx>& eng, BlockKey src, WrittenOrder order, Monomial scalar, int eta)
        : ProductExpr<Ctx>(src, order), eng_(eng), scalar_(std::move(scalar)), eta_(eta) {}

    BlockKey dst(long long c) const override {
        if (c != -2) return {this->src_.j, -1};
        return this->src_;
    }
    long long first_min() const override { return -2 - 2 * this->src_.d - 64; }
    std::pair<int, int> parity() const override { return {0, 0}; }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        auto r = BlockMatrix<S>::zero(this->src_, dst(a + b));
        if (a + b != -2 || ((a % 2) + 2) % 2 != 0) return r;
        // actual exponent is e/2, so the (q^2)^{e/2} = q^e factor is s^{2e}
        long long e = eta_ > 0 ? b : a;
        S v = eng_.ctx().monomial(scalar_) *
              eng_.ctx().monomial(Monomial{GaussianRational(1), {int32_t(2 * e), 0, 0}});
        if (((this->src_.j % 2) + 2) % 2) v = -v; // (-1)^∂
        for (int i = 0; i < this->src_.dim(); ++i) r.col[i][i] = v;
        return r;
    }

  private:
    Engine<Ctx>& eng_;
    Monomial scalar_;
    int eta_;
};

/// Closed form of the two-variable normally ordered pair : c1(z) c2(w) :.
/// Matrix elements have finite (a, b) support; this is what makes the
/// regularized specialization exact.
template <class Ctx>
class NOPairExpr final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    NOPairExpr(Engine<Ctx>& eng, CurrentPtr at_z, CurrentPtr at_w, BlockKey src,
               NormalOrderStyle style = NormalOrderStyle::LatticeLeft)
        : ProductExpr<Ctx>(src, WrittenOrder::ZThenW), eng_(eng) {
        const auto* e1 = at_z->exponential();
        const auto* e2 = at_w->exponential();
        if (!e1 || !e2) throw NotExponential();
        ez_ = *e1;
        ew_ = *e2;
        if (style == NormalOrderStyle::WrittenOrder)
            for (auto& f : ez_.zfactors) f.b += f.a * ew_.lattice_halfsteps;
    }

    BlockKey dst(long long c) const override {
        long long z0 = zexp_at(ez_, this->src_.j) + zexp_at(ew_, this->src_.j);
        if ((c - z0) % 2 != 0) return {target_j(), -1};
        long long d = this->src_.d + (c - z0) / 2;
        return {target_j(), d < 0 ? -1 : int32_t(d)};
    }
    long long first_min() const override {
        return zexp_at(ew_, this->src_.j) - 2LL * this->src_.d;
    }
    std::pair<int, int> parity() const override {
        return {int(((zexp_at(ez_, this->src_.j) % 2) + 2) % 2),
                int(((zexp_at(ew_, this->src_.j) % 2) + 2) % 2)};
    }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        BlockKey dd = dst(a + b);
        auto m = BlockMatrix<S>::zero(this->src_, dd);
        if (!dd.valid()) return m;
        long long za = zexp_at(ez_, this->src_.j), zb = zexp_at(ew_, this->src_.j);
        if ((a - za) % 2 != 0 || (b - zb) % 2 != 0) return m;

        S zscale = eng_.ctx().monomial(ez_.scalar) * eng_.ctx().monomial(ew_.scalar);
        int j = this->src_.j;
        for (const auto& f : ez_.zfactors)
            zscale = zscale * eng_.ctx().pow_half(f.base, (long long)f.a * j + f.b);
        for (const auto& f : ew_.zfactors)
            zscale = zscale * eng_.ctx().pow_half(f.base, (long long)f.a * j + f.b);

        const auto& basis = partitions_of(this->src_.d);
        for (int idx = 0; idx < int(basis.size()); ++idx) {
            const Partition& lam = basis[idx];
            auto runs = detail::run_lengths(lam);
            std::function<void(size_t, long long, long long, Partition&, const S&)> go =
                [&](size_t pos, long long l1, long long l2, Partition& kept, const S& acc) {
                    if (pos == runs.size()) {
                        long long m1 = (a - za) / 2 + l1, m2 = (b - zb) / 2 + l2;
                        if (m1 < 0 || m2 < 0) return;
                        for (const Partition& nu1 : partitions_of(int(m1))) {
                            S f1 = acc;
                            for (const auto& rc : detail::run_lengths(nu1)) {
                                S an = eng_.heis_coeff(ez_, true, rc.part);
                                if (an.is_zero()) { f1 = S{}; break; }
                                f1 = f1 * an.pow(rc.mult) *
                                     eng_.ctx().from_rational(GaussianRational::of(1, fact(rc.mult)));
                            }
                            if (f1.is_zero()) continue;
                            for (const Partition& nu2 : partitions_of(int(m2))) {
                                S f2 = f1;
                                for (const auto& rc : detail::run_lengths(nu2)) {
                                    S an = eng_.heis_coeff(ew_, true, rc.part);
                                    if (an.is_zero()) { f2 = S{}; break; }
                                    f2 = f2 * an.pow(rc.mult) *
                                         eng_.ctx().from_rational(
                                             GaussianRational::of(1, fact(rc.mult)));
                                }
                                if (f2.is_zero()) continue;
                                Partition target =
                                    detail::merge_parts(detail::merge_parts(kept, nu1), nu2);
                                m.col[idx][partition_index(target)] += f2;
                            }
                        }
                        return;
                    }
                    const auto& rc = runs[pos];
                    for (int r1 = 0; r1 <= rc.mult; ++r1)
                        for (int r2 = 0; r1 + r2 <= rc.mult; ++r2) {
                            S fac = acc;
                            int rt = r1 + r2;
                            if (rt > 0) {
                                S b1 = eng_.heis_coeff(ez_, false, rc.part);
                                S b2 = eng_.heis_coeff(ew_, false, rc.part);
                                if (r1 > 0 && b1.is_zero()) continue;
                                if (r2 > 0 && b2.is_zero()) continue;
                                S cn = contraction_constant(eng_.ctx(), rc.part);
                                fac = fac * (r1 ? b1.pow(r1) : S(1)) * (r2 ? b2.pow(r2) : S(1)) *
                                      cn.pow(rt) *
                                      eng_.ctx().from_long(detail::binom(rt, r1) *
                                                           detail::binom(rc.mult, rt));
                            }
                            size_t old = kept.size();
                            for (int i = 0; i < rc.mult - rt; ++i) kept.push_back(rc.part);
                            go(pos + 1, l1 + (long long)r1 * rc.part,
                               l2 + (long long)r2 * rc.part, kept, fac);
                            kept.resize(old);
                        }
                };
            Partition kept;
            go(0, 0, 0, kept, zscale);
        }
        return m;
    }

  private:
    int target_j() const {
        return this->src_.j + ez_.lattice_halfsteps + ew_.lattice_halfsteps;
    }
    static long long fact(int n) {
        long long r = 1;
        for (int i = 2; i <= n; ++i) r *= i;
        return r;
    }

    Engine<Ctx>& eng_;
    ExponentialSpec ez_, ew_;
};

/// Multiplies every entry by base^{j_out}, j_out the target sector; this is
/// how q^{±∂} normalizations enter composite products.
template <class Ctx>
class SectorPowerTimes final : public ProductExpr<Ctx> {
  public:
    using S = typename Ctx::Scalar;

    SectorPowerTimes(Engine<Ctx>& eng, ExprPtr<Ctx> inner, Monomial base)
        : ProductExpr<Ctx>(inner->src(), inner->order()), eng_(eng), inner_(std::move(inner)),
          base_(std::move(base)) {}

    BlockKey dst(long long c) const override { return inner_->dst(c); }
    long long first_min() const override { return inner_->first_min(); }
    std::pair<int, int> parity() const override { return inner_->parity(); }

  protected:
    BlockMatrix<S> compute(long long a, long long b) override {
        const auto& m = inner_->at(a, b);
        if (!m.dst.valid()) return m;
        return m.scaled(eng_.ctx().monomial(base_.pow(m.dst.j)));
    }

  private:
    Engine<Ctx>& eng_;
    ExprPtr<Ctx> inner_;
    Monomial base_;
};

/// Machine-checked evidence that the ratio support of a regularized product
/// is finite: bounds plus a verified-zero guard band.
struct StabilizationCertificate {
    long long k_min = 0, k_max = 0; // doubled first-variable exponents
    int guard = 0;                  // verified zero steps beyond k_max
    bool stabilized = false;
    std::string note;
};

template <class Ctx>
struct SpecializedModes {
    std::map<long long, BlockMatrix<typename Ctx::Scalar>> by_exponent; // doubled z-exponent
    StabilizationCertificate cert;
};

/// Substitutes w = gamma z into a product whose per-antidiagonal support is
/// finite; every coefficient beyond the detected support must vanish over a
/// guard band of `guard` steps, otherwise NotStabilized is thrown.
template <class Ctx>
SpecializedModes<Ctx> specialize_ratio(Engine<Ctx>& eng, ProductExpr<Ctx>& p, const Monomial& gamma,
                                       long long c_lo, long long c_hi, int guard, int pad = 8) {
    if (gamma.c.is_zero()) throw std::invalid_argument("specialization ratio must be a unit");
    using S = typename Ctx::Scalar;
    SpecializedModes<Ctx> out;
    out.cert.guard = guard;
    out.cert.k_min = INT64_MAX;
    out.cert.k_max = INT64_MIN;
    auto [pa, pb] = p.parity();
    for (long long c = c_lo; c <= c_hi; ++c) {
        if (((c % 2) + 2) % 2 != (pa + pb) % 2) continue;
        BlockKey dd = p.dst(c);
        if (!dd.valid()) continue;
        bool wz_first = p.order() == WrittenOrder::WThenZ;
        // scan the first-acting exponent upward from its lower bound; widen
        // once if the support touches the guard band
        long long lo = p.first_min();
        std::vector<std::pair<long long, const BlockMatrix<S>*>> found;
        int attempt_pad = pad;
        for (int attempt = 0;; ++attempt) {
            found.clear();
            long long hi = lo + 2LL * (p.src().d + dd.d) + attempt_pad + 2LL * guard;
            long long last_nonzero = INT64_MIN;
            for (long long f = lo; f <= hi; f += 2) {
                long long a = wz_first ? f : c - f;
                long long b = wz_first ? c - f : f;
                const auto& m = p.at(a, b);
                if (!m.is_zero()) {
                    last_nonzero = f;
                    found.push_back({f, &m});
                }
            }
            if (last_nonzero == INT64_MIN || hi - last_nonzero >= 2LL * guard) break;
            if (attempt >= 1)
                throw NotStabilized("support reaches the guard band at antidiagonal " +
                                    std::to_string(c));
            attempt_pad += 2 * (attempt_pad + 2 * guard);
        }
        BlockMatrix<S> acc = BlockMatrix<S>::zero(p.src(), dd);
        for (auto& [f, m] : found) {
            long long a = wz_first ? f : c - f;
            acc = acc + m->scaled(eng.ctx().pow_half(gamma, c - a));
            out.cert.k_min = std::min(out.cert.k_min, f);
            out.cert.k_max = std::max(out.cert.k_max, f);
        }
        out.by_exponent.emplace(c, std::move(acc));
    }
    out.cert.stabilized = true;
    if (out.cert.k_min == INT64_MAX) out.cert.k_min = out.cert.k_max = 0;
    return out;
}

} // namespace dvir
