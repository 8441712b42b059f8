#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dvir/fock.hpp"

namespace dvir {

/// Denominator kind of one Heisenberg family term.
enum class BrDenom { BracketN, Bracket2N };

/// One term of a creation/annihilation family: the coefficient of a_{∓n} z^{±n}
/// picks up pref * base^n / [n or 2n].
struct HeisTerm {
    GaussianRational pref;
    Monomial base;
    BrDenom denom;
};

/// Zero-mode factor base^{(a∂+b)/2}, optionally carrying z^{(a∂+b)/2}.
/// Factors are stored in lattice-left normal form: every ∂ reads the source
/// sector, all lattice shifts commuted to the left.
struct ZFactor {
    Monomial base;
    bool carries_z = true;
    int a = 0;
    int b = 0;
};

/// Convention for composing the lattice/zero-mode parts of a normal-ordered
/// product.  LatticeLeft collects shifts to the left of all ∂-powers;
/// WrittenOrder keeps the factors acting exactly as juxtaposed.
enum class NormalOrderStyle { LatticeLeft, WrittenOrder };

namespace detail {
inline uint64_t next_spec_uid() {
    static std::atomic<uint64_t> n{1};
    return n.fetch_add(1);
}
} // namespace detail

/// Closed-form current: exp(sum A_n a_{-n} z^n) exp(sum B_n a_n z^{-n}) *
/// lattice shift * zero-mode factors * scalar * z^{offset/2}.
struct ExponentialSpec {
    std::vector<HeisTerm> creation, annihilation;
    int lattice_halfsteps = 0;
    std::vector<ZFactor> zfactors;
    Monomial scalar = Monomial::one();
    long long z_offset_doubled = 0;
    // identifies the creation/annihilation families for coefficient caching;
    // copies share it, fresh specs get a new one
    uint64_t family_uid = detail::next_spec_uid();
};

struct Current;
using CurrentPtr = std::shared_ptr<const Current>;

/// A single extracted mode x of another current (a family of block matrices).
struct XMode {
    CurrentPtr current;
    long long doubled_exp = 0; // coefficient of z^{doubled_exp/2}
};

struct QCommutatorSpec {
    CurrentPtr inner;
    XMode x;
    Monomial p; // [A, x]_p = A x - p x A
};

struct ArgRescaleSpec {
    CurrentPtr inner;
    Monomial gamma; // C(gamma * z)
};

struct ScaledSpec {
    CurrentPtr inner;
    Monomial coeff;
    long long doubled_shift = 0; // coeff * z^{shift/2} * C(z)
};

struct Current {
    std::string name;
    std::variant<ExponentialSpec, QCommutatorSpec, ArgRescaleSpec, ScaledSpec> spec;
    int sector_shift = 0;

    const ExponentialSpec* exponential() const { return std::get_if<ExponentialSpec>(&spec); }
};

inline CurrentPtr make_current(std::string name,
                               std::variant<ExponentialSpec, QCommutatorSpec, ArgRescaleSpec,
                                            ScaledSpec> spec,
                               int shift) {
    auto c = std::make_shared<Current>();
    c->name = std::move(name);
    c->spec = std::move(spec);
    c->sector_shift = shift;
    return c;
}

/// Doubled zero-mode z-exponent of an exponential current at source sector j.
inline long long zexp_at(const ExponentialSpec& e, int j) {
    long long z = e.z_offset_doubled;
    for (const auto& f : e.zfactors)
        if (f.carries_z) z += (long long)f.a * j + f.b;
    return z;
}

namespace detail {
inline long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

struct PartCount {
    int part;
    int mult;
};
inline std::vector<PartCount> run_lengths(const Partition& p) {
    std::vector<PartCount> r;
    for (int x : p) {
        if (!r.empty() && r.back().part == x) ++r.back().mult;
        else r.push_back({x, 1});
    }
    return r;
}

inline Partition merge_parts(const Partition& a, const Partition& b) {
    Partition r;
    r.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r), std::greater<>());
    return r;
}
} // namespace detail

/// Mode-matrix engine with memoization; owns the scalar context and the
/// canonical currents of the level-1 bosonization.
template <class Ctx>
class Engine {
  public:
    using S = typename Ctx::Scalar;

    explicit Engine(Ctx ctx) : ctx_(std::move(ctx)) { build_standard(); }

    const Ctx& ctx() const { return ctx_; }

    // canonical currents
    CurrentPtr xplus, xminus;
    CurrentPtr phi_minus, psi_plus, psistar_minus;
    CurrentPtr phi_plus, psi_minus, psistar_plus;
    CurrentPtr phi_plus_alt, psi_minus_alt, psistar_minus_rescaled;

    XMode xminus_mode(int k) const { return {xminus, -2 * (k + 1LL)}; } // x_k^-
    XMode xplus_mode(int k) const { return {xplus, -2 * (k + 1LL)}; }   // x_k^+

    /// Target block of mode K applied to src (may have negative degree: empty).
    BlockKey mode_dst(const CurrentPtr& c, long long K, BlockKey src) const {
        if (const auto* e = c->exponential()) {
            BlockKey dst{src.j + e->lattice_halfsteps, -1};
            if (!src.valid()) return dst;
            long long z0 = zexp_at(*e, src.j);
            long long delta2 = K - z0; // twice the degree change
            if (delta2 % 2 == 0) {
                long long d = src.d + delta2 / 2;
                dst.d = d < 0 ? -1 : int32_t(d);
            }
            return dst;
        }
        if (const auto* qc = std::get_if<QCommutatorSpec>(&c->spec)) {
            if (!src.valid()) return {src.j + c->sector_shift, -1};
            BlockKey x_dst = mode_dst(qc->x.current, qc->x.doubled_exp, src);
            BlockKey via_x{src.j + c->sector_shift, -1};
            if (x_dst.valid()) via_x = mode_dst(qc->inner, K, x_dst);
            if (via_x.valid()) return via_x;
            BlockKey c_dst = mode_dst(qc->inner, K, src);
            if (c_dst.valid()) return mode_dst(qc->x.current, qc->x.doubled_exp, c_dst);
            return {src.j + c->sector_shift, -1};
        }
        if (const auto* ar = std::get_if<ArgRescaleSpec>(&c->spec))
            return mode_dst(ar->inner, K, src);
        const auto& sc = std::get<ScaledSpec>(c->spec);
        return mode_dst(sc.inner, K - sc.doubled_shift, src);
    }

    /// Parity (mod 2) of the doubled exponents of nonzero modes on sector j.
    int mode_parity(const CurrentPtr& c, int j) const {
        if (const auto* e = c->exponential()) return int(((zexp_at(*e, j) % 2) + 2) % 2);
        if (const auto* qc = std::get_if<QCommutatorSpec>(&c->spec))
            return mode_parity(qc->inner, j + qc->x.current->sector_shift);
        if (const auto* ar = std::get_if<ArgRescaleSpec>(&c->spec))
            return mode_parity(ar->inner, j);
        const auto& sc = std::get<ScaledSpec>(c->spec);
        return int(((mode_parity(sc.inner, j) + sc.doubled_shift) % 2 + 2) % 2);
    }

    /// Smallest doubled exponent with a possibly nonzero mode on src.
    long long min_mode(const CurrentPtr& c, BlockKey src) const {
        if (const auto* e = c->exponential()) return zexp_at(*e, src.j) - 2LL * src.d;
        if (const auto* qc = std::get_if<QCommutatorSpec>(&c->spec)) {
            BlockKey x_dst = mode_dst(qc->x.current, qc->x.doubled_exp, src);
            long long m1 = x_dst.valid() ? min_mode(qc->inner, x_dst) : INT64_MAX;
            long long m2 = min_mode(qc->inner, src);
            return std::min(m1, m2);
        }
        if (const auto* ar = std::get_if<ArgRescaleSpec>(&c->spec))
            return min_mode(ar->inner, src);
        const auto& sc = std::get<ScaledSpec>(c->spec);
        return min_mode(sc.inner, src) + sc.doubled_shift;
    }

    /// Exact coefficient of z^{K/2} of the current applied to the block.
    const BlockMatrix<S>& mode(const CurrentPtr& c, long long K, BlockKey src) {
        ModeKey key = mode_key(c.get(), K, src);
        {
            std::shared_lock lk(mx_);
            auto it = mode_cache_.find(key);
            if (it != mode_cache_.end()) return *it->second;
        }
        auto m = std::make_unique<BlockMatrix<S>>(compute_mode(c, K, src));
        std::unique_lock lk(mx_);
        auto [it, fresh] = mode_cache_.try_emplace(key, std::move(m));
        return *it->second;
    }

    /// Applies mode K of the current to a Fock vector.
    FockVector<S> apply_mode(const CurrentPtr& c, long long K, const FockVector<S>& v) {
        FockVector<S> out;
        v.for_each([&](int32_t j, int32_t d, int32_t idx, const S& coeff) {
            const auto& m = mode(c, K, BlockKey{j, d});
            if (!m.dst.valid()) return;
            for (int r = 0; r < int(m.col[idx].size()); ++r) {
                if (m.col[idx][r].is_zero()) continue;
                out.add(m.dst.j, m.dst.d, r, m.col[idx][r] * coeff);
            }
        });
        return out;
    }

    /// Heisenberg family value A_n (creation=true) or B_n of an exponential spec.
    S heis_coeff(const ExponentialSpec& e, bool creation, int n) {
        uint64_t key = (e.family_uid << 9) ^ uint64_t(n << 1) ^ uint64_t(creation);
        {
            std::shared_lock lk(hmx_);
            auto it = heis_cache_.find(key);
            if (it != heis_cache_.end()) return it->second;
        }
        const auto& fam = creation ? e.creation : e.annihilation;
        S acc{};
        for (const auto& t : fam) {
            S num = ctx_.from_rational(t.pref) * ctx_.monomial(t.base.pow(n));
            S den = ctx_.bracket(t.denom == BrDenom::BracketN ? n : 2 * n);
            acc += num * den.inverse();
        }
        std::unique_lock lk(hmx_);
        heis_cache_.emplace(key, acc);
        return acc;
    }

    /// The closed form of : c1(g1 z) c2(g2 z) : as one exponential current.
    CurrentPtr normal_ordered_product(const CurrentPtr& c1, const Monomial& g1,
                                      const CurrentPtr& c2, const Monomial& g2,
                                      NormalOrderStyle style = NormalOrderStyle::LatticeLeft) const {
        const auto* e1 = c1->exponential();
        const auto* e2 = c2->exponential();
        if (!e1 || !e2) throw NotExponential();
        ExponentialSpec m;
        auto add_scaled = [](std::vector<HeisTerm>& dst, const std::vector<HeisTerm>& src,
                             const Monomial& g) {
            for (auto t : src) {
                t.base = t.base.times(g);
                dst.push_back(std::move(t));
            }
        };
        add_scaled(m.creation, e1->creation, g1);
        add_scaled(m.creation, e2->creation, g2);
        add_scaled(m.annihilation, e1->annihilation, g1);
        add_scaled(m.annihilation, e2->annihilation, g2);
        m.lattice_halfsteps = e1->lattice_halfsteps + e2->lattice_halfsteps;
        // c2 factors act first and read the source sector either way
        for (auto f : e2->zfactors) {
            f.base = f.carries_z ? f.base.times(g2) : f.base;
            m.zfactors.push_back(std::move(f));
        }
        for (auto f : e1->zfactors) {
            if (style == NormalOrderStyle::WrittenOrder) f.b += f.a * e2->lattice_halfsteps;
            f.base = f.carries_z ? f.base.times(g1) : f.base;
            m.zfactors.push_back(std::move(f));
        }
        m.scalar = e1->scalar.times(e2->scalar);
        if (e1->z_offset_doubled % 2 == 0) m.scalar = m.scalar.times(g1.pow(e1->z_offset_doubled / 2));
        else m.scalar = m.scalar.times(monomial_sqrt(g1).pow(e1->z_offset_doubled));
        if (e2->z_offset_doubled % 2 == 0) m.scalar = m.scalar.times(g2.pow(e2->z_offset_doubled / 2));
        else m.scalar = m.scalar.times(monomial_sqrt(g2).pow(e2->z_offset_doubled));
        m.z_offset_doubled = e1->z_offset_doubled + e2->z_offset_doubled;
        return make_current(":" + c1->name + "*" + c2->name + ":", std::move(m),
                            m.lattice_halfsteps);
    }

  private:
    void build_standard() {
        GaussianRational one(1), minus(-1);
        auto mono = [](int es, int et = 0, int eu = 0) {
            return Monomial{GaussianRational(1), {es, et, eu}};
        };
        auto nmono = [](int es, int et = 0, int eu = 0) {
            return Monomial{GaussianRational(-1), {es, et, eu}};
        };

        {
            ExponentialSpec e;
            e.creation = {{one, mono(-1), BrDenom::BracketN}};
            e.annihilation = {{minus, mono(-1), BrDenom::BracketN}};
            e.lattice_halfsteps = 2;
            e.zfactors = {{Monomial::one(), true, 2, 0}}; // z^{∂}
            xplus = make_current("X+", std::move(e), 2);
        }
        {
            ExponentialSpec e;
            e.creation = {{minus, mono(1), BrDenom::BracketN}};
            e.annihilation = {{one, mono(1), BrDenom::BracketN}};
            e.lattice_halfsteps = -2;
            e.zfactors = {{Monomial::one(), true, -2, 0}}; // z^{-∂}
            xminus = make_current("X-", std::move(e), -2);
        }
        {
            ExponentialSpec e;
            e.creation = {{one, mono(7), BrDenom::Bracket2N}};
            e.annihilation = {{minus, mono(-5), BrDenom::Bracket2N}};
            e.lattice_halfsteps = 1;
            e.zfactors = {{nmono(6), true, 1, 0}}; // (-q^3 z)^{∂/2}
            phi_minus = make_current("Phi-", std::move(e), 1);
        }
        {
            ExponentialSpec e;
            e.creation = {{minus, mono(1), BrDenom::Bracket2N}};
            e.annihilation = {{one, mono(-3), BrDenom::Bracket2N}};
            e.lattice_halfsteps = -1;
            e.zfactors = {{nmono(2), true, -1, 0}}; // (-q z)^{-∂/2}
            psi_plus = make_current("Psi+", std::move(e), -1);
        }
        {
            ExponentialSpec e;
            e.creation = {{minus, mono(5), BrDenom::Bracket2N}};
            e.annihilation = {{one, mono(-7), BrDenom::Bracket2N}};
            e.lattice_halfsteps = -1;
            e.zfactors = {{nmono(6), true, -1, 0}}; // (-q^3 z)^{-∂/2}
            psistar_minus = make_current("Psi*-", std::move(e), -1);
        }

        // Phi+(z) = [Phi-(z), x_0^-]_q, and q^2 z Phi+(z) = [Phi-(z), x_1^-]_{q^{-1}}
        phi_plus = make_current("Phi+", QCommutatorSpec{phi_minus, xminus_mode(0), mono(2)}, -1);
        phi_plus_alt = make_current(
            "Phi+~",
            ScaledSpec{make_current("[Phi-,x1-]", QCommutatorSpec{phi_minus, xminus_mode(1),
                                                                  mono(-2)}, -1),
                       mono(-4), -2},
            -1);
        // Psi-(z) = [Psi+(z), x_0^+]_q, and (q^2 z)^{-1} Psi-(z) = [Psi+(z), x_{-1}^+]_{q^{-1}}
        psi_minus = make_current("Psi-", QCommutatorSpec{psi_plus, xplus_mode(0), mono(2)}, 1);
        psi_minus_alt = make_current(
            "Psi-~",
            ScaledSpec{make_current("[Psi+,x-1+]", QCommutatorSpec{psi_plus, xplus_mode(-1),
                                                                   mono(-2)}, 1),
                       mono(4), 2},
            1);
        // Psi*_e(z) = Psi_{-e}(q^2 z)
        psistar_plus = make_current("Psi*+", ArgRescaleSpec{psi_minus, mono(4)}, 1);
        psistar_minus_rescaled =
            make_current("Psi*-~", ArgRescaleSpec{psi_plus, mono(4)}, -1);
    }

    struct ModeKey {
        const Current* c;
        long long K;
        int32_t j, d;
        bool operator==(const ModeKey&) const = default;
    };
    struct ModeKeyHash {
        size_t operator()(const ModeKey& k) const {
            size_t h = std::hash<const void*>{}(k.c);
            auto mix = [&h](uint64_t v) {
                h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            };
            mix(uint64_t(k.K + (1LL << 30)));
            mix(uint64_t(uint32_t(k.j + 512)));
            mix(uint64_t(uint32_t(k.d + 4)));
            return h;
        }
    };
    static ModeKey mode_key(const Current* c, long long K, BlockKey b) {
        return ModeKey{c, K, b.j, b.d};
    }

    BlockMatrix<S> compute_mode(const CurrentPtr& c, long long K, BlockKey src) {
        BlockKey dst = mode_dst(c, K, src);
        if (const auto* e = c->exponential()) return exponential_mode(*e, K, src, dst);
        if (const auto* qc = std::get_if<QCommutatorSpec>(&c->spec)) {
            // [C, x]_p at mode K: C_K x - p x C_K with block routing
            BlockMatrix<S> r = BlockMatrix<S>::zero(src, dst);
            if (!src.valid() || !dst.valid()) return r;
            BlockKey x_dst = mode_dst(qc->x.current, qc->x.doubled_exp, src);
            if (x_dst.valid() && mode_dst(qc->inner, K, x_dst) == dst) {
                const auto& xm = mode(qc->x.current, qc->x.doubled_exp, src);
                const auto& cm = mode(qc->inner, K, x_dst);
                r = r + cm * xm;
            }
            BlockKey c_dst = mode_dst(qc->inner, K, src);
            if (c_dst.valid() && mode_dst(qc->x.current, qc->x.doubled_exp, c_dst) == dst) {
                const auto& cm = mode(qc->inner, K, src);
                const auto& xm = mode(qc->x.current, qc->x.doubled_exp, c_dst);
                r = r - (xm * cm).scaled(ctx_.monomial(qc->p));
            }
            return r;
        }
        if (const auto* ar = std::get_if<ArgRescaleSpec>(&c->spec)) {
            const auto& inner = mode(ar->inner, K, src);
            return inner.scaled(ctx_.pow_half(ar->gamma, K));
        }
        const auto& sc = std::get<ScaledSpec>(c->spec);
        const auto& inner = mode(sc.inner, K - sc.doubled_shift, src);
        return inner.scaled(ctx_.monomial(sc.coeff));
    }

    BlockMatrix<S> exponential_mode(const ExponentialSpec& e, long long K, BlockKey src,
                                    BlockKey dst) {
        BlockMatrix<S> m = BlockMatrix<S>::zero(src, dst);
        if (!src.valid() || !dst.valid()) return m;
        long long z0 = zexp_at(e, src.j);
        if ((K - z0) % 2 != 0) return m;
        long long delta = (K - z0) / 2;

        // zero-mode scalar at the source sector
        S zscale = ctx_.monomial(e.scalar);
        for (const auto& f : e.zfactors)
            zscale = zscale * ctx_.pow_half(f.base, (long long)f.a * src.j + f.b);

        const auto& basis = partitions_of(src.d);
        for (int idx = 0; idx < int(basis.size()); ++idx) {
            const Partition& lam = basis[idx];
            auto runs = detail::run_lengths(lam);
            // enumerate removal submultisets
            std::function<void(size_t, int, Partition&, const S&)> go =
                [&](size_t pos, int removed_degree, Partition& kept, const S& acc) {
                    if (pos == runs.size()) {
                        long long m_create = delta + removed_degree;
                        if (m_create < 0) return;
                        for (const Partition& nu : partitions_of(int(m_create))) {
                            S cfac = acc;
                            for (const auto& rc : detail::run_lengths(nu)) {
                                S an = heis_coeff_cached(e, true, rc.part);
                                if (an.is_zero()) { cfac = S{}; break; }
                                S f = an.pow(rc.mult) *
                                      ctx_.from_rational(GaussianRational::of(1, fact(rc.mult)));
                                cfac = cfac * f;
                            }
                            if (cfac.is_zero()) continue;
                            Partition target = detail::merge_parts(kept, nu);
                            assert(heis_degree(target) == dst.d);
                            m.col[idx][partition_index(target)] += cfac;
                        }
                        return;
                    }
                    const auto& rc = runs[pos];
                    for (int r = 0; r <= rc.mult; ++r) {
                        S fac = acc;
                        if (r > 0) {
                            S bn = heis_coeff_cached(e, false, rc.part);
                            if (bn.is_zero()) break;
                            S cn = contraction_cached(rc.part);
                            fac = fac * bn.pow(r) * cn.pow(r) *
                                  ctx_.from_long(detail::binom(rc.mult, r));
                        }
                        size_t old = kept.size();
                        for (int i = 0; i < rc.mult - r; ++i) kept.push_back(rc.part);
                        go(pos + 1, removed_degree + r * rc.part, kept, fac);
                        kept.resize(old);
                    }
                };
            Partition kept;
            go(0, 0, kept, zscale);
        }
        return m;
    }

    S heis_coeff_cached(const ExponentialSpec& e, bool creation, int n) {
        return heis_coeff(e, creation, n);
    }
    S contraction_cached(int n) {
        std::unique_lock lk(cmx_);
        auto it = cn_.find(n);
        if (it != cn_.end()) return it->second;
        S v = contraction_constant(ctx_, n);
        cn_.emplace(n, v);
        return v;
    }

    static long long fact(int n) {
        long long r = 1;
        for (int i = 2; i <= n; ++i) r *= i;
        return r;
    }

    Ctx ctx_;
    std::shared_mutex mx_;
    std::shared_mutex hmx_;
    std::mutex cmx_;
    std::unordered_map<ModeKey, std::unique_ptr<BlockMatrix<S>>, ModeKeyHash> mode_cache_;
    std::unordered_map<uint64_t, S> heis_cache_;
    std::unordered_map<int, S> cn_;
};

} // namespace dvir
