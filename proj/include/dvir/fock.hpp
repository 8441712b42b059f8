#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "dvir/context.hpp"

namespace dvir {

/// Weakly decreasing positive parts; the multiset of Heisenberg modes a_{-n}.
using Partition = std::vector<int32_t>;

inline int heis_degree(const Partition& p) {
    int d = 0;
    for (int x : p) d += x;
    return d;
}

namespace detail {
struct PartitionSet {
    std::vector<Partition> list; // lex-descending
    std::map<Partition, int> index;
};

inline void gen_partitions(int d, int maxpart, Partition& cur, std::vector<Partition>& out) {
    if (d == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(d, maxpart); k >= 1; --k) {
        cur.push_back(k);
        gen_partitions(d - k, k, cur, out);
        cur.pop_back();
    }
}

inline const PartitionSet& partition_set(int d) {
    static std::vector<PartitionSet*> cache;
    static std::shared_mutex mx;
    {
        std::shared_lock lk(mx);
        if (d < int(cache.size()) && cache[d]) return *cache[d];
    }
    std::unique_lock lk(mx);
    if (d >= int(cache.size())) cache.resize(d + 1, nullptr);
    if (!cache[d]) {
        auto* ps = new PartitionSet;
        Partition cur;
        gen_partitions(d, d == 0 ? 1 : d, cur, ps->list);
        for (size_t i = 0; i < ps->list.size(); ++i) ps->index[ps->list[i]] = int(i);
        cache[d] = ps;
    }
    return *cache[d];
}
} // namespace detail

/// Ordered basis of the (sector, degree) block: partitions in lex-descending order.
inline const std::vector<Partition>& partitions_of(int d) {
    assert(d >= 0);
    return detail::partition_set(d).list;
}
inline int partition_count(int d) { return d < 0 ? 0 : int(partitions_of(d).size()); }
inline int partition_index(const Partition& p) {
    int d = heis_degree(p);
    auto& ix = detail::partition_set(d).index;
    auto it = ix.find(p);
    assert(it != ix.end());
    return it->second;
}

/// Independent partition counter (Euler recurrence) used as a test oracle.
inline long long partition_count_oracle(int n) {
    static std::vector<long long> p{1};
    static std::mutex mx;
    std::lock_guard lk(mx);
    while (int(p.size()) <= n) {
        int m = int(p.size());
        long long acc = 0;
        for (int k = 1;; ++k) {
            long long g1 = (long long)k * (3 * k - 1) / 2, g2 = (long long)k * (3 * k + 1) / 2;
            if (g1 > m && g2 > m) break;
            long long sgn = (k % 2) ? 1 : -1;
            if (g1 <= m) acc += sgn * p[m - g1];
            if (g2 <= m) acc += sgn * p[m - g2];
        }
        p.push_back(acc);
    }
    return p[n];
}

/// Block of the level-1 module: sector j (eigenvalue of the lattice grading
/// operator) and Heisenberg degree d.
struct BlockKey {
    int32_t j = 0;
    int32_t d = 0;
    bool operator==(const BlockKey&) const = default;
    auto operator<=>(const BlockKey&) const = default;
    int dim() const { return partition_count(d); }
    bool valid() const { return d >= 0; }
    /// Doubled principal degree 2*deg_pr = 2d + j(j-1)/2.
    long long doubled_principal() const { return 2LL * d + (long long)j * (j - 1) / 2; }
};

struct BasisState {
    int32_t j = 0;
    Partition parts;
    BlockKey block() const { return {j, int32_t(heis_degree(parts))}; }
};

namespace detail {
inline uint64_t pack_state(int32_t j, int32_t d, int32_t idx) {
    return (uint64_t(uint32_t(j + 512)) << 48) | (uint64_t(uint32_t(d)) << 24) |
           uint64_t(uint32_t(idx));
}
inline void unpack_state(uint64_t k, int32_t& j, int32_t& d, int32_t& idx) {
    j = int32_t((k >> 48) & 0x3FF) - 512;
    d = int32_t((k >> 24) & 0xFFFFFF);
    idx = int32_t(k & 0xFFFFFF);
}
} // namespace detail

/// Finite formal combination of basis states with exact coefficients.
template <class S>
class FockVector {
  public:
    FockVector() = default;

    static FockVector basis(int j, const Partition& p, S coeff) {
        FockVector v;
        v.add(j, heis_degree(p), partition_index(p), std::move(coeff));
        return v;
    }
    static FockVector vacuum(int j, S coeff) {
        FockVector v;
        v.add(j, 0, 0, std::move(coeff));
        return v;
    }

    void add(int32_t j, int32_t d, int32_t idx, S coeff) {
        if (coeff.is_zero()) return;
        uint64_t k = detail::pack_state(j, d, idx);
        auto [it, fresh] = m_.try_emplace(k, std::move(coeff));
        if (!fresh) {
            it->second += coeff;
            if (it->second.is_zero()) m_.erase(it);
        }
    }

    bool is_zero() const { return m_.empty(); }
    size_t size() const { return m_.size(); }
    void clear() { m_.clear(); }

    FockVector& operator+=(const FockVector& o) {
        for (const auto& [k, c] : o.m_) {
            auto [it, fresh] = m_.try_emplace(k, c);
            if (!fresh) {
                it->second += c;
                if (it->second.is_zero()) m_.erase(it);
            }
        }
        return *this;
    }
    FockVector& operator-=(const FockVector& o) {
        for (const auto& [k, c] : o.m_) {
            auto [it, fresh] = m_.try_emplace(k, -c);
            if (!fresh) {
                it->second -= c;
                if (it->second.is_zero()) m_.erase(it);
            }
        }
        return *this;
    }
    friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
    friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }

    FockVector scaled(const S& v) const {
        FockVector r;
        if (v.is_zero()) return r;
        for (const auto& [k, c] : m_) {
            S nc = c * v;
            if (!nc.is_zero()) r.m_.emplace(k, std::move(nc));
        }
        return r;
    }

    bool operator==(const FockVector& o) const {
        if (m_.size() != o.m_.size()) return false;
        for (const auto& [k, c] : m_) {
            auto it = o.m_.find(k);
            if (it == o.m_.end() || !(it->second == c)) return false;
        }
        return true;
    }

    /// Deterministic iteration order (sector, degree, index).
    template <class F>
    void for_each_sorted(F&& f) const {
        std::vector<uint64_t> keys;
        keys.reserve(m_.size());
        for (const auto& [k, c] : m_) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (uint64_t k : keys) {
            int32_t j, d, idx;
            detail::unpack_state(k, j, d, idx);
            f(j, d, idx, m_.at(k));
        }
    }
    template <class F>
    void for_each(F&& f) const {
        for (const auto& [k, c] : m_) {
            int32_t j, d, idx;
            detail::unpack_state(k, j, d, idx);
            f(j, d, idx, c);
        }
    }

    const S* coeff(int32_t j, int32_t d, int32_t idx) const {
        auto it = m_.find(detail::pack_state(j, d, idx));
        return it == m_.end() ? nullptr : &it->second;
    }
    const S* coeff(int j, const Partition& p) const {
        return coeff(j, heis_degree(p), partition_index(p));
    }

  private:
    std::unordered_map<uint64_t, S> m_;
};

/// Heisenberg contraction constant c_n = [2n][n]/n (gamma = q).
template <class Ctx>
typename Ctx::Scalar contraction_constant(const Ctx& ctx, int n) {
    return ctx.bracket(2 * n) * ctx.bracket(n) * ctx.from_rational(GaussianRational::of(1, n));
}

/// a_{-n} action: adds one part n.
template <class Ctx>
FockVector<typename Ctx::Scalar> heis_create(const Ctx&, int n,
                                             const FockVector<typename Ctx::Scalar>& v) {
    assert(n >= 1);
    FockVector<typename Ctx::Scalar> r;
    v.for_each([&](int32_t j, int32_t d, int32_t idx, const auto& c) {
        Partition p = partitions_of(d)[idx];
        p.insert(std::upper_bound(p.begin(), p.end(), n, std::greater<>()), n);
        r.add(j, d + n, partition_index(p), c);
    });
    return r;
}

/// a_n action for n >= 1: derivation with contraction constant c_n.
template <class Ctx>
FockVector<typename Ctx::Scalar> heis_annihilate(const Ctx& ctx, int n,
                                                 const FockVector<typename Ctx::Scalar>& v) {
    assert(n >= 1);
    auto cn = contraction_constant(ctx, n);
    FockVector<typename Ctx::Scalar> r;
    v.for_each([&](int32_t j, int32_t d, int32_t idx, const auto& c) {
        const Partition& p = partitions_of(d)[idx];
        auto it = std::find(p.begin(), p.end(), n);
        if (it == p.end()) return;
        long mult = std::count(p.begin(), p.end(), n);
        Partition q = p;
        q.erase(std::find(q.begin(), q.end(), n));
        r.add(j, d - n, partition_index(q), c * cn * ctx.from_long(mult));
    });
    return r;
}

/// e^{alpha/2 * halfsteps}: shifts every sector by halfsteps.
template <class S>
FockVector<S> lattice_shift(int halfsteps, const FockVector<S>& v) {
    FockVector<S> r;
    v.for_each([&](int32_t j, int32_t d, int32_t idx, const S& c) {
        r.add(j + halfsteps, d, idx, c);
    });
    return r;
}

/// (-1)^∂.
template <class Ctx>
FockVector<typename Ctx::Scalar> parity_op(const Ctx& ctx,
                                           const FockVector<typename Ctx::Scalar>& v) {
    FockVector<typename Ctx::Scalar> r;
    v.for_each([&](int32_t j, int32_t d, int32_t idx, const auto& c) {
        r.add(j, d, idx, (j % 2) ? -c : c);
    });
    (void)ctx;
    return r;
}

/// base^{(a∂+b)/2}: per-sector scalar multiplication.
template <class Ctx>
FockVector<typename Ctx::Scalar> zero_mode_scale(const Ctx& ctx, const Monomial& base, int a,
                                                 int b,
                                                 const FockVector<typename Ctx::Scalar>& v) {
    FockVector<typename Ctx::Scalar> r;
    v.for_each([&](int32_t j, int32_t d, int32_t idx, const auto& c) {
        r.add(j, d, idx, c * ctx.pow_half(base, (long long)a * j + b));
    });
    return r;
}

/// Dense matrix of one graded block of an operator, stored column-major.
template <class S>
struct BlockMatrix {
    BlockKey src, dst;
    std::vector<std::vector<S>> col; // col[src_idx][dst_idx]

    static BlockMatrix zero(BlockKey src, BlockKey dst) {
        BlockMatrix m;
        m.src = src;
        m.dst = dst;
        m.col.assign(std::max(src.dim(), 0), std::vector<S>(std::max(dst.dim(), 0), S{}));
        return m;
    }
    static BlockMatrix identity(BlockKey b) {
        BlockMatrix m = zero(b, b);
        for (int i = 0; i < b.dim(); ++i) m.col[i][i] = S(1);
        return m;
    }

    bool is_zero() const {
        for (const auto& c : col)
            for (const auto& x : c)
                if (!x.is_zero()) return false;
        return true;
    }

    FockVector<S> apply_basis(int src_idx) const {
        FockVector<S> r;
        if (src_idx >= int(col.size())) return r;
        for (int i = 0; i < int(col[src_idx].size()); ++i)
            r.add(dst.j, dst.d, i, col[src_idx][i]);
        return r;
    }

    friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
        assert(a.src == b.src && a.dst == b.dst);
        BlockMatrix r = a;
        for (size_t i = 0; i < r.col.size(); ++i)
            for (size_t k = 0; k < r.col[i].size(); ++k) r.col[i][k] += b.col[i][k];
        return r;
    }
    friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
        assert(a.src == b.src && a.dst == b.dst);
        BlockMatrix r = a;
        for (size_t i = 0; i < r.col.size(); ++i)
            for (size_t k = 0; k < r.col[i].size(); ++k) r.col[i][k] -= b.col[i][k];
        return r;
    }
    BlockMatrix scaled(const S& v) const {
        BlockMatrix r = *this;
        for (auto& c : r.col)
            for (auto& x : c) x = x * v;
        return r;
    }
    /// Composition a∘b (b acts first).  Each output cell is accumulated as a
    /// batched sum over one common denominator.
    friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
        assert(a.src == b.dst);
        BlockMatrix r = zero(b.src, a.dst);
        int rows = r.dst.dim();
        std::vector<std::vector<S>> cell(rows);
        for (int i = 0; i < int(b.col.size()); ++i) {
            for (auto& c : cell) c.clear();
            for (int m = 0; m < int(b.col[i].size()); ++m) {
                if (b.col[i][m].is_zero()) continue;
                for (int k = 0; k < int(a.col[m].size()); ++k) {
                    if (a.col[m][k].is_zero()) continue;
                    cell[k].push_back(a.col[m][k] * b.col[i][m]);
                }
            }
            for (int k = 0; k < rows; ++k)
                if (!cell[k].empty()) r.col[i][k] = S::sum(cell[k]);
        }
        return r;
    }
};

} // namespace dvir
