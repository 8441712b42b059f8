#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "dvir/errors.hpp"
#include "dvir/fraction.hpp"

namespace dvir {

template <class S>
using Matrix = std::vector<std::vector<S>>; // row-major

/// In-place row reduction over a field; returns rank.  Pivot columns in order.
template <class S>
int row_reduce(Matrix<S>& m, std::vector<int>* pivot_cols = nullptr) {
    if (m.empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && m[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        S inv = m[r][c].inverse();
        for (size_t k = c; k < cols; ++k) m[r][k] = m[r][k] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            S f = m[i][c];
            for (size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        if (pivot_cols) pivot_cols->push_back(int(c));
        ++r;
    }
    return int(r);
}

template <class S>
int matrix_rank(Matrix<S> m) {
    return row_reduce(m);
}

/// Solves A x = b over a field.  Throws InconsistentSystem when no solution
/// exists; among solutions the one with zero free variables is returned.
template <class S>
std::vector<S> solve_field(const Matrix<S>& a, const std::vector<S>& b) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    Matrix<S> aug = a;
    for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    std::vector<int> pivots;
    row_reduce(aug, &pivots);
    std::vector<S> x(cols, S{});
    for (size_t r = 0; r < rows; ++r) {
        bool all0 = true;
        for (size_t c = 0; c < cols; ++c)
            if (!aug[r][c].is_zero()) {
                all0 = false;
                break;
            }
        if (all0 && !aug[r][cols].is_zero()) throw InconsistentSystem();
    }
    for (size_t k = 0; k < pivots.size(); ++k) {
        if (pivots[k] == int(cols)) throw InconsistentSystem();
        x[pivots[k]] = aug[k][cols];
    }
    return x;
}

/// Fraction-free Bareiss elimination rank for Laurent-polynomial matrices.
inline int bareiss_rank(Matrix<LaurentPoly> m) {
    if (m.empty() || m[0].empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    LaurentPoly prev = LaurentPoly::one();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && m[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (size_t i = r + 1; i < rows; ++i) {
            for (size_t k = c + 1; k < cols; ++k) {
                LaurentPoly v = m[r][c] * m[i][k] - m[i][c] * m[r][k];
                auto q = v.divided_by(prev);
                m[i][k] = q ? std::move(*q) : std::move(v); // division is exact in Bareiss
            }
            m[i][c] = LaurentPoly::zero();
        }
        prev = m[r][c];
        ++r;
    }
    return int(r);
}

/// Rank of a FieldElem matrix by clearing rows to polynomials first.
inline int matrix_rank_fraction_free(const Matrix<FieldElem>& m) {
    Matrix<LaurentPoly> p;
    p.reserve(m.size());
    for (const auto& row : m) {
        std::vector<FieldElem::Atom> all;
        FieldElem lcm_acc(1);
        LaurentPoly scale = LaurentPoly::one();
        for (const auto& x : row)
            for (const auto& [atom, k] : x.den_atoms())
                for (int i = 0; i < k; ++i) scale *= atom; // product of denominators is enough
        std::vector<LaurentPoly> pr;
        pr.reserve(row.size());
        for (const auto& x : row) {
            FieldElem v = x * FieldElem(scale);
            v.reduce();
            assert(v.den_atoms().empty());
            pr.push_back(v.num());
        }
        p.push_back(std::move(pr));
    }
    return bareiss_rank(std::move(p));
}

} // namespace dvir
