#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dvir/linalg.hpp"

using namespace dvir;

TEST_CASE("rank of identity and zero") {
    Matrix<FieldElem> id(3, std::vector<FieldElem>(3));
    for (int i = 0; i < 3; ++i) id[i][i] = FieldElem(1);
    CHECK(matrix_rank(id) == 3);
    CHECK(matrix_rank_fraction_free(id) == 3);
    Matrix<FieldElem> z(2, std::vector<FieldElem>(4));
    CHECK(matrix_rank(z) == 0);
    CHECK(matrix_rank_fraction_free(z) == 0);
}

TEST_CASE("solve with re-substitution oracle") {
    // random small symbolic systems; solution re-substituted must reproduce b
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coeff(-2, 2), expo(-1, 1);
    auto rnd = [&] {
        return FieldElem(LaurentPoly::monomial(GaussianRational(coeff(rng)), expo(rng), 0, 0) +
                         LaurentPoly::monomial(GaussianRational(coeff(rng)), 0, expo(rng), 0));
    };
    for (int trial = 0; trial < 20; ++trial) {
        size_t n = 3;
        Matrix<FieldElem> a(n, std::vector<FieldElem>(n));
        for (auto& row : a)
            for (auto& x : row) x = rnd();
        std::vector<FieldElem> xs(n);
        for (auto& x : xs) x = rnd();
        std::vector<FieldElem> b(n);
        for (size_t i = 0; i < n; ++i) {
            FieldElem acc;
            for (size_t k = 0; k < n; ++k) acc += a[i][k] * xs[k];
            b[i] = acc;
        }
        auto sol = solve_field(a, b);
        for (size_t i = 0; i < n; ++i) {
            FieldElem acc;
            for (size_t k = 0; k < n; ++k) acc += a[i][k] * sol[k];
            CHECK(acc == b[i]);
        }
    }
}

TEST_CASE("inconsistent system throws") {
    Matrix<FieldElem> a = {{FieldElem(1), FieldElem(1)}, {FieldElem(1), FieldElem(1)}};
    std::vector<FieldElem> b = {FieldElem(1), FieldElem(2)};
    CHECK_THROWS_AS(solve_field(a, b), InconsistentSystem);
}

TEST_CASE("bareiss agrees with field elimination on random matrices") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coeff(-2, 2), expo(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        size_t n = 4, m = 5;
        Matrix<FieldElem> a(n, std::vector<FieldElem>(m));
        Matrix<LaurentPoly> p(n, std::vector<LaurentPoly>(m));
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < m; ++k) {
                LaurentPoly v = LaurentPoly::monomial(GaussianRational(coeff(rng)), expo(rng),
                                                      expo(rng), 0);
                p[i][k] = v;
                a[i][k] = FieldElem(v);
            }
        CHECK(bareiss_rank(p) == matrix_rank(a));
    }
}
