#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dvir/virasoro.hpp"

using namespace dvir;

using Ctx = SymbolicContext;
using S = FieldElem;

namespace {
Engine<Ctx>& engine() {
    static Engine<Ctx> e{Ctx{}};
    return e;
}
VirasoroAssembler<Ctx>& assembler() {
    static VirasoroAssembler<Ctx> a{engine()};
    return a;
}
FockVector<S> vac(int j) { return FockVector<S>::vacuum(j, S(1)); }
} // namespace

TEST_CASE("the auxiliary commutation relation behind the (+,+) pair") {
    // [Psi*_+(w), x_0^-] = q^{-∂} Psi*_-(w), blockwise
    auto& E = engine();
    auto comm = make_current("[Psi*+,x0-]",
                             QCommutatorSpec{E.psistar_plus, E.xminus_mode(0), Monomial::one()},
                             E.psistar_plus->sector_shift - 2);
    for (int j = -2; j <= 2; ++j)
        for (int d = 0; d <= 2; ++d)
            for (long long K = -5; K <= 5; ++K) {
                BlockKey src{j, d};
                const auto& lhs = E.mode(comm, K, src);
                const auto& base = E.mode(E.psistar_minus, K, src);
                if (!lhs.dst.valid() || !base.dst.valid()) {
                    CHECK(lhs.is_zero());
                    CHECK(base.is_zero());
                    continue;
                }
                REQUIRE(lhs.dst == base.dst);
                auto rhs = base.scaled(S(LaurentPoly::q_pow(-base.dst.j)));
                CHECK((lhs - rhs).is_zero());
            }
}

TEST_CASE("non-twisted highest weights") {
    auto& A = assembler();
    for (int j = -2; j <= 2; ++j) {
        auto v = A.apply_t_nontwisted(0, vac(j));
        auto expect = vac(j).scaled(A.highest_weight(j));
        CHECK(v == expect);
        for (long long n = 1; n <= 3; ++n) CHECK(A.apply_t_nontwisted(n, vac(j)).is_zero());
    }
}

TEST_CASE("lambda examples from the weight display") {
    auto& A = assembler();
    auto& ctx = engine().ctx();
    // j = 0: I s u + (I s u)^{-1}
    Monomial isu{GaussianRational::i(), {1, 0, 1}};
    CHECK(A.highest_weight(0) == ctx.monomial(isu) + ctx.monomial(isu.pow(-1)));
    // j = 1: I s^2 t u + inverse
    Monomial m1{GaussianRational::i(), {2, 1, 1}};
    CHECK(A.highest_weight(1) == ctx.monomial(m1) + ctx.monomial(m1.pow(-1)));
    // the two-term sum is invariant under head -> head^{-1}
    for (int j : {-1, 0, 2}) {
        Monomial head{GaussianRational::i(), {int32_t(1 + j), int32_t(j), 1}};
        CHECK(ctx.monomial(head) + ctx.monomial(head.pow(-1)) == A.highest_weight(j));
    }
}

TEST_CASE("non-twisted T preserves the sector and has integer modes only") {
    auto& A = assembler();
    for (int j : {-1, 0, 2})
        for (int d = 0; d <= 2; ++d)
            for (long long n = -2; n <= 2; ++n) {
                const auto& t = A.t_nontwisted(n, BlockKey{j, d});
                if (!t.dst.valid()) continue;
                CHECK(t.dst.j == j);
                CHECK(t.dst.d == d - n);
            }
}

TEST_CASE("defining relation on the vacuum, (n,m) = (1,-1) and (0,0)") {
    auto& A = assembler();
    auto& ctx = engine().ctx();
    // (0,0): antisymmetric, residual must vanish identically
    CHECK(A.relation_residual_nontwisted(0, 0, BlockKey{0, 0}).is_zero());
    // (1,-1) on |0>: the full residual (including the RHS constant) vanishes
    auto r = A.relation_residual_nontwisted(1, -1, BlockKey{0, 0});
    CHECK(r.is_zero());
    // and the RHS alone is -C (q3^{-1} - q3), nonzero
    S rhs = A.rhs_constant() * (ctx.monomial(qc::q3(-1)) - ctx.monomial(qc::q3(1)));
    CHECK(!rhs.is_zero());
}

TEST_CASE("defining relation across a small window") {
    auto& A = assembler();
    for (int j : {0, 1})
        for (int d = 0; d <= 2; ++d)
            for (long long n = -2; n <= 2; ++n)
                for (long long m = -2; m <= n; ++m) {
                    auto r = A.relation_residual_nontwisted(n, m, BlockKey{j, d});
                    CHECK(r.is_zero());
                }
}

TEST_CASE("twisted highest weight vectors") {
    auto& A = assembler();
    for (int i : {0, 1})
        for (long long r2 = 1; r2 <= 7; r2 += 2) // r = 1/2 .. 7/2 doubled
            CHECK(A.apply_t_twisted(r2, vac(i)).is_zero());
}

TEST_CASE("twisted T shifts sectors by two and lands at half-odd degrees") {
    auto& A = assembler();
    auto v = A.apply_t_twisted(-1, vac(0)); // T_{-1/2}|Λ_0>
    CHECK(!v.is_zero());
    v.for_each([&](int32_t j, int32_t d, int32_t, const S&) {
        CHECK((j == 2 || j == -2));
        CHECK(BlockKey{j, d}.doubled_principal() == 1);
    });
}

TEST_CASE("twisted defining relation at (1/2, -1/2) and a window") {
    auto& A = assembler();
    CHECK(A.relation_residual_twisted(1, -1, BlockKey{0, 0}).empty());
    CHECK(A.relation_residual_twisted(3, -3, BlockKey{1, 0}).empty());
    for (int j : {0, 1})
        for (long long r2 = -3; r2 <= 3; r2 += 2)
            for (long long s2 = -3; s2 <= r2; s2 += 2)
                CHECK(A.relation_residual_twisted(r2, s2, BlockKey{j, 0}).empty());
}

TEST_CASE("gauss identity through the stated order") {
    auto lhs = gauss_lhs(10);
    std::vector<long> expect{1, 1, 1, 2, 2, 3}; // through x^{5/2} doubled 5
    for (int k = 0; k <= 5; ++k) CHECK(mpz_class(lhs.c[k]) == mpz_class(expect[k]));
    for (int i : {0, 1}) {
        auto rhs = gauss_rhs(i, 10);
        for (int k = 0; k <= 10; ++k) CHECK(mpz_class(lhs.c[k]) == mpz_class(rhs.c[k]));
    }
}

TEST_CASE("sampled and symbolic T agree entrywise") {
    SampledContext sctx{GaussianRational::of(2, 5), GaussianRational::of(3, 7),
                        GaussianRational::of(5, 3)};
    Engine<SampledContext> se{sctx};
    VirasoroAssembler<SampledContext> sa{se};
    auto& A = assembler();
    for (int j : {0, 1})
        for (long long n = -1; n <= 1; ++n) {
            BlockKey b{j, 1};
            const auto& sym = A.t_nontwisted(n, b);
            const auto& smp = sa.t_nontwisted(n, b);
            REQUIRE(sym.dst == smp.dst);
            for (size_t c = 0; c < sym.col.size(); ++c)
                for (size_t r = 0; r < sym.col[c].size(); ++r)
                    CHECK(sym.col[c][r].eval(sctx.s, sctx.t, sctx.u) == smp.col[c][r]);
        }
}
