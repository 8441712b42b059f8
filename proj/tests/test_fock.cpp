#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dvir/fock.hpp"

using namespace dvir;

using S = SymbolicContext::Scalar;
static const SymbolicContext ctx;

namespace {
FockVector<S> vac(int j) { return FockVector<S>::vacuum(j, S(1)); }
} // namespace

TEST_CASE("block enumeration is lex-descending with p(d) states") {
    const auto& b3 = partitions_of(3);
    REQUIRE(b3.size() == 3);
    CHECK(b3[0] == Partition{3});
    CHECK(b3[1] == Partition{2, 1});
    CHECK(b3[2] == Partition{1, 1, 1});
    CHECK(partitions_of(0).size() == 1);
    CHECK(partitions_of(0)[0].empty());
    for (int d = 0; d <= 10; ++d) CHECK(partition_count(d) == partition_count_oracle(d));
}

TEST_CASE("principal degree is stored doubled") {
    // |2>: empty partition, j=2: 2*deg_pr = j(j-1)/2 = 1
    CHECK(BlockKey{2, 0}.doubled_principal() == 1);
    CHECK(BlockKey{0, 0}.doubled_principal() == 0);
    CHECK(BlockKey{1, 0}.doubled_principal() == 0);
    CHECK(BlockKey{-1, 2}.doubled_principal() == 5);
    CHECK(BlockKey{-2, 0}.doubled_principal() == 3);
}

TEST_CASE("heisenberg creation") {
    auto v = heis_create(ctx, 1, vac(0));
    CHECK(*v.coeff(0, Partition{1}) == S(1));
    auto w = heis_create(ctx, 2, v);
    CHECK(*w.coeff(0, Partition{2, 1}) == S(1));
    CHECK(w.size() == 1);
}

TEST_CASE("heisenberg annihilation and the contraction constant") {
    // a_1 a_{-1}|0> = (q + q^{-1}) |0>
    auto v = heis_annihilate(ctx, 1, heis_create(ctx, 1, vac(0)));
    S two_bracket(LaurentPoly::q_pow(1) + LaurentPoly::q_pow(-1));
    CHECK(*v.coeff(0, Partition{}) == two_bracket);

    // a_2 a_{-1}|0> = 0
    CHECK(heis_annihilate(ctx, 2, heis_create(ctx, 1, vac(0))).is_zero());

    // a_1 (a_{-1})^2 |0> = 2(q+q^{-1}) a_{-1}|0>
    auto w = heis_annihilate(ctx, 1, heis_create(ctx, 1, heis_create(ctx, 1, vac(0))));
    CHECK(*w.coeff(0, Partition{1}) == two_bracket * S(2));
}

TEST_CASE("heisenberg commutator identity on low blocks") {
    // a_k a_{-l} - a_{-l} a_k = delta_{k,l} c_k on every basis state of degree <= 4
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l)
            for (int d = 0; d <= 4; ++d)
                for (int idx = 0; idx < partition_count(d); ++idx) {
                    FockVector<S> v;
                    v.add(0, d, idx, S(1));
                    auto lhs = heis_annihilate(ctx, k, heis_create(ctx, l, v)) -
                               heis_create(ctx, l, heis_annihilate(ctx, k, v));
                    FockVector<S> expect;
                    if (k == l) expect = v.scaled(contraction_constant(ctx, k));
                    CHECK(lhs == expect);
                }
}

TEST_CASE("lattice and zero-mode operators") {
    CHECK(*lattice_shift(1, vac(0)).coeff(1, Partition{}) == S(1));
    CHECK(lattice_shift(-1, lattice_shift(1, vac(3))) == vac(3));

    // (-1)^∂ on |3> = -|3>
    CHECK(*parity_op(ctx, vac(3)).coeff(3, Partition{}) == S(-1));
    CHECK(parity_op(ctx, parity_op(ctx, vac(3))) == vac(3));

    // (-q^3)^{∂/2} on |1> = I s^3 |1>
    Monomial mq3{GaussianRational(-1), {6, 0, 0}};
    auto v = zero_mode_scale(ctx, mq3, 1, 0, vac(1));
    S expect = ctx.monomial({GaussianRational::i(), {3, 0, 0}});
    CHECK(*v.coeff(1, Partition{}) == expect);
}

TEST_CASE("zero-mode/lattice reordering scalar") {
    // c^{∂/2} e^{α/2} = c^{1/2} e^{α/2} c^{∂/2}: shifting first changes the exponent
    Monomial base{GaussianRational(1), {4, 0, 0}}; // q^2, integer root q
    for (int j : {-2, 0, 1, 3}) {
        auto lhs = zero_mode_scale(ctx, base, 1, 0, lattice_shift(1, vac(j)));
        auto rhs = lattice_shift(1, zero_mode_scale(ctx, base, 1, 0, vac(j)))
                       .scaled(ctx.pow_half(base, 1));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("block matrix algebra") {
    BlockKey b{0, 2};
    auto id = BlockMatrix<S>::identity(b);
    auto z = BlockMatrix<S>::zero(b, b);
    CHECK((id * id).col == id.col);
    CHECK((id - id).is_zero());
    CHECK((id * z).is_zero());
    auto v = id.apply_basis(1);
    CHECK(*v.coeff(0, Partition{1, 1}) == S(1));
}
