#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dvir/currents.hpp"

using namespace dvir;

using Eng = Engine<SymbolicContext>;
using S = FieldElem;

namespace {
Eng& engine() {
    static Eng e{SymbolicContext{}};
    return e;
}
S q_pow(int k) { return S(LaurentPoly::q_pow(k)); }
FockVector<S> vac(int j) { return FockVector<S>::vacuum(j, S(1)); }
} // namespace

TEST_CASE("leading mode of Phi- on the vacuum") {
    auto& E = engine();
    auto v = E.apply_mode(E.phi_minus, 0, vac(0));
    CHECK(v.size() == 1);
    CHECK(*v.coeff(1, Partition{}) == S(1));
}

TEST_CASE("z^1 coefficient of Phi- on the vacuum") {
    auto& E = engine();
    auto v = E.apply_mode(E.phi_minus, 2, vac(0));
    // (q^{7/2}/[2]) a_{-1} |1>
    S expect = S(LaurentPoly::monomial(GaussianRational(1), 7)) / E.ctx().bracket(2);
    CHECK(v.size() == 1);
    CHECK(*v.coeff(1, Partition{1}) == expect);
}

TEST_CASE("X- modes on vacua") {
    auto& E = engine();
    // x_{-1}^- |0> = |-2>  (z^0 coefficient)
    auto v = E.apply_mode(E.xminus, 0, vac(0));
    CHECK(v.size() == 1);
    CHECK(*v.coeff(-2, Partition{}) == S(1));
    // x_0^- |0> = 0
    CHECK(E.apply_mode(E.xminus, -2, vac(0)).is_zero());
    // x_0^- |1> = |-1>
    auto w = E.apply_mode(E.xminus, -2, vac(1));
    CHECK(*w.coeff(-1, Partition{}) == S(1));
    // x_0^+ |0> = 0 (highest weight)
    CHECK(E.apply_mode(E.xplus, -2, vac(0)).is_zero());
    // x_{-1}^+ |0> = |2>
    auto u = E.apply_mode(E.xplus, 0, vac(0));
    CHECK(*u.coeff(2, Partition{}) == S(1));
}

TEST_CASE("Phi+ leading value on the vacuum") {
    auto& E = engine();
    // x_0^-|0> = 0, so only the -q x_0^- Phi-(z)|0> branch contributes
    auto v = E.apply_mode(E.phi_plus, 0, vac(0));
    CHECK(v.size() == 1);
    CHECK(*v.coeff(-1, Partition{}) == -q_pow(1));
}

TEST_CASE("the two defining formulas for Phi+ agree blockwise") {
    auto& E = engine();
    for (int j = -2; j <= 2; ++j)
        for (int d = 0; d <= 3; ++d)
            for (long long K = -6; K <= 6; ++K) {
                auto a = E.mode(E.phi_plus, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                auto b = E.mode(E.phi_plus_alt, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                CHECK(a.src == b.src);
                CHECK((a - b).is_zero());
            }
}

TEST_CASE("the two defining formulas for Psi- agree blockwise") {
    auto& E = engine();
    for (int j = -2; j <= 2; ++j)
        for (int d = 0; d <= 3; ++d)
            for (long long K = -6; K <= 6; ++K) {
                auto a = E.mode(E.psi_minus, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                auto b = E.mode(E.psi_minus_alt, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                CHECK((a - b).is_zero());
            }
}

TEST_CASE("Psi*_- rescale route equals the closed form") {
    auto& E = engine();
    for (int j = -2; j <= 2; ++j)
        for (int d = 0; d <= 3; ++d)
            for (long long K = -6; K <= 6; ++K) {
                auto a = E.mode(E.psistar_minus, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                auto b = E.mode(E.psistar_minus_rescaled, K + (j % 2 ? 1 : 0), BlockKey{j, d});
                CHECK((a - b).is_zero());
            }
}

TEST_CASE("normal-ordered product of two Phi- at (q^2 w, w)") {
    auto& E = engine();
    auto no = E.normal_ordered_product(E.phi_minus, Monomial{GaussianRational(1), {4, 0, 0}},
                                       E.phi_minus, Monomial::one());
    const auto* e = no->exponential();
    REQUIRE(e != nullptr);
    // lattice part is e^{alpha}: shift +2
    CHECK(e->lattice_halfsteps == 2);
    // creation coefficient at n=1: q^{7/2}(q^2+1)/[2] = s^9
    S a1 = E.heis_coeff(*e, true, 1);
    CHECK(a1 == S(LaurentPoly::monomial(GaussianRational(1), 9)));
}

TEST_CASE("normal-ordered product with the identity current is the identity operation") {
    auto& E = engine();
    ExponentialSpec triv;
    auto one = make_current("1", std::move(triv), 0);
    auto no = E.normal_ordered_product(E.phi_minus, Monomial::one(), one, Monomial::one());
    for (int j : {-1, 0, 2})
        for (long long K = -4; K <= 4; ++K) {
            auto a = E.mode(no, K + (j % 2 ? 1 : 0), BlockKey{j, 1});
            auto b = E.mode(E.phi_minus, K + (j % 2 ? 1 : 0), BlockKey{j, 1});
            CHECK((a - b).is_zero());
        }
}

TEST_CASE("modes below the lower support bound vanish") {
    auto& E = engine();
    for (const auto& c : {E.phi_minus, E.psi_plus, E.psistar_minus, E.phi_plus, E.xminus}) {
        for (int j = -2; j <= 2; ++j)
            for (int d = 0; d <= 2; ++d) {
                BlockKey b{j, d};
                long long lo = E.min_mode(c, b);
                for (long long K = lo - 6; K < lo; ++K)
                    CHECK(E.mode(c, K, b).is_zero());
            }
    }
}

TEST_CASE("degree law: one graded component per mode") {
    auto& E = engine();
    for (const auto& c : {E.phi_minus, E.psi_plus, E.psistar_minus, E.phi_plus, E.psi_minus,
                          E.psistar_plus}) {
        for (int j = -2; j <= 2; ++j)
            for (int d = 0; d <= 3; ++d)
                for (long long K = -5; K <= 5; ++K) {
                    BlockKey src{j, d};
                    BlockKey dst = E.mode_dst(c, K, src);
                    FockVector<S> v;
                    for (int idx = 0; idx < src.dim(); ++idx) v.add(j, d, idx, S(1));
                    auto img = E.apply_mode(c, K, v);
                    img.for_each([&](int32_t jj, int32_t dd, int32_t, const S&) {
                        CHECK(jj == dst.j);
                        CHECK(dd == dst.d);
                    });
                }
    }
}

TEST_CASE("q-commutator example: vanishing branch on the vacuum") {
    auto& E = engine();
    // [Phi-(z), x_0^-]_q |0> = -q x_0^- Phi-(z)|0> since x_0^-|0> = 0
    for (long long K = 0; K <= 4; K += 2) {
        auto lhs = E.apply_mode(E.phi_plus, K, vac(0));
        auto rhs = E.apply_mode(E.xminus, -2, E.apply_mode(E.phi_minus, K, vac(0)))
                       .scaled(-q_pow(1));
        CHECK(lhs == rhs);
    }
}
