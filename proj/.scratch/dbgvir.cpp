#include "dvir/virasoro.hpp"
#include <cstdio>
using namespace dvir;
using Ctx = SymbolicContext;
using S = FieldElem;
int main() {
    Engine<Ctx> E{Ctx{}};
    VirasoroAssembler<Ctx> A{E};
    auto vac = FockVector<S>::vacuum(0, S(1));
    auto tm1 = A.apply_t_nontwisted(-1, vac);
    printf("T_{-1}|0>:\n");
    tm1.for_each_sorted([&](int j, int d, int idx, const S& c) {
        printf("  (j=%d,d=%d,idx=%d): %s\n", j, d, idx, c.str().c_str());
    });
    auto t1tm1 = A.apply_t_nontwisted(1, tm1);
    printf("T_1 T_{-1}|0>:\n");
    t1tm1.for_each_sorted([&](int j, int d, int idx, const S& c) {
        printf("  (j=%d,d=%d,idx=%d): %s\n", j, d, idx, c.str().c_str());
    });
    auto t0t0 = A.apply_t_nontwisted(0, A.apply_t_nontwisted(0, vac));
    printf("T_0 T_0|0>:\n");
    t0t0.for_each_sorted([&](int j, int d, int idx, const S& c) {
        printf("  %s\n", c.str().c_str());
    });
    printf("f_0 = %s\nf_1 = %s\n", A.f_coeff(0).str().c_str(), A.f_coeff(1).str().c_str());
    auto& ctx = E.ctx();
    S rhs = A.rhs_constant() * (ctx.monomial(qc::q3(-1)) - ctx.monomial(qc::q3(1)));
    printf("RHS = %s\n", rhs.str().c_str());
    S lhs = *t1tm1.coeff(0, Partition{}) * A.f_coeff(0) + *t0t0.coeff(0, Partition{}) * A.f_coeff(1);
    printf("LHS vac = %s\n", lhs.str().c_str());
    printf("residual = %s\n", (lhs - rhs).str().c_str());
    return 0;
}
// second entry point via define
