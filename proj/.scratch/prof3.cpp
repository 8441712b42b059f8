#include "dvir/virasoro.hpp"
#include <chrono>
#include <cstdio>
using namespace dvir;
using Ctx = SymbolicContext;
using S = FieldElem;
static double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}
int main() {
    Engine<Ctx> E{Ctx{}};
    VirasoroAssembler<Ctx> A{E};
    // time individual T-mode builds on the worst blocks of the small window
    for (int j : {0, 1})
        for (int d = 0; d <= 2; ++d)
            for (long long n = -4; n <= 4; ++n) {
                double t0 = now_ms();
                A.t_nontwisted(n, BlockKey{j, d});
                double dt = now_ms() - t0;
                if (dt > 500) printf("T_%lld on (%d,%d): %.0f ms\n", n, j, d, dt);
            }
    printf("t-modes done at %.0f\n", now_ms());
    double t0 = now_ms();
    for (int j : {0, 1})
        for (int d = 0; d <= 2; ++d)
            for (long long n = -2; n <= 2; ++n)
                for (long long m = -2; m <= n; ++m)
                    A.relation_residual_nontwisted(n, m, BlockKey{j, d});
    printf("chains: %.0f ms\n", now_ms() - t0);
    return 0;
}
