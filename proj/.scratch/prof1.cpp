#include "dvir/products.hpp"
#include "dvir/structure.hpp"
#include <chrono>
#include <cstdio>
using namespace dvir;
using Ctx = SymbolicContext;
static double ms(auto f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}
int main() {
    Engine<Ctx> E{Ctx{}};
    Series<Ctx> beta;
    printf("beta(40): %.1f ms\n", ms([&] { beta = beta_series(E.ctx(), 40, RatioDir::ZOverW); }));
    fflush(stdout);
    BlockKey vac{0, 0};
    auto raw = std::make_shared<RawProduct<Ctx>>(E, WrittenOrder::WThenZ, E.phi_minus,
                                                 E.psistar_minus, vac);
    for (int k = 0; k <= 8; ++k) {
        double t = ms([&] { raw->at(2 * k, -1 - 2 * k); });
        printf("raw(%d,%d): %.1f ms\n", 2 * k, -1 - 2 * k, t);
        fflush(stdout);
    }
    auto reg = std::make_shared<SeriesTimes<Ctx>>(raw, beta);
    printf("reg(0,-1): %.1f ms\n", ms([&] { reg->at(0, -1); }));
    fflush(stdout);
    printf("spec: %.1f ms\n", ms([&] { specialize_ratio(E, *reg, qc::st(2), -8, 2, 4); }));
    fflush(stdout);
    return 0;
}
