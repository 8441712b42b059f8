#include "dvir/structure.hpp"
#include <chrono>
#include <cstdio>
using namespace dvir;
using Ctx = SymbolicContext;
int main() {
    Ctx ctx;
    printf("start\n");
    fflush(stdout);
    for (int N : {5, 10, 15, 20, 25, 30, 40}) {
        auto t0 = std::chrono::steady_clock::now();
        auto b = beta_series(ctx, N, RatioDir::Plain);
        double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        printf("beta N=%d: %.1f ms, terms=%zu atoms=%zu\n", N, ms, b.at(N).num().term_count(),
               b.at(N).den_atoms().size());
        fflush(stdout);
    }
    return 0;
}
