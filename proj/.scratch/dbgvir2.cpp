#include "dvir/virasoro.hpp"
#include <cstdio>
using namespace dvir;
using Ctx = SymbolicContext;
using S = FieldElem;
int main() {
    Engine<Ctx> E{Ctx{}};
    VirasoroAssembler<Ctx> A{E};
    auto r = A.relation_residual_nontwisted(1, -1, BlockKey{0, 0});
    printf("dst=(%d,%d) cols=%zu\n", r.dst.j, r.dst.d, r.col.size());
    for (size_t c = 0; c < r.col.size(); ++c)
        for (size_t k = 0; k < r.col[c].size(); ++k)
            if (!r.col[c][k].is_zero()) printf("entry[%zu][%zu] = %s\n", c, k, r.col[c][k].str().c_str());
    return 0;
}
