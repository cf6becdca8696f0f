#include "valet/kernels/profit_row.hpp"

namespace valet::kernels {

namespace {

struct Selected {
    profit_row_fn fn;
    const char* name;
};

Selected select() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {&profit_row_simd, "avx2"};
    return {&profit_row_scalar, "scalar"};
#else
    return {&profit_row_simd, "vec4-portable"};
#endif
}

const Selected g_selected = select();

}  // namespace

profit_row_fn active_profit_row() { return g_selected.fn; }
const char* active_profit_row_name() { return g_selected.name; }

}  // namespace valet::kernels
