#include "valet/kernels/profit_row.hpp"

#include <cmath>
#include <limits>

#include "valet/kernels/vec4d.hpp"
#include "valet/kernels/vec4d_math.hpp"

namespace valet::kernels {

namespace {

inline vec4d profit_lane(vec4d lam, vec4d c_v, vec4d t_w, const ProfitRow& in) {
    using vm::c;
    const vec4d n = c(in.n);
    const vec4d t_d = c(in.t_d);
    const vec4d two = c(2.0);

    const vec4d b = n - two * lam * t_d;
    const vec4d cc = two * lam * c(in.phi_sqrt_area);
    const vec4d disc = c(4.0) * b * b * b - c(27.0) * cc * cc;
    const vec4d feasible = vand(cmp_gt(b, c(0.0)), cmp_ge(disc, c(0.0)));

    // guard b for the masked-out lanes so sqrt stays clean
    const vec4d b_safe = vmax(b, c(1e-300));
    const vec4d s = vsqrt(b_safe / c(3.0));
    vec4d arg = (c(0.0) - cc) / (two * s * s * s);
    arg = vmax(vmin(arg, c(0.0)), c(-1.0));
    vec4d u = two * s * vm::v_cos_quarter(vm::v_acos(arg) / c(3.0));
    const vec4d f = (u * u - b_safe) * u + cc;
    const vec4d fp = c(3.0) * u * u - b_safe;
    const vec4d do_newton = cmp_gt(vabs(fp), c(1e-8) * (c(3.0) * u * u + b_safe));
    u = blend(do_newton, u - f / fp, u);

    const vec4d t_p = c(in.phi_sqrt_area) / u;
    const vec4d service = t_p + t_d;
    const vec4d rho = two * lam * service / n;
    const vec4d t_r =
        vm::v_exp(c(in.sqrt_2n_2) * vm::v_log(vmax(rho, c(1e-300)))) /
        (two * lam * (c(1.0) - rho));

    const vec4d price =
        c_v - c(in.alpha) * (t_r + t_p) - c(in.beta) * (two * t_d + t_w);
    const vec4d pi = lam * (price - c(in.p_tax)) - c(in.labor_cost);
    const vec4d ok = vand(feasible, cmp_gt(price, c(0.0)));
    return blend(ok, pi, c(-std::numeric_limits<double>::infinity()));
}

}  // namespace

void profit_row_simd(const ProfitRow& in, double* profit) {
    std::size_t i = 0;
    for (; i + 4 <= in.count; i += 4) {
        const vec4d lam = vec4d::load(in.lambda + i);
        const vec4d cv = vec4d::load(in.c_v + i);
        const vec4d tw = vec4d::load(in.t_w + i);
        profit_lane(lam, cv, tw, in).store(profit + i);
    }
    if (i < in.count) {
        ProfitRow tail = in;
        tail.lambda += i;
        tail.c_v += i;
        tail.t_w += i;
        tail.count = in.count - i;
        profit_row_scalar(tail, profit + i);
    }
}

}  // namespace valet::kernels
