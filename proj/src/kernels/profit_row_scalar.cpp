#include "valet/kernels/profit_row.hpp"

#include <cmath>
#include <limits>

namespace valet::kernels {

// Reference kernel. The SIMD variant mirrors this operation-for-operation;
// keep the two in sync (the equivalence suite compares them).
void profit_row_scalar(const ProfitRow& in, double* profit) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < in.count; ++i) {
        const double lam = in.lambda[i];

        // idle-courier cubic u^3 - b*u + c = 0, u = sqrt(N_i)
        const double b = in.n - 2.0 * lam * in.t_d;
        const double cc = 2.0 * lam * in.phi_sqrt_area;
        const double disc = 4.0 * b * b * b - 27.0 * cc * cc;
        if (!(b > 0.0) || !(disc >= 0.0)) {
            profit[i] = neg_inf;
            continue;
        }
        const double s = std::sqrt(b / 3.0);
        double arg = -cc / (2.0 * s * s * s);
        arg = std::max(std::min(arg, 0.0), -1.0);
        double u = 2.0 * s * std::cos(std::acos(arg) / 3.0);
        const double f = (u * u - b) * u + cc;
        const double fp = 3.0 * u * u - b;
        if (std::abs(fp) > 1e-8 * (3.0 * u * u + b)) u -= f / fp;

        const double t_p = in.phi_sqrt_area / u;
        const double service = t_p + in.t_d;
        const double rho = 2.0 * lam * service / in.n;
        const double t_r =
            std::exp(in.sqrt_2n_2 * std::log(rho)) / (2.0 * lam * (1.0 - rho));

        const double price = in.c_v[i] - in.alpha * (t_r + t_p) -
                             in.beta * (2.0 * in.t_d + in.t_w[i]);
        const double pi = lam * (price - in.p_tax) - in.labor_cost;
        profit[i] = (price > 0.0) ? pi : neg_inf;
    }
}

}  // namespace valet::kernels
