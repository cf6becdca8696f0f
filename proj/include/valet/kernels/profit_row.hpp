#pragma once

#include <cstddef>

namespace valet::kernels {

// One grid row of the platform objective: profit at a fixed courier count
// over a batch of demand values. Per-lambda inputs that are expensive to
// derive (inverse demand, charging wait) are precomputed once per column
// and shared across rows; NaN in c_v or t_w marks an infeasible column.
//
// Output is the profit, or -infinity where the point is infeasible
// (idle-courier roots absent, or nonpositive price).
struct ProfitRow {
    const double* lambda = nullptr;  // demand values, all > 0
    const double* c_v = nullptr;     // inverse demand per lambda
    const double* t_w = nullptr;     // charging wait per lambda
    std::size_t count = 0;
    double n = 0;              // courier count
    double labor_cost = 0;     // n * w(n) + k * coordinator_cost
    double t_d = 0;            // delivery time at this station count
    double sqrt_2n_2 = 0;      // sqrt(2n + 2)
    double phi_sqrt_area = 0;  // phi * sqrt(area)
    double alpha = 0;
    double beta = 0;
    double p_tax = 0;
};

void profit_row_scalar(const ProfitRow& row, double* profit);
void profit_row_simd(const ProfitRow& row, double* profit);

using profit_row_fn = void (*)(const ProfitRow&, double*);

// Runtime selection: the SIMD kernel when the host supports it, otherwise
// the scalar reference.
profit_row_fn active_profit_row();
const char* active_profit_row_name();

}  // namespace valet::kernels
