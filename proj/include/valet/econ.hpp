#pragma once

#include "valet/params.hpp"
#include "valet/queueing.hpp"

namespace valet {

// Demand-side evaluation at a generalized valet cost c_v. Pass +infinity
// for the no-valet limit (P_vc = 0, c_ev = c_self, baseline penetration).
struct DemandPoint {
    double lambda = 0;  // valet demand, customers/hr
    double p_ev = 0;    // EV penetration
    double p_vc = 0;    // valet share among EV owners
    double c_ev = 0;    // composite EV charging cost
};

DemandPoint demand(double c_valet, const ModelParams& p);

// Unique c_v with demand(c_v).lambda == lambda, by monotone bracketing and
// Illinois iteration. Throws std::domain_error outside the achievable range.
double inverse_demand(double lambda, const ModelParams& p);

// Courier supply n0 * e^(eta*w) / (e^(eta*w0) + e^(eta*w)), overflow-safe.
double supply(double wage, const ModelParams& p);

// Closed-form inverse: w0 + (1/eta) * ln(n / (n0 - n)).
double inverse_supply(double n, const ModelParams& p);

// Generalized cost of a valet service: p_v + alpha*(t_r + t_p) + beta*(2*t_d + t_w).
// The charge duration itself is common to all charging options and drops out.
double valet_cost(double price, const QueueSolution& times, const ModelParams& p);

// tau*lambda0 * integral of F_v from c_valet to the demand-decay cutoff,
// adaptive quadrature at 1e-8 relative tolerance. 0 at c_valet = +infinity.
double customer_surplus(double c_valet, const ModelParams& p);

// n0 * integral of F_c from 0 to wage, evaluated in closed form:
// (n0/eta) * ln((e^(eta*w0) + e^(eta*w)) / (e^(eta*w0) + 1)).
double courier_surplus(double wage, const ModelParams& p);

}  // namespace valet
