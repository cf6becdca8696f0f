#pragma once

#include <optional>
#include <string>

#include "valet/econ.hpp"
#include "valet/params.hpp"
#include "valet/queueing.hpp"

namespace valet {

enum class InfeasibleReason {
    none,
    root_existence,     // idle-courier cubic has no positive root
    courier_capacity,   // rho_d >= 1
    charger_capacity,   // lambda * t_charge >= chargers
    demand_range,       // lambda not achievable by any finite cost
    nonpositive_price,  // required price would be <= 0
};
const char* to_string(InfeasibleReason r);

// Full equilibrium record for one decision point under one policy.
struct MarketOutcome {
    double lambda = 0;
    double n = 0;
    QueueSolution queue;
    double price = 0;             // p_v, HK$/service
    double wage = 0;              // w, HK$/hr
    double per_time_pay = 0;      // pi, HK$/hr
    double per_delivery_pay = 0;  // p_c, HK$/delivery
    double profit = 0;            // HK$/hr
    double customer_surplus = 0;
    double courier_surplus = 0;
    double social_welfare = 0;
    double ev_penetration = 0;
    double lerner = 0;            // filled by attach_marginals
    double marginal_cost = 0;     // filled by attach_marginals
    double marginal_revenue = 0;  // filled by attach_marginals
    double tax_paid = 0;          // lambda * p_tax
    double chargers = 0;          // effective M
    bool marginals_reliable = false;
};

struct MarketEval {
    std::optional<MarketOutcome> outcome;
    InfeasibleReason reason = InfeasibleReason::none;
    bool feasible() const { return outcome.has_value(); }
};

// Evaluate the market at decision pair (lambda, n). Chargers grow with the
// collected tax: M = M0 + lambda * p_tax / r. The normal-regime
// (larger) idle-courier root is always selected.
MarketEval evaluate(double lambda, double n, const PolicyConfig& policy,
                    const ModelParams& params);

struct GridSpec {
    int lambda_points = 200;  // coarse columns
    int n_points = 200;       // coarse rows
    int refine_stages = 2;    // each stage shrinks the cell 10x
    int refine_points = 21;   // points per dimension and stage
};

enum class SolveStatus { ok, infeasible, unviable };
const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<MarketOutcome> outcome;
};

// Certified grid search over (lambda, n): coarse grid, staged local
// refinement, and a final quadratic-vertex candidate kept only when it
// improves. Ties break to the lowest lambda, then lowest n. With a
// positive tax the profitability constraint applies: a best point with
// negative profit yields `unviable`.
SolveResult maximize_profit(const PolicyConfig& policy, const ModelParams& params,
                            const GridSpec& grid = {});

// Marginal cost/revenue at an interior optimum, via the implicit
// first-order locus N(lambda) differentiated by central differences.
struct Marginals {
    double marginal_cost = 0;
    double marginal_revenue = 0;
    double lerner = 0;
    double dn_dlambda = 0;
    bool reliable = false;
};
Marginals marginals(const MarketOutcome& at, const PolicyConfig& policy,
                    const ModelParams& params);
void attach_marginals(MarketOutcome& at, const PolicyConfig& policy,
                      const ModelParams& params);

}  // namespace valet
