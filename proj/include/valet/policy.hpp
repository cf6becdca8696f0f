#pragma once

#include <map>
#include <string>
#include <vector>

#include "valet/market.hpp"

namespace valet {

// One policy point of a sweep. `outcome` is present only for feasible,
// viable points; `status` says why it is absent otherwise.
struct SweepRow {
    double swept = 0;  // the swept variable (K or p_t)
    int k = 0;
    double p_tax = 0;
    SolveStatus status = SolveStatus::infeasible;
    std::optional<MarketOutcome> outcome;
    bool feasible() const { return outcome.has_value(); }
};

struct SweepTable {
    std::string swept_name;  // "k" or "p_t"
    std::vector<SweepRow> rows;
};

struct PlanningSummary {
    int k_star_n = 0;        // argmax courier supply
    int k_star_lambda = 0;   // argmax demand
    int k_star_profit = 0;   // argmax platform profit
    int k_star_welfare = 0;  // argmax social welfare
};

struct PlanningResult {
    SweepTable table;
    PlanningSummary summary;
};

// Profit-maximization at every integer K in [k_lo, k_hi]; argmax ties break
// to the smallest K. Throws std::runtime_error when no K is feasible.
PlanningResult sweep_k(int k_lo, int k_hi, const PolicyConfig& base,
                       const ModelParams& params, const GridSpec& grid = {},
                       bool parallel = true);

struct TaxSummary {
    double p_star_lambda = 0;   // tax maximizing demand
    double p_star_welfare = 0;  // tax maximizing social welfare
    double lambda_at_zero = 0;
    double lambda_at_star = 0;
    double demand_gain_pct = 0;
    double price_at_zero = 0;
    double price_at_star = 0;
    double profit_at_zero = 0;
    double profit_at_star = 0;
    double profit_decline_pct = 0;
    double lerner_at_star = 0;
    double added_chargers = 0;  // lambda* p*_t / r
    std::map<double, int> k_star_of_pt;
};

struct TaxResult {
    SweepTable table;
    TaxSummary summary;
};

// Stackelberg sweep: for each tax rate the inner loop finds the integer
// station count K*(p_t) maximizing demand (window expanded until the argmax
// is interior), warm-started from the previous rate. Unviable rates are
// flagged rows, not fatal.
TaxResult stackelberg_tax(double pt_lo, double pt_hi, double pt_step,
                          const PolicyConfig& base, const ModelParams& params,
                          const GridSpec& grid = {});

// Threshold charger cost r-hat: below it some tax rate strictly raises the
// maximal demand, above it none does. Bisection on r over that predicate.
double find_r_threshold(const PolicyConfig& base, const ModelParams& params,
                        double pt_lo, double pt_hi, double pt_step, double r_lo,
                        double r_hi, double r_tol = 0.25, const GridSpec& grid = {});

struct SensitivityCell {
    std::string param;
    double factor = 1;
    double value = 0;
    PlanningResult planning;
};

// Re-runs the K sweep for each (parameter, scale factor) pair.
std::vector<SensitivityCell> sensitivity_batch(const std::vector<std::string>& names,
                                               const std::vector<double>& factors,
                                               int k_lo, int k_hi,
                                               const PolicyConfig& base,
                                               const ModelParams& params,
                                               const GridSpec& grid = {});

// d(rho_c)/d(p_t) along a tax sweep by central differences at the interior
// points, with the product-rule split into a demand and a charger-supply
// component.
struct OccupancyDerivative {
    double p_t = 0;
    double d_rho_dpt = 0;      // central finite difference of rho_c
    double demand_term = 0;    // (t_c / M) * d(lambda)/d(p_t)
    double supply_term = 0;    // -(lambda * t_c / M^2) * dM/d(p_t)
};
std::vector<OccupancyDerivative> occupancy_response(const SweepTable& tax_table,
                                                    const ModelParams& params);

}  // namespace valet
