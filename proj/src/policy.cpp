#include "valet/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "valet/parallel.hpp"

namespace valet {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SweepRow solve_row(int k, double p_tax, const PolicyConfig& base,
                   const ModelParams& params, const GridSpec& grid) {
    PolicyConfig policy = base;
    policy.k = k;
    policy.p_tax = p_tax;
    SweepRow row;
    row.k = k;
    row.p_tax = p_tax;
    auto result = maximize_profit(policy, params, grid);
    row.status = result.status;
    if (result.status == SolveStatus::ok) {
        attach_marginals(*result.outcome, policy, params);
        row.outcome = std::move(result.outcome);
    }
    return row;
}

template <class Metric>
int argmax_k(const SweepTable& table, const Metric& metric) {
    int best_k = -1;
    double best = kNegInf;
    for (const auto& row : table.rows) {
        if (!row.feasible()) continue;
        const double v = metric(*row.outcome);
        if (v > best) {  // ties keep the earlier (smaller) K
            best = v;
            best_k = row.k;
        }
    }
    return best_k;
}

}  // namespace

PlanningResult sweep_k(int k_lo, int k_hi, const PolicyConfig& base,
                       const ModelParams& params, const GridSpec& grid, bool parallel) {
    if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("empty station range");
    PlanningResult result;
    result.table.swept_name = "k";
    result.table.rows.resize(k_hi - k_lo + 1);
    auto solve_one = [&](std::size_t i) {
        const int k = k_lo + static_cast<int>(i);
        result.table.rows[i] = solve_row(k, base.p_tax, base, params, grid);
        result.table.rows[i].swept = k;
    };
    if (parallel)
        parallel_for(result.table.rows.size(), solve_one);
    else
        for (std::size_t i = 0; i < result.table.rows.size(); ++i) solve_one(i);

    const bool any = std::any_of(result.table.rows.begin(), result.table.rows.end(),
                                 [](const SweepRow& r) { return r.feasible(); });
    if (!any) throw std::runtime_error("market infeasible at every station count");

    result.summary.k_star_n =
        argmax_k(result.table, [](const MarketOutcome& o) { return o.n; });
    result.summary.k_star_lambda =
        argmax_k(result.table, [](const MarketOutcome& o) { return o.lambda; });
    result.summary.k_star_profit =
        argmax_k(result.table, [](const MarketOutcome& o) { return o.profit; });
    result.summary.k_star_welfare =
        argmax_k(result.table, [](const MarketOutcome& o) { return o.social_welfare; });
    return result;
}

namespace {

// Demand-maximizing integer station count at one tax rate. Expands the
// window around the warm start until the argmax is interior (or pinned at
// K = 1), evaluating each K once.
struct KSearch {
    const PolicyConfig& base;
    const ModelParams& params;
    const GridSpec& grid;
    std::unordered_map<int, SweepRow> cache;

    const SweepRow& row_at(int k, double p_tax) {
        auto it = cache.find(k);
        if (it == cache.end())
            it = cache.emplace(k, solve_row(k, p_tax, base, params, grid)).first;
        return it->second;
    }
    double demand_at(int k, double p_tax) {
        const SweepRow& r = row_at(k, p_tax);
        return r.feasible() ? r.outcome->lambda : kNegInf;
    }

    // Returns the best K, or -1 when every K in the (expanded) window
    // failed. `wide` allows full expansion; pass false right after an
    // unviable rate so a run of unviable rates stays cheap.
    int run(double p_tax, int warm_start, bool wide = true) {
        cache.clear();
        int lo = std::max(1, warm_start - 4);
        int hi = warm_start + 4;
        const int k_cap = wide ? 4000 : warm_start + 16;
        for (int guard = 0; guard < 64; ++guard) {
            int best_k = -1;
            double best = kNegInf;
            for (int k = lo; k <= hi; ++k) {
                const double v = demand_at(k, p_tax);
                if (v > best) {
                    best = v;
                    best_k = k;
                }
            }
            if (best_k < 0) {
                if (lo == 1 && hi >= k_cap) return -1;
                lo = std::max(1, lo - (hi - lo));
                hi = std::min(hi * 2, k_cap);
                continue;
            }
            const bool lo_interior = best_k > lo || lo == 1;
            const bool hi_interior = best_k < hi;
            if (lo_interior && hi_interior) return best_k;
            if (!lo_interior) lo = std::max(1, lo - 8);
            if (!hi_interior) {
                if (hi >= k_cap) return wide ? throw std::runtime_error(
                                                   "station search exceeded cap")
                                             : -1;
                hi = std::min(hi + 8, k_cap);
            }
        }
        throw std::runtime_error("station search did not converge");
    }
};

}  // namespace

TaxResult stackelberg_tax(double pt_lo, double pt_hi, double pt_step,
                          const PolicyConfig& base, const ModelParams& params,
                          const GridSpec& grid) {
    if (!(pt_step > 0.0) || pt_hi < pt_lo) throw std::invalid_argument("bad tax grid");
    TaxResult result;
    result.table.swept_name = "p_t";

    KSearch search{base, params, grid, {}};
    int warm = std::max(base.k, 1);
    bool last_unviable = false;
    const int steps = static_cast<int>(std::floor((pt_hi - pt_lo) / pt_step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        const double p_t = pt_lo + i * pt_step;
        SweepRow row;
        row.swept = p_t;
        row.p_tax = p_t;
        const int k_star = search.run(p_t, warm, /*wide=*/!last_unviable);
        last_unviable = k_star <= 0;
        if (k_star > 0) {
            row = search.row_at(k_star, p_t);
            row.swept = p_t;
            warm = k_star;
            result.summary.k_star_of_pt[p_t] = k_star;
        } else {
            row.k = -1;
            row.status = SolveStatus::unviable;
        }
        result.table.rows.push_back(std::move(row));
    }

    const auto& rows = result.table.rows;
    auto by = [&](auto metric) {
        double best = kNegInf;
        const SweepRow* at = nullptr;
        for (const auto& r : rows) {
            if (!r.feasible()) continue;
            const double v = metric(*r.outcome);
            if (v > best) {
                best = v;
                at = &r;
            }
        }
        return at;
    };
    const SweepRow* star_l = by([](const MarketOutcome& o) { return o.lambda; });
    const SweepRow* star_w = by([](const MarketOutcome& o) { return o.social_welfare; });
    if (!star_l || !star_w || !rows.front().feasible())
        throw std::runtime_error("tax sweep produced no viable points");

    const MarketOutcome& at0 = *rows.front().outcome;
    const MarketOutcome& atl = *star_l->outcome;
    result.summary.p_star_lambda = star_l->p_tax;
    result.summary.p_star_welfare = star_w->p_tax;
    result.summary.lambda_at_zero = at0.lambda;
    result.summary.lambda_at_star = atl.lambda;
    result.summary.demand_gain_pct = 100.0 * (atl.lambda / at0.lambda - 1.0);
    result.summary.price_at_zero = at0.price;
    result.summary.price_at_star = atl.price;
    result.summary.profit_at_zero = at0.profit;
    result.summary.profit_at_star = atl.profit;
    result.summary.profit_decline_pct = 100.0 * (1.0 - atl.profit / at0.profit);
    result.summary.lerner_at_star = atl.lerner;
    result.summary.added_chargers = atl.lambda * star_l->p_tax / base.charger_cost;
    return result;
}

double find_r_threshold(const PolicyConfig& base, const ModelParams& params,
                        double pt_lo, double pt_hi, double pt_step, double r_lo,
                        double r_hi, double r_tol, const GridSpec& grid) {
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("bad r bracket");

    // Untaxed benchmark is independent of r.
    KSearch search0{base, params, grid, {}};
    const int k0 = search0.run(0.0, std::max(base.k, 1));
    if (k0 < 0) throw std::runtime_error("untaxed market is not viable");
    const SweepRow row0 = search0.row_at(k0, 0.0);
    if (!row0.feasible() || row0.outcome->profit < 0.0)
        throw std::runtime_error("threshold search requires nonnegative untaxed profit");
    const double lambda0 = row0.outcome->lambda;

    auto tax_raises_demand = [&](double r) {
        PolicyConfig policy = base;
        policy.charger_cost = r;
        KSearch search{policy, params, grid, {}};
        int warm = k0;
        bool last_unviable = false;
        const int steps = static_cast<int>(std::floor((pt_hi - pt_lo) / pt_step + 1e-9));
        for (int i = 0; i <= steps; ++i) {
            const double p_t = pt_lo + i * pt_step;
            if (p_t <= 0.0) continue;
            const int k_star = search.run(p_t, warm, /*wide=*/!last_unviable);
            last_unviable = k_star <= 0;
            if (k_star < 0) continue;
            warm = k_star;
            const SweepRow& row = search.row_at(k_star, p_t);
            if (row.feasible() && row.outcome->lambda > lambda0) return true;
        }
        return false;
    };

    bool pred_lo = tax_raises_demand(r_lo);
    bool pred_hi = tax_raises_demand(r_hi);
    if (!pred_lo || pred_hi)
        throw std::runtime_error("predicate does not change sign over the r bracket");
    double lo = r_lo, hi = r_hi;
    while (hi - lo > r_tol) {
        const double mid = 0.5 * (lo + hi);
        if (tax_raises_demand(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<SensitivityCell> sensitivity_batch(const std::vector<std::string>& names,
                                               const std::vector<double>& factors,
                                               int k_lo, int k_hi,
                                               const PolicyConfig& base,
                                               const ModelParams& params,
                                               const GridSpec& grid) {
    std::vector<SensitivityCell> cells;
    for (const auto& name : names) {
        ModelParams probe = params;
        param_by_name(probe, name);  // validates the name up front
        for (const double f : factors) {
            SensitivityCell cell;
            cell.param = name;
            cell.factor = f;
            cells.push_back(std::move(cell));
        }
    }
    parallel_for(cells.size(), [&](std::size_t i) {
        ModelParams perturbed = params;
        double& field = param_by_name(perturbed, cells[i].param);
        field *= cells[i].factor;
        cells[i].value = field;
        cells[i].planning =
            sweep_k(k_lo, k_hi, base, perturbed, grid, /*parallel=*/false);
    });
    return cells;
}

std::vector<OccupancyDerivative> occupancy_response(const SweepTable& tax_table,
                                                    const ModelParams& params) {
    std::vector<OccupancyDerivative> out;
    const auto& rows = tax_table.rows;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        const auto& c = rows[i + 1];
        if (!a.feasible() || !b.feasible() || !c.feasible()) continue;
        const double dp = c.p_tax - a.p_tax;
        OccupancyDerivative d;
        d.p_t = b.p_tax;
        d.d_rho_dpt = (c.outcome->queue.rho_c - a.outcome->queue.rho_c) / dp;
        const double dlam = (c.outcome->lambda - a.outcome->lambda) / dp;
        const double dm = (c.outcome->chargers - a.outcome->chargers) / dp;
        const double m = b.outcome->chargers;
        d.demand_term = params.t_charge / m * dlam;
        d.supply_term = -(b.outcome->lambda * params.t_charge / (m * m)) * dm;
        out.push_back(d);
    }
    return out;
}

}  // namespace valet
