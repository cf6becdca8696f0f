#include "valet/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "valet/kernels/profit_row.hpp"

namespace valet {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const char* to_string(InfeasibleReason r) {
    switch (r) {
        case InfeasibleReason::none: return "none";
        case InfeasibleReason::root_existence: return "root_existence";
        case InfeasibleReason::courier_capacity: return "courier_capacity";
        case InfeasibleReason::charger_capacity: return "charger_capacity";
        case InfeasibleReason::demand_range: return "demand_range";
        case InfeasibleReason::nonpositive_price: return "nonpositive_price";
    }
    return "?";
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::ok: return "ok";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unviable: return "unviable";
    }
    return "?";
}

MarketEval evaluate(double lambda, double n, const PolicyConfig& policy,
                    const ModelParams& params) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (!(n > 0.0) || !(n < params.n0))
        throw std::invalid_argument("n must lie in (0, n0)");

    const double m0 = policy.nominal_chargers(params);
    const double chargers = m0 + lambda * policy.p_tax / policy.charger_cost;

    MarketEval ev;
    if (lambda > 0.0 && !(lambda * params.t_charge < chargers)) {
        ev.reason = InfeasibleReason::charger_capacity;
        return ev;
    }

    const double t_d = delivery_time(policy.k, params);
    const auto roots = solve_idle_couriers(lambda, n, t_d, params);
    if (!roots) {
        ev.reason = InfeasibleReason::root_existence;
        return ev;
    }

    MarketOutcome o;
    o.lambda = lambda;
    o.n = n;
    o.chargers = chargers;
    o.queue.t_delivery = t_d;
    o.queue.n_idle = roots->larger;
    o.queue.t_pickup = pickup_time(roots->larger, params);
    o.queue.lambda_delivery = 2.0 * lambda;
    o.queue.lambda_station = lambda / policy.k;
    o.queue.servers_per_station = chargers / policy.k;
    o.queue.rho_d = o.queue.lambda_delivery * (o.queue.t_pickup + t_d) / n;
    o.queue.rho_c = lambda * params.t_charge / chargers;
    if (o.queue.rho_d >= 1.0) {
        ev.reason = InfeasibleReason::courier_capacity;
        return ev;
    }
    o.queue.t_response = response_time(lambda, n, o.queue.t_pickup, t_d);
    o.queue.t_wait = charging_wait(lambda, policy.k, chargers, params.t_charge);

    double c_v;
    if (lambda == 0.0) {
        c_v = std::numeric_limits<double>::infinity();
        o.price = 0.0;
    } else {
        if (!(lambda < params.tau * params.lambda0)) {
            ev.reason = InfeasibleReason::demand_range;
            return ev;
        }
        c_v = inverse_demand(lambda, params);
        o.price = c_v - params.alpha * (o.queue.t_response + o.queue.t_pickup) -
                  params.beta * (2.0 * t_d + o.queue.t_wait);
        if (!(o.price > 0.0)) {
            ev.reason = InfeasibleReason::nonpositive_price;
            return ev;
        }
    }

    o.wage = inverse_supply(n, params);
    o.profit = lambda * (o.price - policy.p_tax) - n * o.wage -
               policy.k * params.coordinator_cost;
    o.tax_paid = lambda * policy.p_tax;
    if (lambda > 0.0) {
        o.per_delivery_pay = o.wage * n / o.queue.lambda_delivery;
        o.per_time_pay = o.per_delivery_pay / (o.queue.t_pickup + o.queue.t_delivery);
    }
    o.customer_surplus = customer_surplus(c_v, params);
    o.courier_surplus = courier_surplus(std::max(o.wage, 0.0), params);
    o.social_welfare = o.profit + o.customer_surplus + o.courier_surplus;
    o.ev_penetration = demand(c_v, params).p_ev;
    o.lerner = kNaN;
    o.marginal_cost = kNaN;
    o.marginal_revenue = kNaN;

    ev.outcome = o;
    return ev;
}

namespace {

// Shared precomputation for one column set of the profit grid.
struct ColumnSet {
    std::vector<double> lambda, c_v, t_w;

    void build(const std::vector<double>& lams, const PolicyConfig& policy,
               const ModelParams& params, double m0) {
        lambda = lams;
        c_v.assign(lambda.size(), kNaN);
        t_w.assign(lambda.size(), kNaN);
        const double sup = params.tau * params.lambda0;
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            const double lam = lambda[i];
            if (!(lam > 0.0) || !(lam < sup)) continue;
            const double m = m0 + lam * policy.p_tax / policy.charger_cost;
            if (!(lam * params.t_charge < m)) continue;
            c_v[i] = inverse_demand(lam, params);
            t_w[i] = charging_wait(lam, policy.k, m, params.t_charge);
        }
    }
};

struct Best {
    double profit = kNegInf;
    double lambda = 0, n = 0;
    bool found = false;

    void consider(double pi, double lam, double nn) {
        if (!std::isfinite(pi)) return;
        if (!found || pi > profit ||
            (pi == profit && (lam < lambda || (lam == lambda && nn < n)))) {
            profit = pi;
            lambda = lam;
            n = nn;
            found = true;
        }
    }
};

// Scalar profit used for polish comparisons; matches the kernel math.
double profit_point(double lam, double n, const PolicyConfig& policy,
                    const ModelParams& params, double m0) {
    const double sup = params.tau * params.lambda0;
    if (!(lam > 0.0) || !(lam < sup) || !(n > 0.0) || !(n < params.n0)) return kNegInf;
    const double m = m0 + lam * policy.p_tax / policy.charger_cost;
    if (!(lam * params.t_charge < m)) return kNegInf;
    const double t_d = delivery_time(policy.k, params);
    const auto roots = solve_idle_couriers(lam, n, t_d, params);
    if (!roots) return kNegInf;
    const double t_p = pickup_time(roots->larger, params);
    const double t_r = response_time(lam, n, t_p, t_d);
    const double t_w = charging_wait(lam, policy.k, m, params.t_charge);
    const double price = inverse_demand(lam, params) - params.alpha * (t_r + t_p) -
                         params.beta * (2.0 * t_d + t_w);
    if (!(price > 0.0)) return kNegInf;
    return lam * (price - policy.p_tax) - n * inverse_supply(n, params) -
           policy.k * params.coordinator_cost;
}

void scan_grid(const ColumnSet& cols, const std::vector<double>& rows,
               const PolicyConfig& policy, const ModelParams& params, Best& best) {
    const auto kernel = kernels::active_profit_row();
    std::vector<double> profit(cols.lambda.size());
    kernels::ProfitRow row;
    row.lambda = cols.lambda.data();
    row.c_v = cols.c_v.data();
    row.t_w = cols.t_w.data();
    row.count = cols.lambda.size();
    row.t_d = delivery_time(policy.k, params);
    row.phi_sqrt_area = params.phi * std::sqrt(params.area);
    row.alpha = params.alpha;
    row.beta = params.beta;
    row.p_tax = policy.p_tax;
    for (const double n : rows) {
        if (!(n > 0.0) || !(n < params.n0)) continue;
        row.n = n;
        row.sqrt_2n_2 = std::sqrt(2.0 * n + 2.0);
        row.labor_cost = n * inverse_supply(n, params) +
                         policy.k * params.coordinator_cost;
        kernel(row, profit.data());
        for (std::size_t i = 0; i < profit.size(); ++i)
            best.consider(profit[i], cols.lambda[i], n);
    }
}

std::vector<double> linspace_centered(double center, double half_width, int points,
                                      double lo_open, double hi) {
    std::vector<double> v;
    v.reserve(points);
    const double step = 2.0 * half_width / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = center - half_width + i * step;
        if (x > lo_open && x <= hi) v.push_back(x);
    }
    return v;
}

}  // namespace

SolveResult maximize_profit(const PolicyConfig& policy, const ModelParams& params,
                            const GridSpec& grid) {
    validate(params);
    validate(policy);
    const double m0 = policy.nominal_chargers(params);

    // Demand can never exceed the zero-cost level, and the charging network
    // must keep up: lambda * t_c < m0 + lambda * p_tax / r.
    const double demand_cap = demand(0.0, params).lambda;
    double capacity_cap = std::numeric_limits<double>::infinity();
    const double drain = params.t_charge - policy.p_tax / policy.charger_cost;
    if (drain > 0.0) capacity_cap = 0.999 * m0 / drain;
    const double lambda_hi = std::min(demand_cap, capacity_cap);
    const double n_hi = params.n0;

    Best best;
    double cell_l = lambda_hi / grid.lambda_points;
    double cell_n = n_hi / grid.n_points;

    {
        std::vector<double> lams(grid.lambda_points), rows(grid.n_points);
        for (int i = 0; i < grid.lambda_points; ++i) lams[i] = (i + 0.5) * cell_l;
        for (int j = 0; j < grid.n_points; ++j) rows[j] = (j + 0.5) * cell_n;
        ColumnSet cols;
        cols.build(lams, policy, params, m0);
        scan_grid(cols, rows, policy, params, best);
    }
    if (!best.found) return {SolveStatus::infeasible, std::nullopt};

    for (int stage = 0; stage < grid.refine_stages; ++stage) {
        const auto lams =
            linspace_centered(best.lambda, cell_l, grid.refine_points, 0.0, lambda_hi);
        const auto rows =
            linspace_centered(best.n, cell_n, grid.refine_points, 0.0, n_hi * (1 - 1e-12));
        ColumnSet cols;
        cols.build(lams, policy, params, m0);
        scan_grid(cols, rows, policy, params, best);
        cell_l /= (grid.refine_points - 1) / 2.0;
        cell_n /= (grid.refine_points - 1) / 2.0;
    }

    // Quadratic-vertex candidate from the last cell, kept only if better.
    {
        auto pf = [&](double l, double n) { return profit_point(l, n, policy, params, m0); };
        const double f0 = pf(best.lambda, best.n);
        double cand_l = best.lambda, cand_n = best.n;
        const double fl = pf(best.lambda - cell_l, best.n);
        const double fr = pf(best.lambda + cell_l, best.n);
        if (std::isfinite(fl) && std::isfinite(fr)) {
            const double denom = fl - 2.0 * f0 + fr;
            if (denom < 0.0) cand_l = best.lambda + 0.5 * cell_l * (fl - fr) / denom;
        }
        const double fd = pf(best.lambda, best.n - cell_n);
        const double fu = pf(best.lambda, best.n + cell_n);
        if (std::isfinite(fd) && std::isfinite(fu)) {
            const double denom = fd - 2.0 * f0 + fu;
            if (denom < 0.0) cand_n = best.n + 0.5 * cell_n * (fd - fu) / denom;
        }
        if (cand_l != best.lambda || cand_n != best.n) {
            const double fc = pf(cand_l, cand_n);
            if (fc > f0) best.consider(fc, cand_l, cand_n);
        }
    }

    auto ev = evaluate(best.lambda, best.n, policy, params);
    if (!ev.feasible()) return {SolveStatus::infeasible, std::nullopt};
    if (policy.p_tax > 0.0 && ev.outcome->profit < 0.0)
        return {SolveStatus::unviable, std::nullopt};
    return {SolveStatus::ok, ev.outcome};
}

namespace {

// Times as functions of the decision pair, larger root throughout.
struct TimeMaps {
    const PolicyConfig& policy;
    const ModelParams& params;
    double m0;
    double t_d;

    double t_p(double lam, double n) const {
        const auto roots = solve_idle_couriers(lam, n, t_d, params);
        if (!roots) throw std::domain_error("infeasible point in derivative stencil");
        return pickup_time(roots->larger, params);
    }
    double t_r(double lam, double n) const {
        return response_time(lam, n, t_p(lam, n), t_d);
    }
    double t_w_total(double lam) const {
        const double m = m0 + lam * policy.p_tax / policy.charger_cost;
        return charging_wait(lam, policy.k, m, params.t_charge);
    }
    double marginal_labor(double n) const {
        const double w = inverse_supply(n, params);
        const double wp = params.n0 / (params.eta * n * (params.n0 - n));
        return w + n * wp;
    }
    // first-order condition in n at fixed lambda
    double foc_n(double lam, double n) const {
        const double h = std::max(1e-3 * n, 1e-3);
        const double dtp = (t_p(lam, n + h) - t_p(lam, n - h)) / (2.0 * h);
        const double dtr = (t_r(lam, n + h) - t_r(lam, n - h)) / (2.0 * h);
        return -params.alpha * lam * (dtr + dtp) - marginal_labor(n);
    }
    // solve foc_n(lam, n) = 0 near n0_guess
    std::optional<double> locus_n(double lam, double n_guess) const {
        double lo = n_guess, hi = n_guess;
        double flo = foc_n(lam, lo), fhi = flo;
        for (int i = 0; i < 60 && flo * fhi > 0.0; ++i) {
            lo = std::max(lo * 0.98, 1e-6);
            hi = std::min(hi * 1.02, params.n0 * (1 - 1e-9));
            flo = foc_n(lam, lo);
            fhi = foc_n(lam, hi);
        }
        if (flo * fhi > 0.0) return std::nullopt;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = foc_n(lam, mid);
            if (fm == 0.0) return mid;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-10 * std::max(1.0, mid)) return 0.5 * (lo + hi);
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

Marginals marginals(const MarketOutcome& at, const PolicyConfig& policy,
                    const ModelParams& params) {
    Marginals mg;
    TimeMaps maps{policy, params, policy.nominal_chargers(params),
                  delivery_time(policy.k, params)};
    const double lam = at.lambda, n = at.n;
    if (!(lam > 0.0)) return mg;

    try {
        const double hl = std::max(1e-3 * lam, 1e-3);
        const auto n_plus = maps.locus_n(lam + hl, n);
        const auto n_minus = maps.locus_n(lam - hl, n);
        if (!n_plus || !n_minus) return mg;
        mg.dn_dlambda = (*n_plus - *n_minus) / (2.0 * hl);

        mg.marginal_cost = maps.marginal_labor(n) * mg.dn_dlambda + policy.p_tax;

        // marginal revenue along the optimality locus
        const double c_v = inverse_demand(lam, params);
        const double dcv =
            (inverse_demand(lam + hl, params) - inverse_demand(lam - hl, params)) /
            (2.0 * hl);
        const double hn = std::max(1e-3 * n, 1e-3);
        const double dtp_dl =
            (maps.t_p(lam + hl, n) - maps.t_p(lam - hl, n)) / (2.0 * hl);
        const double dtr_dl =
            (maps.t_r(lam + hl, n) - maps.t_r(lam - hl, n)) / (2.0 * hl);
        const double dtp_dn = (maps.t_p(lam, n + hn) - maps.t_p(lam, n - hn)) / (2.0 * hn);
        const double dtr_dn = (maps.t_r(lam, n + hn) - maps.t_r(lam, n - hn)) / (2.0 * hn);
        const double dtw_dl =
            (maps.t_w_total(lam + hl) - maps.t_w_total(lam - hl)) / (2.0 * hl);
        const double t_p = maps.t_p(lam, n);
        const double t_r = maps.t_r(lam, n);
        const double t_w = maps.t_w_total(lam);
        mg.marginal_revenue =
            c_v - params.alpha * (t_r + t_p) - params.beta * (2.0 * maps.t_d + t_w) +
            lam * (dcv -
                   params.alpha *
                       (dtr_dl + dtr_dn * mg.dn_dlambda + dtp_dl + dtp_dn * mg.dn_dlambda) -
                   params.beta * dtw_dl);

        mg.lerner = (at.price - mg.marginal_cost) / at.price;

        // reliable only at an interior optimum: the point must sit on the
        // locus and clear of the capacity and root-existence boundaries
        const double foc_res = std::abs(maps.foc_n(lam, n)) / maps.marginal_labor(n);
        const double b = n - 2.0 * lam * maps.t_d;
        const double c = 2.0 * lam * params.phi * std::sqrt(params.area);
        const double disc_margin = 4.0 * b * b * b - 27.0 * c * c;
        const double cap_margin = at.chargers - lam * params.t_charge;
        mg.reliable = foc_res < 0.05 && disc_margin > 1e-6 * 4.0 * b * b * b &&
                      cap_margin > 1e-3 * at.chargers;
    } catch (const std::exception&) {
        mg.reliable = false;
    }
    return mg;
}

void attach_marginals(MarketOutcome& at, const PolicyConfig& policy,
                      const ModelParams& params) {
    const Marginals mg = marginals(at, policy, params);
    at.marginal_cost = mg.marginal_cost;
    at.marginal_revenue = mg.marginal_revenue;
    at.lerner = mg.lerner;
    at.marginals_reliable = mg.reliable;
}

}  // namespace valet
