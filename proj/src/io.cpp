#include "valet/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace valet {

const char* const kSweepCsvHeader =
    "swept,lambda,n,price,wage,profit,customer_surplus,courier_surplus,"
    "social_welfare,ev_penetration,lerner,marginal_cost,t_r_min,t_p_min,"
    "t_d_min,t_w_min,rho_d,rho_c,feasible";

namespace {

void append_number(std::ostringstream& os, double v) {
    if (std::isnan(v)) {
        os << "";
        return;
    }
    os.precision(12);
    os << v;
}

}  // namespace

std::string sweep_csv(const SweepTable& table) {
    std::ostringstream os;
    std::string header = kSweepCsvHeader;
    header.replace(0, 5, table.swept_name);  // "swept" -> actual variable name
    os << header << "\n";
    for (const auto& row : table.rows) {
        std::ostringstream line;
        append_number(line, row.swept);
        line << ",";
        if (row.feasible()) {
            const MarketOutcome& o = *row.outcome;
            const double cols[] = {o.lambda,
                                   o.n,
                                   o.price,
                                   o.wage,
                                   o.profit,
                                   o.customer_surplus,
                                   o.courier_surplus,
                                   o.social_welfare,
                                   o.ev_penetration,
                                   o.lerner,
                                   o.marginal_cost,
                                   o.queue.t_response * 60.0,
                                   o.queue.t_pickup * 60.0,
                                   o.queue.t_delivery * 60.0,
                                   o.queue.t_wait * 60.0,
                                   o.queue.rho_d,
                                   o.queue.rho_c};
            for (double c : cols) {
                append_number(line, c);
                line << ",";
            }
            line << 1;
        } else {
            for (int i = 0; i < 17; ++i) line << ",";
            line << 0;
        }
        os << line.str() << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

namespace {

double json_num(double v) { return std::isnan(v) ? 0.0 : v; }

}  // namespace

ordered_json to_json(const QueueSolution& q) {
    return ordered_json{{"n_idle", q.n_idle},
                        {"t_response_hr", q.t_response},
                        {"t_pickup_hr", q.t_pickup},
                        {"t_delivery_hr", q.t_delivery},
                        {"t_wait_hr", q.t_wait},
                        {"rho_d", q.rho_d},
                        {"rho_c", q.rho_c},
                        {"servers_per_station", q.servers_per_station},
                        {"lambda_delivery", q.lambda_delivery},
                        {"lambda_station", q.lambda_station}};
}

ordered_json to_json(const MarketOutcome& o) {
    ordered_json j{{"lambda", o.lambda},
                   {"n", o.n},
                   {"price", o.price},
                   {"wage", o.wage},
                   {"per_time_pay", o.per_time_pay},
                   {"per_delivery_pay", o.per_delivery_pay},
                   {"profit", o.profit},
                   {"customer_surplus", o.customer_surplus},
                   {"courier_surplus", o.courier_surplus},
                   {"social_welfare", o.social_welfare},
                   {"ev_penetration", o.ev_penetration},
                   {"tax_paid", o.tax_paid},
                   {"chargers", o.chargers},
                   {"queue", to_json(o.queue)}};
    if (!std::isnan(o.lerner)) {
        j["lerner"] = o.lerner;
        j["marginal_cost"] = o.marginal_cost;
        j["marginal_revenue"] = o.marginal_revenue;
        j["marginals_reliable"] = o.marginals_reliable;
    }
    return j;
}

ordered_json to_json(const SweepRow& row, const std::string& swept_name) {
    ordered_json j{{swept_name, row.swept},
                   {"k", row.k},
                   {"p_tax", row.p_tax},
                   {"status", to_string(row.status)}};
    if (row.feasible()) j["outcome"] = to_json(*row.outcome);
    return j;
}

ordered_json to_json(const PlanningSummary& s) {
    return ordered_json{{"k_star_n", s.k_star_n},
                        {"k_star_lambda", s.k_star_lambda},
                        {"k_star_profit", s.k_star_profit},
                        {"k_star_welfare", s.k_star_welfare}};
}

ordered_json to_json(const TaxSummary& s) {
    ordered_json ks = ordered_json::array();
    for (const auto& [pt, k] : s.k_star_of_pt)
        ks.push_back(ordered_json{{"p_t", pt}, {"k_star", k}});
    return ordered_json{{"p_star_lambda", s.p_star_lambda},
                        {"p_star_welfare", s.p_star_welfare},
                        {"lambda_at_zero", s.lambda_at_zero},
                        {"lambda_at_star", s.lambda_at_star},
                        {"demand_gain_pct", s.demand_gain_pct},
                        {"price_at_zero", s.price_at_zero},
                        {"price_at_star", s.price_at_star},
                        {"profit_at_zero", s.profit_at_zero},
                        {"profit_at_star", s.profit_at_star},
                        {"profit_decline_pct", s.profit_decline_pct},
                        {"lerner_at_star", json_num(s.lerner_at_star)},
                        {"added_chargers", s.added_chargers},
                        {"k_star_of_pt", ks}};
}

ordered_json to_json(const SimResult& r) {
    return ordered_json{{"mean", r.mean},
                        {"ci_halfwidth", r.ci_halfwidth},
                        {"replications", r.replication_means.size()}};
}

ordered_json to_json(const ThetaCalibration& c) {
    return ordered_json{{"theta", c.theta},
                        {"intercept", c.intercept},
                        {"r_squared", c.r_squared},
                        {"slope_stderr", c.slope_stderr},
                        {"seed", c.seed},
                        {"points", c.samples.size()}};
}

ordered_json to_json(const RunManifest& m) {
    ordered_json params;
    ModelParams p = m.params;
    for (const auto& [name, value] : param_table(p)) params[name] = value;
    ordered_json policy{{"k", m.policy.k},
                        {"p_tax", m.policy.p_tax},
                        {"charger_cost", m.policy.charger_cost}};
    if (m.policy.budget) policy["budget"] = *m.policy.budget;
    if (m.policy.gamma) policy["gamma"] = *m.policy.gamma;
    ordered_json j{{"tool", "valet"},
                   {"version", "0.1.0"},
                   {"subcommand", m.subcommand},
                   {"params", params},
                   {"policy", policy},
                   {"grid",
                    ordered_json{{"lambda_points", m.grid.lambda_points},
                                 {"n_points", m.grid.n_points},
                                 {"refine_stages", m.grid.refine_stages},
                                 {"refine_points", m.grid.refine_points}}},
                   {"seed", m.seed},
                   {"duration_seconds", m.duration_seconds}};
    if (!m.extra.empty()) j["settings"] = ordered_json::parse(m.extra);
    return j;
}

void write_manifest(const RunManifest& m, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / "manifest.json").string(),
               to_json(m).dump(2) + "\n");
}

}  // namespace valet
