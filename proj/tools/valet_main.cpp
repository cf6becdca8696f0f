// Command-line front end: loads a config, dispatches one subcommand, and
// writes CSV/JSON artifacts plus a run manifest when --out is given.
//
// Exit codes: 0 success, 1 usage/config error, 2 infeasible or unviable
// market outcome.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "valet/calibrate.hpp"
#include "valet/desim.hpp"
#include "valet/io.hpp"
#include "valet/kernels/profit_row.hpp"
#include "valet/market.hpp"
#include "valet/policy.hpp"

namespace {

using valet::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

struct IntRange {
    int lo = 0, hi = 0;
};
struct StepRange {
    double lo = 0, hi = 0, step = 0;
};

IntRange parse_int_range(const std::string& s) {
    IntRange r;
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        r.lo = r.hi = std::stoi(s);
        return r;
    }
    r.lo = std::stoi(s.substr(0, colon));
    r.hi = std::stoi(s.substr(colon + 1));
    if (r.hi < r.lo) throw CLI::ValidationError("range must be lo:hi");
    return r;
}

StepRange parse_step_range(const std::string& s, double default_step) {
    StepRange r;
    std::istringstream in(s);
    std::string part;
    std::vector<double> parts;
    while (std::getline(in, part, ':')) parts.push_back(std::stod(part));
    if (parts.size() == 1) {
        r.lo = r.hi = parts[0];
        r.step = default_step;
    } else if (parts.size() == 2) {
        r.lo = parts[0];
        r.hi = parts[1];
        r.step = default_step;
    } else if (parts.size() == 3) {
        r.lo = parts[0];
        r.hi = parts[1];
        r.step = parts[2];
    } else {
        throw CLI::ValidationError("range must be lo:hi[:step]");
    }
    if (r.hi < r.lo || r.step <= 0) throw CLI::ValidationError("bad range " + s);
    return r;
}

struct CommonOpts {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;

    valet::ModelParams resolve() const {
        valet::ModelParams p =
            config.empty() ? valet::ModelParams{} : valet::load_params(config);
        for (const auto& ov : overrides) valet::apply_override(p, ov);
        return valet::validate(p);
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config, "flat key = value parameter file");
    cmd->add_option("--set", opts.overrides,
                    "override a parameter, e.g. --set alpha=60 (repeatable)");
    cmd->add_option("--out", opts.out, "output directory for CSV/JSON artifacts");
}

void emit(const CommonOpts& opts, valet::RunManifest manifest,
          const std::vector<std::pair<std::string, std::string>>& files,
          const ordered_json& stdout_json,
          std::chrono::steady_clock::time_point started) {
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!opts.out.empty()) {
        std::filesystem::create_directories(opts.out);
        for (const auto& [name, content] : files)
            valet::write_file((std::filesystem::path(opts.out) / name).string(), content);
        valet::write_manifest(manifest, opts.out);
    }
    std::cout << stdout_json.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"valet: market equilibria of on-demand valet EV charging"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "valet 0.1.0");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "profit-maximizing outcome at one K");
    CommonOpts solve_opts;
    int solve_k = 57;
    double solve_tax = 0.0, solve_r = 25.0;
    std::string solve_grid;
    add_common(solve, solve_opts);
    solve->add_option("--k", solve_k, "station count")->required();
    solve->add_option("--tax", solve_tax, "per-service tax p_t");
    solve->add_option("--r", solve_r, "per-charger cost r");
    solve->add_option("--grid", solve_grid, "coarse grid as LxN, e.g. 200x200");

    // ---- queue-eval ----
    auto* qe = app.add_subcommand("queue-eval", "steady-state times for (lambda, N, K, M)");
    CommonOpts qe_opts;
    double qe_lambda = 0, qe_n = 0, qe_m = 3000;
    int qe_k = 1;
    add_common(qe, qe_opts);
    qe->add_option("--lambda", qe_lambda)->required();
    qe->add_option("--n", qe_n)->required();
    qe->add_option("--k", qe_k)->required();
    qe->add_option("--m", qe_m, "charger supply (default m0)");

    // ---- sweep-k ----
    auto* sk = app.add_subcommand("sweep-k", "trace outcomes over a station-count range");
    CommonOpts sk_opts;
    std::string sk_range = "20:120";
    double sk_tax = 0.0, sk_r = 25.0;
    add_common(sk, sk_opts);
    sk->add_option("--k", sk_range, "station range lo:hi")->required();
    sk->add_option("--tax", sk_tax, "per-service tax p_t");
    sk->add_option("--r", sk_r, "per-charger cost r");

    // ---- sweep-tax ----
    auto* st = app.add_subcommand("sweep-tax", "Stackelberg taxation sweep");
    CommonOpts st_opts;
    std::string st_range = "0:25:0.2";
    double st_r = 25.0;
    int st_warm = 57;
    add_common(st, st_opts);
    st->add_option("--pt", st_range, "tax grid lo:hi[:step]");
    st->add_option("--r", st_r, "per-charger cost r");
    st->add_option("--k0", st_warm, "starting station count for the inner search");

    // ---- find-rhat ----
    auto* fr = app.add_subcommand("find-rhat", "threshold charger cost r-hat");
    CommonOpts fr_opts;
    std::string fr_pt = "0:25:0.2";
    double fr_lo = 12.5, fr_hi = 62.5, fr_tol = 0.25;
    int fr_warm = 57;
    add_common(fr, fr_opts);
    fr->add_option("--pt", fr_pt, "tax grid lo:hi[:step]");
    fr->add_option("--r-lo", fr_lo, "bracket lower end");
    fr->add_option("--r-hi", fr_hi, "bracket upper end");
    fr->add_option("--tol", fr_tol, "bisection tolerance on r");
    fr->add_option("--k0", fr_warm, "starting station count for the inner search");

    // ---- sensitivity ----
    auto* se = app.add_subcommand("sensitivity", "perturb parameters and re-sweep K");
    CommonOpts se_opts;
    std::vector<std::string> se_params = {"lambda0", "n0", "m0", "coordinator_cost",
                                          "t_charge", "alpha", "beta", "theta",
                                          "phi", "eps1", "eps2", "eta"};
    std::vector<double> se_factors = {0.5, 0.75, 1.0, 1.25, 1.5};
    std::string se_range = "20:120";
    double se_r = 25.0;
    add_common(se, se_opts);
    se->add_option("--params", se_params, "parameter names to perturb");
    se->add_option("--factors", se_factors, "scale factors");
    se->add_option("--k", se_range, "station range lo:hi");
    se->add_option("--r", se_r, "per-charger cost r");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "discrete-event oracle runs");
    CommonOpts sim_opts;
    std::string sim_mode = "network";
    double sim_arrival = 1.0, sim_service = 1.0, sim_lambda = 485.5, sim_n = 511, sim_m = 3000;
    int sim_servers = 2, sim_k = 40, sim_reps = 30;
    long sim_horizon = 40000, sim_warmup = -1;
    std::uint64_t sim_seed = 1;
    add_common(sim, sim_opts);
    sim->add_option("--mode", sim_mode, "mmn | network")
        ->check(CLI::IsMember({"mmn", "network"}));
    sim->add_option("--arrival", sim_arrival, "mmn arrival rate");
    sim->add_option("--service", sim_service, "mmn mean service time");
    sim->add_option("--servers", sim_servers, "mmn server count");
    sim->add_option("--lambda", sim_lambda, "network demand rate");
    sim->add_option("--n", sim_n, "network courier count");
    sim->add_option("--k", sim_k, "network station count");
    sim->add_option("--m", sim_m, "network charger supply");
    sim->add_option("--horizon", sim_horizon, "arrivals per replication");
    sim->add_option("--warmup", sim_warmup, "warmup arrivals (default 20%)");
    sim->add_option("--reps", sim_reps, "replications");
    sim->add_option("--seed", sim_seed, "RNG seed");

    // ---- calibrate-theta ----
    auto* ct = app.add_subcommand("calibrate-theta", "Monte-Carlo delivery-time slope");
    CommonOpts ct_opts;
    std::string ct_range = "20:120";
    double ct_area = 1000.0, ct_speed = 25.0 / 3.0;
    long ct_samples = 100000;
    std::uint64_t ct_seed = 1;
    add_common(ct, ct_opts);
    ct->add_option("--k", ct_range, "station range lo:hi");
    ct->add_option("--area", ct_area, "city area, km^2");
    ct->add_option("--speed", ct_speed, "courier speed, km/hr")->required();
    ct->add_option("--samples", ct_samples, "draws per station count");
    ct->add_option("--seed", ct_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        if (*solve) {
            const auto params = solve_opts.resolve();
            valet::PolicyConfig policy;
            policy.k = solve_k;
            policy.p_tax = solve_tax;
            policy.charger_cost = solve_r;
            valet::GridSpec grid;
            if (!solve_grid.empty()) {
                const auto x = solve_grid.find('x');
                if (x == std::string::npos)
                    throw CLI::ValidationError("--grid must be LxN");
                grid.lambda_points = std::stoi(solve_grid.substr(0, x));
                grid.n_points = std::stoi(solve_grid.substr(x + 1));
            }
            auto result = valet::maximize_profit(policy, params, grid);
            if (result.status != valet::SolveStatus::ok) {
                std::cerr << "solve: " << to_string(result.status) << "\n";
                return kExitInfeasible;
            }
            valet::attach_marginals(*result.outcome, policy, params);
            ordered_json j = valet::to_json(*result.outcome);
            j["kernel"] = valet::kernels::active_profit_row_name();
            valet::RunManifest man{"solve", params, policy, grid};
            emit(solve_opts, man, {{"solve.json", j.dump(2) + "\n"}}, j, started);
            return kExitOk;
        }

        if (*qe) {
            const auto params = qe_opts.resolve();
            const auto q = valet::solve_queue(qe_lambda, qe_n, qe_k, qe_m, params);
            if (!q) {
                std::cerr << "queue-eval: infeasible point\n";
                return kExitInfeasible;
            }
            const ordered_json j = valet::to_json(*q);
            valet::PolicyConfig policy;
            policy.k = qe_k;
            valet::RunManifest man{"queue-eval", params, policy, {}};
            emit(qe_opts, man, {{"queue.json", j.dump(2) + "\n"}}, j, started);
            return kExitOk;
        }

        if (*sk) {
            const auto params = sk_opts.resolve();
            const auto range = parse_int_range(sk_range);
            valet::PolicyConfig base;
            base.p_tax = sk_tax;
            base.charger_cost = sk_r;
            const auto result = valet::sweep_k(range.lo, range.hi, base, params);
            ordered_json j{{"summary", valet::to_json(result.summary)},
                           {"rows", result.table.rows.size()}};
            valet::RunManifest man{"sweep-k", params, base, {}};
            man.extra = ordered_json{{"k_lo", range.lo}, {"k_hi", range.hi}}.dump();
            emit(sk_opts, man,
                 {{"sweep_k.csv", valet::sweep_csv(result.table)},
                  {"summary.json", valet::to_json(result.summary).dump(2) + "\n"}},
                 j, started);
            return kExitOk;
        }

        if (*st) {
            const auto params = st_opts.resolve();
            const auto range = parse_step_range(st_range, 0.2);
            valet::PolicyConfig base;
            base.charger_cost = st_r;
            base.k = st_warm;
            const auto result =
                valet::stackelberg_tax(range.lo, range.hi, range.step, base, params);
            const ordered_json j = valet::to_json(result.summary);
            valet::RunManifest man{"sweep-tax", params, base, {}};
            man.extra = ordered_json{{"pt_lo", range.lo},
                                     {"pt_hi", range.hi},
                                     {"pt_step", range.step}}
                            .dump();
            emit(st_opts, man,
                 {{"sweep_tax.csv", valet::sweep_csv(result.table)},
                  {"summary.json", j.dump(2) + "\n"}},
                 j, started);
            return kExitOk;
        }

        if (*fr) {
            const auto params = fr_opts.resolve();
            const auto pt = parse_step_range(fr_pt, 0.2);
            valet::PolicyConfig base;
            base.k = fr_warm;
            const double rhat = valet::find_r_threshold(base, params, pt.lo, pt.hi,
                                                        pt.step, fr_lo, fr_hi, fr_tol);
            const ordered_json j{{"r_hat", rhat},
                                 {"r_lo", fr_lo},
                                 {"r_hi", fr_hi},
                                 {"tolerance", fr_tol}};
            valet::RunManifest man{"find-rhat", params, base, {}};
            emit(fr_opts, man, {{"rhat.json", j.dump(2) + "\n"}}, j, started);
            return kExitOk;
        }

        if (*se) {
            const auto params = se_opts.resolve();
            const auto range = parse_int_range(se_range);
            valet::PolicyConfig base;
            base.charger_cost = se_r;
            const auto cells = valet::sensitivity_batch(se_params, se_factors, range.lo,
                                                        range.hi, base, params);
            ordered_json rows = ordered_json::array();
            std::vector<std::pair<std::string, std::string>> files;
            std::string current;
            std::string csv;
            for (const auto& cell : cells) {
                rows.push_back(ordered_json{{"param", cell.param},
                                            {"factor", cell.factor},
                                            {"value", cell.value},
                                            {"summary", valet::to_json(cell.planning.summary)}});
                if (cell.param != current) {
                    if (!current.empty()) files.emplace_back("sensitivity_" + current + ".csv", csv);
                    current = cell.param;
                    csv.clear();
                }
                csv += "# factor = " + std::to_string(cell.factor) + "\n";
                csv += valet::sweep_csv(cell.planning.table);
            }
            if (!current.empty()) files.emplace_back("sensitivity_" + current + ".csv", csv);
            const ordered_json j{{"cells", rows}};
            files.emplace_back("sensitivity.json", j.dump(2) + "\n");
            valet::RunManifest man{"sensitivity", params, base, {}};
            emit(se_opts, man, files, j, started);
            return kExitOk;
        }

        if (*sim) {
            const auto params = sim_opts.resolve();
            valet::SimConfig cfg;
            cfg.horizon = sim_horizon;
            cfg.warmup = sim_warmup >= 0 ? sim_warmup : sim_horizon / 5;
            cfg.replications = sim_reps;
            cfg.seed = sim_seed;
            ordered_json j;
            if (sim_mode == "mmn") {
                cfg.arrival_rate = sim_arrival;
                cfg.mean_service = sim_service;
                cfg.servers = sim_servers;
                const auto r = valet::simulate_mmn(cfg);
                j = ordered_json{{"mode", "mmn"},
                                 {"simulated_wait", valet::to_json(r)},
                                 {"erlang_c_wait",
                                  valet::erlang_c_wait(sim_arrival, sim_service, sim_servers)},
                                 {"sakasegawa_wait",
                                  valet::sakasegawa_wait(sim_arrival, sim_service, sim_servers)}};
            } else {
                const auto r = valet::simulate_network(sim_lambda, static_cast<int>(sim_n),
                                                       sim_k, sim_m, params, cfg);
                if (r.unstable) {
                    std::cerr << "simulate: network unstable at this point\n";
                    return kExitInfeasible;
                }
                const auto q =
                    valet::solve_queue(sim_lambda, sim_n, sim_k, sim_m, params);
                j = ordered_json{{"mode", "network"},
                                 {"response", valet::to_json(r.response)},
                                 {"pickup", valet::to_json(r.pickup)},
                                 {"charge_wait", valet::to_json(r.charge_wait)},
                                 {"rho_d", valet::to_json(r.rho_d)},
                                 {"rho_c", valet::to_json(r.rho_c)}};
                if (q) j["analytic"] = valet::to_json(*q);
            }
            valet::PolicyConfig policy;
            policy.k = sim_k;
            valet::RunManifest man{"simulate", params, policy, {}};
            man.seed = sim_seed;
            emit(sim_opts, man, {{"simulate.json", j.dump(2) + "\n"}}, j, started);
            return kExitOk;
        }

        if (*ct) {
            const auto range = parse_int_range(ct_range);
            const auto cal = valet::calibrate_theta(ct_area, range.lo, range.hi, ct_speed,
                                                    ct_samples, ct_seed);
            const ordered_json j = valet::to_json(cal);
            std::string csv = "sqrt_area_per_k,t_d_hr\n";
            for (const auto& s : cal.samples) {
                std::ostringstream line;
                line.precision(12);
                line << s[0] << "," << s[1] << "\n";
                csv += line.str();
            }
            valet::ModelParams params = ct_opts.resolve();
            valet::RunManifest man{"calibrate-theta", params, {}, {}};
            man.seed = ct_seed;
            man.extra = ordered_json{{"area", ct_area},
                                     {"speed", ct_speed},
                                     {"samples", ct_samples},
                                     {"k_lo", range.lo},
                                     {"k_hi", range.hi}}
                            .dump();
            emit(ct_opts, man,
                 {{"calibration.csv", csv}, {"calibration.json", j.dump(2) + "\n"}}, j,
                 started);
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitUsage;
}
