#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace valet {

// Exogenous market parameters. Defaults are the calibrated Hong Kong
// baseline scenario used throughout the numerical studies.
struct ModelParams {
    double lambda0 = 6e5;           // potential private-vehicle owners
    double n0 = 5e4;                // potential couriers
    double m0 = 3e3;                // nominal public charger supply
    double area = 1e3;              // city area, km^2
    double coordinator_cost = 60;   // per-station coordinator wage, HK$/hr
    double c_self = 80;             // generalized self-charging cost, HK$
    double c_fuel = 75;             // generalized fossil refueling cost, HK$
    double w_outside = 110;         // outside-option wage, HK$/hr
    double t_charge = 5;            // mean full-charge duration, hr
    double alpha = 60;              // pre-pickup value of time, HK$/hr
    double beta = 10;               // post-pickup value of time, HK$/hr
    double tau = 0.01;              // fraction of EVs needing charge per hour
    double theta = 0.06;            // delivery-time coefficient, hr per sqrt(km^2/station)
    double phi = 0.04;              // pickup-time coefficient, hr*sqrt(couriers/km^2)
    double eps1 = 0.11;             // upper-nest sensitivity, 1/HK$
    double eps2 = 0.1;              // lower-nest sensitivity, 1/HK$
    double eta = 0.1;               // supply sensitivity, hr/HK$
};

// Planner-controlled levers: station count, per-service tax, and the
// prorated charger installation cost. When a total budget B and combined
// per-charger cost gamma are given, the nominal charger supply reduces to
// m0 = B / gamma.
struct PolicyConfig {
    int k = 1;                      // charging station count
    double p_tax = 0.0;             // per-service tax, HK$
    double charger_cost = 25.0;     // per-charger installation cost r, HK$/hr
    std::optional<double> budget;   // total charging budget B, HK$
    std::optional<double> gamma;    // combined per-charger cost when budget is set

    double nominal_chargers(const ModelParams& p) const;
};

// Throws std::invalid_argument naming the first violated invariant.
const ModelParams& validate(const ModelParams& p);
const PolicyConfig& validate(const PolicyConfig& p);

// Name <-> field mapping shared by the config loader, CLI overrides, and
// the sensitivity driver. Names match the field names above.
double& param_by_name(ModelParams& p, const std::string& name);
std::vector<std::pair<std::string, double>> param_table(const ModelParams& p);

// Flat key = value config files. Unknown keys are an error.
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& p, const std::string& path);
void apply_override(ModelParams& p, const std::string& assignment);  // "name=value"

}  // namespace valet
