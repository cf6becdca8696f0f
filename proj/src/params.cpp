#include "valet/params.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace valet {

double PolicyConfig::nominal_chargers(const ModelParams& p) const {
    if (budget) return *budget / *gamma;
    return p.m0;
}

namespace {

struct Field {
    const char* name;
    double ModelParams::* member;
};

constexpr Field kFields[] = {
    {"lambda0", &ModelParams::lambda0},
    {"n0", &ModelParams::n0},
    {"m0", &ModelParams::m0},
    {"area", &ModelParams::area},
    {"coordinator_cost", &ModelParams::coordinator_cost},
    {"c_self", &ModelParams::c_self},
    {"c_fuel", &ModelParams::c_fuel},
    {"w_outside", &ModelParams::w_outside},
    {"t_charge", &ModelParams::t_charge},
    {"alpha", &ModelParams::alpha},
    {"beta", &ModelParams::beta},
    {"tau", &ModelParams::tau},
    {"theta", &ModelParams::theta},
    {"phi", &ModelParams::phi},
    {"eps1", &ModelParams::eps1},
    {"eps2", &ModelParams::eps2},
    {"eta", &ModelParams::eta},
};

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

const ModelParams& validate(const ModelParams& p) {
    for (const auto& f : kFields) {
        const double v = p.*(f.member);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(f.name) + " must be positive");
    }
    if (!(p.alpha > p.beta))
        throw std::invalid_argument("alpha must exceed beta");
    if (!(p.tau <= 1.0))
        throw std::invalid_argument("tau must not exceed 1");
    return p;
}

const PolicyConfig& validate(const PolicyConfig& p) {
    if (p.k < 1) throw std::invalid_argument("k must be at least 1");
    if (!(p.p_tax >= 0.0)) throw std::invalid_argument("p_tax must be nonnegative");
    if (!(p.charger_cost > 0.0)) throw std::invalid_argument("charger_cost must be positive");
    if (p.budget.has_value() != p.gamma.has_value())
        throw std::invalid_argument("budget and gamma must be given together");
    if (p.budget && !(*p.budget > 0.0)) throw std::invalid_argument("budget must be positive");
    if (p.gamma && !(*p.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    return p;
}

double& param_by_name(ModelParams& p, const std::string& name) {
    for (const auto& f : kFields)
        if (name == f.name) return p.*(f.member);
    throw std::invalid_argument("unknown parameter: " + name);
}

std::vector<std::pair<std::string, double>> param_table(const ModelParams& p) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(std::size(kFields));
    for (const auto& f : kFields) out.emplace_back(f.name, p.*(f.member));
    return out;
}

ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ModelParams p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            size_t used = 0;
            const double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("trailing characters");
            param_by_name(p, key) = v;
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return p;
}

void save_params(const ModelParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    for (const auto& [name, value] : param_table(p)) {
        std::ostringstream ss;
        ss.precision(17);
        ss << value;
        out << name << " = " << ss.str() << "\n";
    }
}

void apply_override(ModelParams& p, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be name=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    const std::string val = trim(assignment.substr(eq + 1));
    size_t used = 0;
    const double v = std::stod(val, &used);
    if (used != val.size())
        throw std::invalid_argument("bad numeric value in override: " + assignment);
    param_by_name(p, key) = v;
}

}  // namespace valet
