#include "valet/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace valet {

namespace {

// rho^expo via exp(expo * ln rho); underflow clamps to 0.
double pow_log_space(double rho, double expo) {
    if (rho <= 0.0) return 0.0;
    const double e = expo * std::log(rho);
    if (e < -745.0) return 0.0;
    return std::exp(e);
}

}  // namespace

double erlang_c_wait(double arrival_rate, double mean_service, int servers) {
    if (servers < 1) throw std::invalid_argument("servers must be at least 1");
    if (!(arrival_rate >= 0.0) || !(mean_service > 0.0))
        throw std::invalid_argument("arrival rate and mean service must be valid");
    if (arrival_rate == 0.0) return 0.0;
    const double a = arrival_rate * mean_service;  // offered load
    const double rho = a / servers;
    if (rho >= 1.0) throw std::domain_error("unstable queue: utilization >= 1");
    // Erlang-B recurrence, then convert to the delay probability.
    double b = 1.0;
    for (int j = 1; j <= servers; ++j) b = a * b / (j + a * b);
    const double p_wait = b / (1.0 - rho * (1.0 - b));
    return p_wait * mean_service / (servers - a);
}

double sakasegawa_wait(double arrival_rate, double mean_service, double servers) {
    if (!(servers > 0.0)) throw std::invalid_argument("servers must be positive");
    if (!(arrival_rate >= 0.0) || !(mean_service > 0.0))
        throw std::invalid_argument("arrival rate and mean service must be valid");
    if (arrival_rate == 0.0) return 0.0;
    const double rho = arrival_rate * mean_service / servers;
    if (rho >= 1.0) throw std::domain_error("unstable queue: utilization >= 1");
    return pow_log_space(rho, std::sqrt(2.0 * servers + 2.0)) / (arrival_rate * (1.0 - rho));
}

double delivery_time(int k, const ModelParams& p) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    return p.theta * std::sqrt(p.area / k);
}

double pickup_time(double n_idle, const ModelParams& p) {
    if (!(n_idle > 0.0)) throw std::domain_error("pickup time requires idle couriers");
    return p.phi * std::sqrt(p.area / n_idle);
}

std::optional<IdleCouriers> solve_idle_couriers(double lambda, double n, double t_delivery,
                                                const ModelParams& p) {
    if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (lambda == 0.0) return IdleCouriers{n, std::nullopt};

    // Substituting u = sqrt(N_i) gives u^3 - b*u + c = 0 with
    //   b = n - 2*lambda*t_d,  c = 2*lambda*phi*sqrt(area).
    const double b = n - 2.0 * lambda * t_delivery;
    const double c = 2.0 * lambda * p.phi * std::sqrt(p.area);
    const double disc = 4.0 * b * b * b - 27.0 * c * c;
    if (!(b > 0.0) || !(disc >= 0.0)) return std::nullopt;

    // Three real roots: trigonometric form. With b > 0 and c > 0 one root is
    // negative; the other two are the positive branch pair.
    const double s = std::sqrt(b / 3.0);
    double arg = -c / (2.0 * s * s * s);  // = -(3*sqrt(3)/2) * c * b^(-3/2), in [-1, 0]
    arg = std::max(std::min(arg, 0.0), -1.0);
    const double t = std::acos(arg) / 3.0;
    double u_hi = 2.0 * s * std::cos(t);
    double u_lo = 2.0 * s * std::cos(t - 4.0 * M_PI / 3.0);

    // One Newton polish step per root; skipped near the tangency where the
    // derivative vanishes.
    auto polish = [&](double u) {
        const double f = (u * u - b) * u + c;
        const double fp = 3.0 * u * u - b;
        if (std::abs(fp) > 1e-8 * (3.0 * u * u + b)) u -= f / fp;
        return u;
    };
    u_hi = polish(u_hi);
    u_lo = polish(u_lo);

    IdleCouriers roots;
    roots.larger = u_hi * u_hi;
    if (u_lo > 0.0) roots.smaller = u_lo * u_lo;
    return roots;
}

double response_time(double lambda, double n, double t_pickup, double t_delivery) {
    if (lambda == 0.0) return 0.0;
    const double rho = 2.0 * lambda * (t_pickup + t_delivery) / n;
    if (rho >= 1.0) throw std::domain_error("unstable delivery queue: rho_d >= 1");
    return pow_log_space(rho, std::sqrt(2.0 * n + 2.0)) / (2.0 * lambda * (1.0 - rho));
}

double charging_wait(double lambda, int k, double m, double t_charge) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (lambda == 0.0) return 0.0;
    if (!(lambda * t_charge < m)) throw std::domain_error("charger capacity exceeded");
    const double servers = m / k;
    const double lambda_station = lambda / k;
    return sakasegawa_wait(lambda_station, t_charge, servers);
}

std::optional<QueueSolution> solve_queue(double lambda, double n, int k, double m,
                                         const ModelParams& p) {
    QueueSolution q;
    q.t_delivery = delivery_time(k, p);
    q.lambda_delivery = 2.0 * lambda;
    q.lambda_station = lambda / k;
    q.servers_per_station = m / k;

    const auto roots = solve_idle_couriers(lambda, n, q.t_delivery, p);
    if (!roots) return std::nullopt;
    q.n_idle = roots->larger;
    q.t_pickup = pickup_time(q.n_idle, p);
    q.rho_d = q.lambda_delivery * (q.t_pickup + q.t_delivery) / n;
    if (q.rho_d >= 1.0) return std::nullopt;
    if (lambda > 0.0 && !(lambda * p.t_charge < m)) return std::nullopt;
    q.rho_c = lambda * p.t_charge / m;
    q.t_response = response_time(lambda, n, q.t_pickup, q.t_delivery);
    q.t_wait = charging_wait(lambda, k, m, p.t_charge);
    return q;
}

}  // namespace valet
