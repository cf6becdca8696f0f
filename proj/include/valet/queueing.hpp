#pragma once

#include <optional>

#include "valet/params.hpp"

namespace valet {

// Endogenous steady-state times and utilizations for a decision point
// (lambda, n, k) under charger supply m. All times in hours.
struct QueueSolution {
    double n_idle = 0;               // idle couriers
    double t_response = 0;           // delivery-queue wait
    double t_pickup = 0;             // mean pickup time
    double t_delivery = 0;           // mean delivery time
    double t_wait = 0;               // charging-queue wait
    double rho_d = 0;                // courier fleet utilization
    double rho_c = 0;                // charger occupancy
    double servers_per_station = 0;  // m / k, real valued
    double lambda_delivery = 0;      // 2 * lambda
    double lambda_station = 0;       // lambda / k
};

// Exact M/M/N mean queueing delay. Uses the stable Erlang-B recurrence on
// term ratios; no factorials. Throws std::domain_error when rho >= 1.
double erlang_c_wait(double arrival_rate, double mean_service, int servers);

// Sakasegawa mean-wait approximation (1/lambda) * rho^sqrt(2N+2) / (1-rho)
// with real-valued server count. The power is evaluated in log space; it
// underflows gracefully to zero. Reduces to the exact M/M/1 wait at N = 1.
double sakasegawa_wait(double arrival_rate, double mean_service, double servers);

// Mean travel time to the nearest of k uniformly spread stations:
// theta * sqrt(area / k).
double delivery_time(int k, const ModelParams& p);

// Pickup time phi * sqrt(area / n_idle).
double pickup_time(double n_idle, const ModelParams& p);

// Positive roots of the idle-courier fixed point
//   N_i = n - 2*lambda*(phi*sqrt(area/N_i) + t_delivery),
// a cubic in sqrt(N_i). Roots exist iff
//   (n - 2*lambda*t_d)^(3/2) >= sqrt(27*area)*phi*lambda;
// nullopt signals that the point is outside the feasible set. The larger
// root is the normal-regime solution; the smaller one (when distinct) is
// the wild-goose-chase branch.
struct IdleCouriers {
    double larger = 0;
    std::optional<double> smaller;
};
std::optional<IdleCouriers> solve_idle_couriers(double lambda, double n, double t_delivery,
                                                const ModelParams& p);

// Delivery-queue wait rho_d^sqrt(2n+2) / (2*lambda*(1-rho_d)); 0 at lambda = 0.
double response_time(double lambda, double n, double t_pickup, double t_delivery);

// Charging-queue wait with m chargers split evenly over k stations,
// real-valued servers s = m/k; 0 at lambda = 0. Throws std::domain_error
// once lambda * t_charge >= m (capacity exceeded).
double charging_wait(double lambda, int k, double m, double t_charge);

// Full steady-state assembly at (lambda, n, k, m), selecting the larger
// (normal-regime) idle-courier root. nullopt when infeasible.
std::optional<QueueSolution> solve_queue(double lambda, double n, int k, double m,
                                         const ModelParams& p);

}  // namespace valet
