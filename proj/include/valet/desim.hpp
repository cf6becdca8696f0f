#pragma once

#include <cstdint>
#include <vector>

#include "valet/params.hpp"

namespace valet {

// Event-driven simulation settings. warmup/horizon count customer arrivals;
// statistics start once the warmup-th customer has arrived.
struct SimConfig {
    double arrival_rate = 1.0;  // 1/hr
    int servers = 1;
    double mean_service = 1.0;  // hr
    long warmup = 4000;
    long horizon = 20000;
    int replications = 30;
    std::uint64_t seed = 1;
};

struct SimResult {
    double mean = 0;
    double ci_halfwidth = 0;  // 95%, across replications
    std::vector<double> replication_means;
    bool contains(double x) const {
        return x >= mean - ci_halfwidth && x <= mean + ci_halfwidth;
    }
};

// FCFS M/M/N with infinite buffer; returns the mean queueing delay.
SimResult simulate_mmn(const SimConfig& config);

// Coupled delivery + charging network. EVs enter the delivery queue, are
// driven to a uniformly chosen station, recharge, and re-enter the delivery
// queue for the return leg. Delivery service is exponential with mean
// t_p + t_d where t_p is resampled from the instantaneous idle-courier
// count; stations split m chargers as evenly as integers allow.
struct NetworkSimResult {
    SimResult response;       // delivery-queue wait
    SimResult pickup;         // mean of the state-sampled pickup times
    SimResult charge_wait;    // charging-queue wait
    SimResult rho_d;          // busy-courier time fraction
    SimResult rho_c;          // busy-charger time fraction
    SimResult busy_couriers;  // time-average couriers in service
    SimResult service_mean;   // realized delivery service duration
    bool unstable = false;
};

NetworkSimResult simulate_network(double lambda, int n_couriers, int k_stations,
                                  double m_chargers, const ModelParams& params,
                                  const SimConfig& sim);

}  // namespace valet
