#include "valet/desim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <stdexcept>

#include "valet/parallel.hpp"

namespace valet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// two-sided 97.5% Student-t quantiles; index = degrees of freedom
double t_quantile_975(int df) {
    static const double table[] = {0,      12.706, 4.303, 3.182, 2.776, 2.571,
                                   2.447,  2.365,  2.306, 2.262, 2.228, 2.201,
                                   2.179,  2.160,  2.145, 2.131, 2.120, 2.110,
                                   2.101,  2.093,  2.086, 2.080, 2.074, 2.069,
                                   2.064,  2.060,  2.056, 2.052, 2.048, 2.045,
                                   2.042};
    if (df <= 0) return 12.706;
    if (df <= 30) return table[df];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

SimResult summarize(std::vector<double> reps) {
    SimResult r;
    r.replication_means = std::move(reps);
    const int n = static_cast<int>(r.replication_means.size());
    double sum = 0;
    for (double v : r.replication_means) sum += v;
    r.mean = sum / n;
    if (n > 1) {
        double ss = 0;
        for (double v : r.replication_means) ss += (v - r.mean) * (v - r.mean);
        const double sd = std::sqrt(ss / (n - 1));
        r.ci_halfwidth = t_quantile_975(n - 1) * sd / std::sqrt(double(n));
    }
    return r;
}

double mmn_replication(const SimConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> interarrival(cfg.arrival_rate);
    std::exponential_distribution<double> service(1.0 / cfg.mean_service);

    // departure-time min-heap; arrivals generated inline
    std::priority_queue<double, std::vector<double>, std::greater<>> departures;
    std::deque<std::pair<double, long>> waiting;  // (arrival time, index)
    long arrived = 0;
    int busy = 0;
    double wait_sum = 0;
    long wait_count = 0;
    double next_arrival = interarrival(rng);

    while (arrived < cfg.horizon || busy > 0 || !waiting.empty()) {
        const bool more_arrivals = arrived < cfg.horizon;
        const double t_dep =
            departures.empty() ? std::numeric_limits<double>::infinity() : departures.top();
        if (more_arrivals && next_arrival <= t_dep) {
            const double now = next_arrival;
            const long idx = arrived++;
            next_arrival = now + interarrival(rng);
            if (busy < cfg.servers) {
                ++busy;
                if (idx >= cfg.warmup) {
                    wait_sum += 0.0;
                    ++wait_count;
                }
                departures.push(now + service(rng));
            } else {
                waiting.emplace_back(now, idx);
            }
        } else {
            if (departures.empty()) break;
            const double now = departures.top();
            departures.pop();
            --busy;
            if (!waiting.empty()) {
                const auto [t_arr, idx] = waiting.front();
                waiting.pop_front();
                ++busy;
                if (idx >= cfg.warmup) {
                    wait_sum += now - t_arr;
                    ++wait_count;
                }
                departures.push(now + service(rng));
            }
        }
    }
    return wait_count > 0 ? wait_sum / wait_count : 0.0;
}

}  // namespace

SimResult simulate_mmn(const SimConfig& cfg) {
    if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (cfg.horizon <= cfg.warmup) throw std::invalid_argument("horizon must exceed warmup");
    if (!(cfg.arrival_rate * cfg.mean_service / cfg.servers < 1.0))
        throw std::invalid_argument("unstable configuration: rho >= 1");
    std::vector<double> reps(cfg.replications);
    parallel_for(reps.size(), [&](std::size_t i) {
        reps[i] = mmn_replication(cfg, splitmix64(cfg.seed + 0x1000 + i));
    });
    return summarize(std::move(reps));
}

namespace {

struct NetworkStats {
    double wait_sum = 0;     // delivery-queue waits
    long wait_count = 0;
    double pickup_sum = 0;   // sampled pickup-time means
    long pickup_count = 0;
    double charge_wait_sum = 0;
    long charge_wait_count = 0;
    double service_sum = 0;  // realized delivery service times
    long service_count = 0;
    double busy_courier_time = 0;
    double busy_charger_time = 0;
    double measured_time = 0;
    bool unstable = false;
};

struct NetworkReplication {
    double lambda;
    int n, k;
    const ModelParams& params;
    const SimConfig& cfg;
    std::mt19937_64 rng;

    // station charger counts: m split as evenly as integers allow
    std::vector<int> station_free;
    std::vector<std::deque<double>> station_queue;

    enum class Ev : uint8_t { arrive, delivery_done, charge_done };
    struct Event {
        double time;
        long seq;
        Ev type;
        int station;   // for charge_done
        int leg;       // 1: to station, 2: back home
        bool operator>(const Event& o) const {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    long seq = 0;

    std::deque<std::pair<double, int>> delivery_queue;  // (enqueue time, leg)
    int idle;
    long arrived = 0;
    double warmup_time = std::numeric_limits<double>::infinity();
    double now = 0, last = 0;
    NetworkStats st;

    std::exponential_distribution<double> interarrival;
    std::exponential_distribution<double> charge_dist;

    NetworkReplication(double lam, int n_, int k_, double m, const ModelParams& p,
                       const SimConfig& c, std::uint64_t seed)
        : lambda(lam), n(n_), k(k_), params(p), cfg(c), rng(seed), idle(n_),
          interarrival(lam), charge_dist(1.0 / p.t_charge) {
        const int base = static_cast<int>(m) / k_;
        const int extra = static_cast<int>(m) % k_;
        station_free.assign(k_, base);
        for (int s = 0; s < extra; ++s) ++station_free[s];
        station_queue.resize(k_);
        if (cfg.warmup <= 0) warmup_time = 0.0;
    }

    bool recording() const { return now >= warmup_time; }

    void advance_time(double t) {
        const double lo = std::max(last, warmup_time);
        if (t > lo) {
            st.busy_courier_time += (n - idle) * (t - lo);
            st.busy_charger_time += total_chargers_busy * (t - lo);
            st.measured_time += t - lo;
        }
        last = t;
        now = t;
    }
    int total_chargers_busy = 0;

    void dispatch() {
        while (idle > 0 && !delivery_queue.empty()) {
            const auto [t_enq, leg] = delivery_queue.front();
            delivery_queue.pop_front();
            // pickup distance set by the idle pool the courier is drawn from
            const double t_p = params.phi * std::sqrt(params.area / idle);
            const double t_d = params.theta * std::sqrt(params.area / k);
            std::exponential_distribution<double> service(1.0 / (t_p + t_d));
            const double dur = service(rng);
            if (recording()) {
                st.wait_sum += now - t_enq;
                ++st.wait_count;
                st.pickup_sum += t_p;
                ++st.pickup_count;
                st.service_sum += dur;
                ++st.service_count;
            }
            --idle;
            events.push({now + dur, seq++, Ev::delivery_done, -1, leg});
        }
    }

    void start_charge(int s) {
        --station_free[s];
        ++total_chargers_busy;
        events.push({now + charge_dist(rng), seq++, Ev::charge_done, s, 0});
    }

    void run() {
        events.push({interarrival(rng), seq++, Ev::arrive, -1, 0});
        const long queue_bound = std::max<long>(2000, 50L * n);
        while (!events.empty()) {
            const Event ev = events.top();
            events.pop();
            advance_time(ev.time);
            switch (ev.type) {
                case Ev::arrive: {
                    ++arrived;
                    if (arrived == cfg.warmup) warmup_time = now;
                    delivery_queue.emplace_back(now, 1);
                    dispatch();
                    if (arrived < cfg.horizon)
                        events.push({now + interarrival(rng), seq++, Ev::arrive, -1, 0});
                    break;
                }
                case Ev::delivery_done: {
                    ++idle;
                    if (ev.leg == 1) {
                        std::uniform_int_distribution<int> pick(0, k - 1);
                        const int s = pick(rng);
                        if (station_free[s] > 0) {
                            if (recording()) {
                                st.charge_wait_sum += 0.0;
                                ++st.charge_wait_count;
                            }
                            start_charge(s);
                        } else {
                            station_queue[s].push_back(now);
                        }
                    }
                    dispatch();
                    break;
                }
                case Ev::charge_done: {
                    ++station_free[ev.station];
                    --total_chargers_busy;
                    if (!station_queue[ev.station].empty()) {
                        const double t_enq = station_queue[ev.station].front();
                        station_queue[ev.station].pop_front();
                        if (recording()) {
                            st.charge_wait_sum += now - t_enq;
                            ++st.charge_wait_count;
                        }
                        start_charge(ev.station);
                    }
                    delivery_queue.emplace_back(now, 2);
                    dispatch();
                    break;
                }
            }
            if (static_cast<long>(delivery_queue.size()) > queue_bound) {
                st.unstable = true;
                break;
            }
            if (arrived >= cfg.horizon && events.empty()) break;
        }
    }
};

}  // namespace

NetworkSimResult simulate_network(double lambda, int n_couriers, int k_stations,
                                  double m_chargers, const ModelParams& params,
                                  const SimConfig& sim) {
    if (n_couriers < 1 || k_stations < 1 || !(m_chargers >= 1))
        throw std::invalid_argument("need at least one courier, station, and charger");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (sim.horizon <= sim.warmup) throw std::invalid_argument("horizon must exceed warmup");

    const int reps = sim.replications;
    std::vector<NetworkStats> stats(reps);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t i) {
        NetworkReplication rep(lambda, n_couriers, k_stations, m_chargers, params, sim,
                               splitmix64(sim.seed + 0x2000 + i));
        rep.run();
        stats[i] = rep.st;
    });

    auto collect = [&](auto metric) {
        std::vector<double> v(reps);
        for (int i = 0; i < reps; ++i) v[i] = metric(stats[i]);
        return summarize(std::move(v));
    };
    NetworkSimResult out;
    out.response = collect([](const NetworkStats& s) {
        return s.wait_count ? s.wait_sum / s.wait_count : 0.0;
    });
    out.pickup = collect([](const NetworkStats& s) {
        return s.pickup_count ? s.pickup_sum / s.pickup_count : 0.0;
    });
    out.charge_wait = collect([](const NetworkStats& s) {
        return s.charge_wait_count ? s.charge_wait_sum / s.charge_wait_count : 0.0;
    });
    out.service_mean = collect([](const NetworkStats& s) {
        return s.service_count ? s.service_sum / s.service_count : 0.0;
    });
    out.busy_couriers = collect([](const NetworkStats& s) {
        return s.measured_time > 0 ? s.busy_courier_time / s.measured_time : 0.0;
    });
    out.rho_d = collect([&](const NetworkStats& s) {
        return s.measured_time > 0 ? s.busy_courier_time / (s.measured_time * n_couriers)
                                   : 0.0;
    });
    out.rho_c = collect([&](const NetworkStats& s) {
        return s.measured_time > 0 ? s.busy_charger_time / (s.measured_time * m_chargers)
                                   : 0.0;
    });
    for (const auto& s : stats) out.unstable = out.unstable || s.unstable;
    return out;
}

}  // namespace valet
