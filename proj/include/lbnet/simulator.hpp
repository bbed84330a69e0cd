#pragma once

// Event-driven simulation of the full joint process (queues and inventories)
// with time-weighted occupancy estimates.
//
// Random numbers: std::mt19937_64 seeded with the run seed. A uniform in
// [0, 1) is the top 53 bits of one 64-bit draw times 2^-53; holding times are
// -log(1 - u) / total_rate; the jump is chosen by inverse CDF over the moves
// in enumeration order. Results are therefore identical across platforms for
// a given seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "lbnet/analysis.hpp"
#include "lbnet/generator.hpp"
#include "lbnet/queue_marginal.hpp"
#include "lbnet/theta.hpp"

namespace lbnet {

enum class Dynamics {
    standard,
    // Counter-model for negative controls: a server with waiting customers
    // also works while its inventory is empty, without consuming stock.
    service_ignores_stock,
};

struct SimulationOptions {
    std::uint64_t total_events = 1'000'000;
    std::uint64_t seed = 1;
    int n_obs = 6;                  // queue lengths are clipped at n_obs
    double burn_in_fraction = 0.1;  // leading share of events not recorded
    Dynamics dynamics = Dynamics::standard;
};

struct SimulationResult {
    std::uint64_t events = 0;
    double simulated_time = 0.0;  // recorded (post burn-in) time
    std::uint64_t seed = 0;
    int n_obs = 0;
    std::vector<int> base_stock;
    std::vector<double> joint;        // queue cell x |K|, time fractions
    std::vector<double> queue_joint;  // marginal over clipped queue vectors
    std::vector<std::vector<double>> queue_marginals;  // per location, 0..n_obs
    ThetaMeasure theta;                                // empirical, normalised

    std::size_t locations() const noexcept { return base_stock.size(); }
    std::size_t queue_cells() const noexcept { return queue_joint.size(); }
};

namespace detail {

template <class Engine>
double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

struct SimMove {
    Move move;
    double rate;
    bool consumes_stock = true;
};

// Fills accumulators with time fractions and derives the marginals.
inline void finalize(SimulationResult& r, std::size_t inventory_states) {
    const double t = r.simulated_time;
    if (!(t > 0.0)) throw solver_error("simulation recorded no time");
    for (double& v : r.joint) v /= t;
    const std::size_t J = r.locations();
    const std::size_t cells = r.joint.size() / inventory_states;
    const std::size_t side = static_cast<std::size_t>(r.n_obs + 1);
    r.queue_joint.assign(cells, 0.0);
    r.queue_marginals.assign(J, std::vector<double>(side, 0.0));
    std::vector<double> theta(inventory_states, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        double row = 0.0;
        for (std::size_t k = 0; k < inventory_states; ++k) {
            const double v = r.joint[c * inventory_states + k];
            row += v;
            theta[k] += v;
        }
        r.queue_joint[c] = row;
        std::size_t rest = c;
        for (std::size_t j = J; j-- > 0;) {
            r.queue_marginals[j][rest % side] += row;
            rest /= side;
        }
    }
    r.theta = make_theta(r.base_stock, std::move(theta), Provenance::empirical);
    r.theta.normalized = true;
}

}  // namespace detail

template <class Engine>
SimulationResult simulate(const NetworkConfig& config, const SimulationOptions& options,
                          Engine& engine) {
    config.validate();
    if (!ergodicity_check(config).ergodic)
        throw ergodicity_error("refusing to simulate a non-ergodic configuration");
    if (options.total_events < 1) throw precondition_error("total_events must be at least 1");
    if (options.n_obs < 0) throw precondition_error("n_obs must be non-negative");

    const std::size_t J = config.locations();
    const StateIndex index(config.b);
    const std::size_t side = static_cast<std::size_t>(options.n_obs + 1);
    std::size_t cells = 1;
    for (std::size_t j = 0; j < J; ++j) cells *= side;
    const int total_stock = std::accumulate(config.b.begin(), config.b.end(), 0);

    SimulationResult r;
    r.seed = options.seed;
    r.n_obs = options.n_obs;
    r.base_stock = config.b;
    r.joint.assign(cells * index.size(), 0.0);

    FullState s{std::vector<int>(J, 0), make_inventory_state(config.b, config.b)};
    const auto burn_in =
        static_cast<std::uint64_t>(options.burn_in_fraction * static_cast<double>(options.total_events));
    std::vector<detail::SimMove> moves;
    moves.reserve(4 * J + J * J);

    for (std::uint64_t e = 0; e < options.total_events; ++e) {
        moves.clear();
        double total = 0.0;
        for_each_full_move(config, s, [&](const Move& m, double rate) {
            moves.push_back({m, rate});
            total += rate;
        });
        if (options.dynamics == Dynamics::service_ignores_stock) {
            for (std::size_t i = 0; i < J; ++i) {
                if (s.n[i] > 0 && s.k.k[i] == 0) {
                    const double rate = config.mu[i](static_cast<std::size_t>(s.n[i]));
                    moves.push_back({Move{MoveKind::service, i}, rate, false});
                    total += rate;
                }
            }
        }
        // Every state has an arrival or a replenishment available.
        const double dt = -std::log1p(-detail::uniform01(engine)) / total;
        if (e >= burn_in) {
            std::size_t cell = 0;
            for (std::size_t j = 0; j < J; ++j)
                cell = cell * side + static_cast<std::size_t>(std::min(s.n[j], options.n_obs));
            r.joint[cell * index.size() + index(s.k)] += dt;
            r.simulated_time += dt;
        }
        double pick = detail::uniform01(engine) * total;
        std::size_t m = 0;
        while (m + 1 < moves.size() && pick >= moves[m].rate) pick -= moves[m++].rate;
        if (moves[m].consumes_stock)
            apply_move(s, moves[m].move);
        else
            --s.n[moves[m].move.location];

        int stock = s.k.supplier();
        for (std::size_t j = 0; j < J; ++j) stock += s.k.k[j];
        if (stock != total_stock) throw solver_error("inventory conservation violated");
    }
    r.events = options.total_events;
    detail::finalize(r, index.size());
    return r;
}

inline SimulationResult simulate(const NetworkConfig& config, const SimulationOptions& options) {
    std::mt19937_64 engine(options.seed);
    return simulate(config, options, engine);
}

// Independent replications with seeds seed, seed + 1, ...; up to `threads`
// run concurrently.
inline std::vector<SimulationResult> simulate_replications(const NetworkConfig& config,
                                                           const SimulationOptions& options,
                                                           std::size_t replications,
                                                           std::size_t threads = 1) {
    config.validate();
    if (!ergodicity_check(config).ergodic)
        throw ergodicity_error("refusing to simulate a non-ergodic configuration");
    std::vector<SimulationResult> out(replications);
    threads = std::max<std::size_t>(1, std::min(threads, replications));
    auto worker = [&](std::size_t first) {
        for (std::size_t r = first; r < replications; r += threads) {
            SimulationOptions o = options;
            o.seed = options.seed + r;
            out[r] = simulate(config, o);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
    return out;
}

// Time-weighted average of replications of the same configuration.
inline SimulationResult merge(const std::vector<SimulationResult>& runs) {
    if (runs.empty()) throw precondition_error("nothing to merge");
    SimulationResult m;
    m.seed = runs.front().seed;
    m.n_obs = runs.front().n_obs;
    m.base_stock = runs.front().base_stock;
    m.joint.assign(runs.front().joint.size(), 0.0);
    for (const auto& r : runs) {
        if (r.base_stock != m.base_stock || r.n_obs != m.n_obs || r.joint.size() != m.joint.size())
            throw precondition_error("replications differ in shape");
        for (std::size_t i = 0; i < m.joint.size(); ++i) m.joint[i] += r.joint[i] * r.simulated_time;
        m.simulated_time += r.simulated_time;
        m.events += r.events;
    }
    detail::finalize(m, StateIndex(m.base_stock).size());
    return m;
}

// TV between the empirical joint of (clipped n, k) and the product of its
// queue-vector and inventory marginals.
inline double decoupling_test(const SimulationResult& r) {
    const std::size_t states = r.theta.size();
    double d = 0.0;
    for (std::size_t c = 0; c < r.queue_cells(); ++c)
        for (std::size_t k = 0; k < states; ++k)
            d += std::abs(r.joint[c * states + k] - r.queue_joint[c] * r.theta.weights[k]);
    return 0.5 * d;
}

}  // namespace lbnet
