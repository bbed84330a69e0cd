#pragma once

// Reduced generator Q_red on K and the full joint transition structure on E.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "lbnet/model.hpp"

namespace lbnet {

// Visits every positive-rate move of the inventory-replenishment subsystem
// out of `s`: consumption k -> k - e_i + e_{J+1} at lambda_i, replenishment
// k -> k + e_i - e_{J+1} at nu * p_i(k), and, when a transfer rate is set,
// k -> k - e_i + e_j at beta whenever k_i - k_j >= 2.
template <class Fn>
void for_each_reduced_transition(const NetworkConfig& config, const InventoryState& s, Fn&& fn) {
    const std::size_t J = config.locations();
    InventoryState t = s;
    for (std::size_t i = 0; i < J; ++i) {
        if (s.k[i] > 0) {
            --t.k[i];
            ++t.k[J];
            fn(static_cast<const InventoryState&>(t), config.lambda[i]);
            ++t.k[i];
            --t.k[J];
        }
    }
    for (std::size_t i = 0; i < J; ++i) {
        if (s.k[i] < config.b[i]) {
            const double rate = config.nu * routing_prob(config.b, s, i);
            if (rate > 0.0) {
                ++t.k[i];
                --t.k[J];
                fn(static_cast<const InventoryState&>(t), rate);
                --t.k[i];
                ++t.k[J];
            }
        }
    }
    if (config.has_transfer()) {
        for (std::size_t i = 0; i < J; ++i) {
            for (std::size_t j = 0; j < J; ++j) {
                if (i != j && s.k[i] - s.k[j] >= 2) {
                    --t.k[i];
                    ++t.k[j];
                    fn(static_cast<const InventoryState&>(t), *config.transfer_beta);
                    ++t.k[i];
                    --t.k[j];
                }
            }
        }
    }
}

// Rate of the single move from -> to in Q_red (0 if absent).
inline double reduced_rate(const NetworkConfig& config, const InventoryState& from,
                           const InventoryState& to) {
    double rate = 0.0;
    for_each_reduced_transition(config, from, [&](const InventoryState& t, double r) {
        if (t == to) rate += r;
    });
    return rate;
}

struct ReducedGenerator {
    StateIndex index;
    std::vector<InventoryState> states;
    Eigen::MatrixXd rates;  // rates(from, to); diagonal = -row sum

    std::size_t size() const noexcept { return states.size(); }

    double max_rate() const { return rates.cwiseAbs().maxCoeff(); }
};

namespace detail {

// Forward and backward reachability from state 0 over positive rates.
inline bool strongly_connected(const Eigen::MatrixXd& q) {
    const auto n = q.rows();
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        Eigen::Index count = 1;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (Eigen::Index v = 0; v < n; ++v) {
                const double r = forward ? q(u, v) : q(v, u);
                if (v != u && r > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reach_all(true) && reach_all(false);
}

}  // namespace detail

inline ReducedGenerator build_reduced_generator(const NetworkConfig& config) {
    config.validate();
    ReducedGenerator gen;
    gen.index = StateIndex(config.b);
    gen.states = enumerate_inventory_states(config.b);
    const auto n = static_cast<Eigen::Index>(gen.states.size());
    gen.rates = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index from = 0; from < n; ++from) {
        const auto& s = gen.states[static_cast<std::size_t>(from)];
        for_each_reduced_transition(config, s, [&](const InventoryState& t, double r) {
            gen.rates(from, static_cast<Eigen::Index>(gen.index(t))) += r;
        });
        gen.rates(from, from) = -gen.rates.row(from).sum();
    }
    if (!detail::strongly_connected(gen.rates))
        throw model_error("reduced generator is not irreducible on K");
    return gen;
}

// ---------------------------------------------------------------------------
// Full joint process on E = N_0^J x K.

enum class MoveKind {
    arrival,        // n_i + 1
    service,        // n_i - 1, k_i - 1, k_{J+1} + 1
    replenishment,  // k_i + 1, k_{J+1} - 1
    transfer,       // k_from - 1, k_to + 1
};

struct Move {
    MoveKind kind;
    std::size_t location;  // receiving location for transfers
    std::size_t source = 0;  // only meaningful for transfers
};

inline void apply_move(FullState& s, const Move& m) {
    const std::size_t J = s.n.size();
    switch (m.kind) {
        case MoveKind::arrival:
            ++s.n[m.location];
            break;
        case MoveKind::service:
            --s.n[m.location];
            --s.k.k[m.location];
            ++s.k.k[J];
            break;
        case MoveKind::replenishment:
            ++s.k.k[m.location];
            --s.k.k[J];
            break;
        case MoveKind::transfer:
            --s.k.k[m.source];
            ++s.k.k[m.location];
            break;
    }
}

// Visits every positive-rate move out of a full state. Arrivals to a depleted
// inventory are lost; a server with customers but no stock idles until the
// next replenishment arrives.
template <class Fn>
void for_each_full_move(const NetworkConfig& config, const FullState& s, Fn&& fn) {
    const std::size_t J = config.locations();
    for (std::size_t i = 0; i < J; ++i)
        if (s.k.k[i] > 0) fn(Move{MoveKind::arrival, i}, config.lambda[i]);
    for (std::size_t i = 0; i < J; ++i)
        if (s.n[i] > 0 && s.k.k[i] > 0)
            fn(Move{MoveKind::service, i}, config.mu[i](static_cast<std::size_t>(s.n[i])));
    for (std::size_t i = 0; i < J; ++i) {
        if (s.k.k[i] < config.b[i]) {
            const double rate = config.nu * routing_prob(config.b, s.k, i);
            if (rate > 0.0) fn(Move{MoveKind::replenishment, i}, rate);
        }
    }
    if (config.has_transfer()) {
        for (std::size_t i = 0; i < J; ++i)
            for (std::size_t j = 0; j < J; ++j)
                if (i != j && s.k.k[i] - s.k.k[j] >= 2)
                    fn(Move{MoveKind::transfer, j, i}, *config.transfer_beta);
    }
}

struct Transition {
    FullState target;
    double rate;
};

using TransitionList = std::vector<Transition>;

inline TransitionList full_transitions(const NetworkConfig& config, const FullState& s) {
    TransitionList out;
    for_each_full_move(config, s, [&](const Move& m, double rate) {
        FullState t = s;
        apply_move(t, m);
        out.push_back({std::move(t), rate});
    });
    return out;
}

}  // namespace lbnet
