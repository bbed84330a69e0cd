#pragma once

// Network parameters, the inventory state space K, full joint states and the
// strict-priority load-balancing routing rule.
//
// Locations are indexed 0..J-1 throughout the library. The central supplier's
// order count k_{J+1} is stored as the last coordinate of an InventoryState.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lbnet/error.hpp"

namespace lbnet {

// Queue-length-dependent service intensity mu(n), n >= 1: an explicit head
// mu(1..m) followed by a constant tail mu(n) = tail for n > m.
class ServiceRateProfile {
public:
    ServiceRateProfile() = default;

    explicit ServiceRateProfile(double tail) : tail_(tail) {}

    ServiceRateProfile(std::vector<double> head, double tail)
        : head_(std::move(head)), tail_(tail) {}

    static ServiceRateProfile constant(double rate) { return ServiceRateProfile(rate); }

    // mu(n) for n >= 1.
    double operator()(std::size_t n) const {
        if (n == 0) throw precondition_error("service rate is defined for n >= 1 only");
        return n <= head_.size() ? head_[n - 1] : tail_;
    }

    const std::vector<double>& head() const noexcept { return head_; }
    double tail() const noexcept { return tail_; }

    bool valid() const {
        auto positive = [](double r) { return std::isfinite(r) && r > 0.0; };
        return positive(tail_) && std::all_of(head_.begin(), head_.end(), positive);
    }

    friend bool operator==(const ServiceRateProfile&, const ServiceRateProfile&) = default;

private:
    std::vector<double> head_;
    double tail_ = 1.0;
};

struct NetworkConfig {
    std::vector<double> lambda;           // arrival rate per location
    std::vector<ServiceRateProfile> mu;   // service profile per location
    std::vector<int> b;                   // base-stock level per location
    double nu = 1.0;                      // central supplier rate
    std::optional<double> transfer_beta;  // channel transfer (J = 2, homogeneous)

    std::size_t locations() const noexcept { return lambda.size(); }

    // Equal base-stock levels and equal arrival rates. Service rates are free.
    bool homogeneous() const {
        return std::adjacent_find(b.begin(), b.end(), std::not_equal_to<>()) == b.end() &&
               std::adjacent_find(lambda.begin(), lambda.end(), std::not_equal_to<>()) ==
                   lambda.end();
    }

    bool unit_base_stock() const {
        return std::all_of(b.begin(), b.end(), [](int v) { return v == 1; });
    }

    bool has_transfer() const { return transfer_beta.has_value() && *transfer_beta > 0.0; }

    // Throws invalid_config naming the first offending field.
    void validate() const {
        auto positive = [](double r) { return std::isfinite(r) && r > 0.0; };
        const std::size_t j = lambda.size();
        if (j < 2) throw invalid_config("J", "at least two locations are required");
        if (mu.size() != j) throw invalid_config("mu", "expected one service profile per location");
        if (b.size() != j) throw invalid_config("b", "expected one base-stock level per location");
        for (std::size_t i = 0; i < j; ++i) {
            if (!positive(lambda[i]))
                throw invalid_config("lambda", "rate at location " + std::to_string(i + 1) +
                                                   " must be positive");
            if (!mu[i].valid())
                throw invalid_config("mu", "profile at location " + std::to_string(i + 1) +
                                               " must have strictly positive rates");
            if (b[i] < 1)
                throw invalid_config("b", "level at location " + std::to_string(i + 1) +
                                              " must be at least 1");
        }
        if (!positive(nu)) throw invalid_config("nu", "supplier rate must be positive");
        if (transfer_beta) {
            if (!std::isfinite(*transfer_beta) || *transfer_beta < 0.0)
                throw invalid_config("beta", "transfer rate must be non-negative");
            if (j != 2 || b[0] != b[1] || lambda[0] != lambda[1])
                throw invalid_config("beta",
                                     "channel transfer needs two homogeneous locations");
        }
    }
};

// (k_1, ..., k_J, k_{J+1}): on-hand stock per location, then outstanding
// orders at the supplier.
struct InventoryState {
    std::vector<int> k;

    std::size_t locations() const noexcept { return k.empty() ? 0 : k.size() - 1; }
    int supplier() const { return k.back(); }
    int operator[](std::size_t j) const { return k[j]; }

    friend bool operator==(const InventoryState&, const InventoryState&) = default;
    friend auto operator<=>(const InventoryState&, const InventoryState&) = default;
};

inline InventoryState make_inventory_state(std::span<const int> b, std::span<const int> stock) {
    if (stock.size() != b.size()) throw precondition_error("stock vector has wrong length");
    InventoryState s;
    s.k.assign(stock.begin(), stock.end());
    int outstanding = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (stock[j] < 0 || stock[j] > b[j])
            throw precondition_error("stock level outside [0, b_j]");
        outstanding += b[j] - stock[j];
    }
    s.k.push_back(outstanding);
    return s;
}

inline bool is_valid_state(std::span<const int> b, const InventoryState& s) {
    if (s.k.size() != b.size() + 1) return false;
    int outstanding = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (s.k[j] < 0 || s.k[j] > b[j]) return false;
        outstanding += b[j] - s.k[j];
    }
    return s.k.back() == outstanding;
}

struct FullState {
    std::vector<int> n;  // queue length per location
    InventoryState k;

    friend bool operator==(const FullState&, const FullState&) = default;
};

// Mixed-radix index of K in lexicographic order on (k_1, ..., k_J), k_1 most
// significant.
class StateIndex {
public:
    StateIndex() = default;

    explicit StateIndex(std::span<const int> b) : b_(b.begin(), b.end()), stride_(b.size()) {
        std::size_t s = 1;
        for (std::size_t j = b_.size(); j-- > 0;) {
            stride_[j] = s;
            s *= static_cast<std::size_t>(b_[j] + 1);
        }
        size_ = s;
    }

    std::size_t size() const noexcept { return size_; }
    const std::vector<int>& base_stock() const noexcept { return b_; }

    std::size_t operator()(const InventoryState& s) const { return of_stock(s.k); }

    // Index from the first J coordinates; extra trailing entries are ignored.
    std::size_t of_stock(std::span<const int> stock) const {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < b_.size(); ++j)
            idx += static_cast<std::size_t>(stock[j]) * stride_[j];
        return idx;
    }

    InventoryState state(std::size_t idx) const {
        std::vector<int> stock(b_.size());
        for (std::size_t j = 0; j < b_.size(); ++j) {
            stock[j] = static_cast<int>(idx / stride_[j]);
            idx %= stride_[j];
        }
        return make_inventory_state(b_, stock);
    }

private:
    std::vector<int> b_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
};

// All of K in canonical order; exactly prod_j (b_j + 1) states.
inline std::vector<InventoryState> enumerate_inventory_states(std::span<const int> b) {
    if (b.empty()) throw invalid_config("b", "no locations");
    for (int level : b)
        if (level < 1) throw invalid_config("b", "every base-stock level must be at least 1");
    const StateIndex index(b);
    std::vector<InventoryState> out;
    out.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) out.push_back(index.state(i));
    return out;
}

// Probability that a finished item leaves the supplier for location i:
// uniform over the argmax of the deficits b_j - k_j. At the all-full state
// every location ties and 1/J is returned; transitions are guarded by
// k_i < b_i so that value never becomes a rate.
inline double routing_prob(std::span<const int> b, const InventoryState& s, std::size_t i) {
    const std::size_t j = b.size();
    if (i >= j) throw precondition_error("location index out of range");
    int best = b[0] - s.k[0];
    for (std::size_t l = 1; l < j; ++l) best = std::max(best, b[l] - s.k[l]);
    if (b[i] - s.k[i] != best) return 0.0;
    std::size_t ties = 0;
    for (std::size_t l = 0; l < j; ++l) ties += (b[l] - s.k[l] == best) ? 1 : 0;
    return 1.0 / static_cast<double>(ties);
}

}  // namespace lbnet
