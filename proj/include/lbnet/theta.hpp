#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "lbnet/model.hpp"

namespace lbnet {

enum class Provenance { exact, closed_form, recursive, empirical };

constexpr std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::closed_form: return "closed_form";
        case Provenance::recursive: return "recursive";
        case Provenance::empirical: return "empirical";
    }
    return "unknown";
}

// A measure on K stored in canonical state order.
struct ThetaMeasure {
    std::vector<int> base_stock;
    std::vector<InventoryState> states;
    std::vector<double> weights;
    bool normalized = false;
    Provenance provenance = Provenance::exact;

    std::size_t size() const noexcept { return weights.size(); }
    std::size_t locations() const noexcept { return base_stock.size(); }

    double operator()(const InventoryState& s) const { return weights[StateIndex(base_stock)(s)]; }

    // Weight of the state with on-hand stock `stock` (length J).
    double at(std::span<const int> stock) const {
        return weights[StateIndex(base_stock).of_stock(stock)];
    }

    double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

    void normalize() {
        const double t = total();
        if (!(t > 0.0) || !std::isfinite(t)) throw solver_error("measure has no positive mass");
        for (double& w : weights) w /= t;
        normalized = true;
    }
};

inline ThetaMeasure make_theta(std::span<const int> b, std::vector<double> weights,
                               Provenance provenance) {
    ThetaMeasure m;
    m.base_stock.assign(b.begin(), b.end());
    m.states = enumerate_inventory_states(b);
    if (weights.size() != m.states.size()) throw precondition_error("weight vector has wrong size");
    m.weights = std::move(weights);
    m.provenance = provenance;
    return m;
}

// Total variation distance between two measures on the same K.
inline double total_variation(const ThetaMeasure& a, const ThetaMeasure& b) {
    if (a.base_stock != b.base_stock) throw precondition_error("measures live on different K");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a.weights[i] - b.weights[i]);
    return 0.5 * d;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw precondition_error("distributions differ in support size");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return 0.5 * d;
}

}  // namespace lbnet
