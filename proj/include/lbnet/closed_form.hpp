#pragma once

// Explicit stationary measure for unit base-stock levels:
//
//   theta~(k) = prod_{l=0}^{|k|-1} 1/(J - l) * prod_j lambda_j^{-k_j} * nu^{-k_{J+1}}
//
// with |k| = sum_j k_j.

#include <cmath>
#include <cstddef>
#include <vector>

#include "lbnet/theta.hpp"

namespace lbnet {

inline ThetaMeasure theta_unit_base_stock(const NetworkConfig& config) {
    config.validate();
    if (!config.unit_base_stock())
        throw precondition_error("closed form requires b_j = 1 at every location; "
                                 "use the exact solver");
    if (config.has_transfer())
        throw precondition_error("closed form does not cover channel transfer");

    const std::size_t J = config.locations();
    auto states = enumerate_inventory_states(config.b);
    std::vector<double> w;
    w.reserve(states.size());
    for (const auto& s : states) {
        int stocked = 0;
        double value = 1.0;
        for (std::size_t j = 0; j < J; ++j) {
            stocked += s.k[j];
            if (s.k[j] == 1) value /= config.lambda[j];
        }
        for (int l = 0; l < stocked; ++l) value /= static_cast<double>(J) - l;
        value *= std::pow(1.0 / config.nu, s.supplier());
        w.push_back(value);
    }
    ThetaMeasure theta = make_theta(config.b, std::move(w), Provenance::closed_form);
    theta.normalize();
    return theta;
}

}  // namespace lbnet
