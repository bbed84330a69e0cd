#pragma once

// Marginals of the stationary inventory-replenishment measure and the
// structural identities it must satisfy: permutation symmetry for homogeneous
// locations and the cut (flow-balance) identities for the stock levels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lbnet/exact_solver.hpp"
#include "lbnet/queue_marginal.hpp"
#include "lbnet/theta.hpp"

namespace lbnet {

inline constexpr double kIdentityTolerance = 1e-10;

// P(Y_j = l), l = 0..b_j.
inline std::vector<double> inventory_marginal(const ThetaMeasure& theta, std::size_t j) {
    if (j >= theta.locations()) throw precondition_error("location index out of range");
    std::vector<double> p(static_cast<std::size_t>(theta.base_stock[j] + 1), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i)
        p[static_cast<std::size_t>(theta.states[i].k[j])] += theta.weights[i];
    return p;
}

namespace detail {

inline std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;  // exact at every step
    return r;
}

inline void require_homogeneous(const NetworkConfig& config, const char* what) {
    if (!config.homogeneous())
        throw precondition_error(std::string(what) + " needs homogeneous locations "
                                                     "(equal b and equal lambda)");
}

}  // namespace detail

// Largest |lhs - rhs| over l = 1..b of
//
//   P(Y_1 = l) lambda_1 = P(Y_j = l-1 for all j) nu / J
//       + sum_{i=1}^{J-1} P(Y_1..Y_i = l-1, Y_{i+1..J} > l-1) C(J-1, i-1) nu / i.
inline double check_cut_homogeneous(const ThetaMeasure& theta, const NetworkConfig& config) {
    config.validate();
    detail::require_homogeneous(config, "homogeneous cut identity");
    if (config.has_transfer())
        throw precondition_error("cut identities do not account for channel transfer");
    const std::size_t J = config.locations();
    const int b = config.b[0];
    const auto y1 = inventory_marginal(theta, 0);
    double worst = 0.0;
    for (int l = 1; l <= b; ++l) {
        std::vector<double> prefix(J + 1, 0.0);  // prefix[i]: first i at l-1, rest above
        for (std::size_t s = 0; s < theta.size(); ++s) {
            const auto& k = theta.states[s].k;
            std::size_t i = 0;
            while (i < J && k[i] == l - 1) ++i;
            if (i == 0) continue;
            bool rest_above = true;
            for (std::size_t r = i; r < J; ++r) rest_above = rest_above && k[r] > l - 1;
            if (rest_above) prefix[i] += theta.weights[s];
        }
        double rhs = prefix[J] * config.nu / static_cast<double>(J);
        for (std::size_t i = 1; i < J; ++i)
            rhs += prefix[i] *
                   static_cast<double>(detail::binomial(static_cast<unsigned>(J - 1),
                                                        static_cast<unsigned>(i - 1))) *
                   config.nu / static_cast<double>(i);
        const double lhs = y1[static_cast<std::size_t>(l)] * config.lambda[0];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

struct HeterogeneousCutReport {
    double geometric_range = 0.0;     // l1 = 1..b1-b2
    double mid_range = 0.0;           // l1 = b1-b2+1..b1-1
    double full_level = 0.0;          // l1 = b1
    double second_location = 0.0;     // l2 = 1..b2
    double geometric_relation = 0.0;  // P(Y1=l1) = P(Y1=0) (nu/lambda1)^l1, l1 <= b1-b2

    double max() const {
        return std::max({geometric_range, mid_range, full_level, second_location,
                         geometric_relation});
    }
};

inline HeterogeneousCutReport check_cut_heterogeneous(const ThetaMeasure& theta,
                                                      const NetworkConfig& config) {
    config.validate();
    if (config.locations() != 2) throw precondition_error("heterogeneous cut identities need J = 2");
    if (config.b[0] < config.b[1]) throw precondition_error("heterogeneous cut identities need b1 >= b2");
    if (config.has_transfer())
        throw precondition_error("cut identities do not account for channel transfer");
    const int b1 = config.b[0];
    const int b2 = config.b[1];
    const double l1 = config.lambda[0];
    const double l2 = config.lambda[1];
    const double nu = config.nu;
    auto p = [&](int k1, int k2) {
        const int stock[2] = {k1, k2};
        return theta.at(stock);
    };
    const auto y1 = inventory_marginal(theta, 0);
    const auto y2 = inventory_marginal(theta, 1);
    auto y1_at = [&](int l) { return y1[static_cast<std::size_t>(l)]; };

    HeterogeneousCutReport r;
    for (int l = 1; l <= b1 - b2; ++l) {
        r.geometric_range = std::max(r.geometric_range, std::abs(y1_at(l) * l1 - y1_at(l - 1) * nu));
        r.geometric_relation = std::max(
            r.geometric_relation, std::abs(y1_at(l) - y1_at(0) * std::pow(nu / l1, l)));
    }
    for (int l = b1 - b2 + 1; l <= b1 - 1; ++l) {
        const int d = l - 1 - b1 + b2;
        double rhs = p(l - 1, d) * 0.5 * nu;
        for (int k2 = d + 1; k2 <= b2; ++k2) rhs += p(l - 1, k2) * nu;
        r.mid_range = std::max(r.mid_range, std::abs(y1_at(l) * l1 - rhs));
    }
    r.full_level = std::abs(y1_at(b1) * l1 - (p(b1 - 1, b2 - 1) * 0.5 * nu + p(b1 - 1, b2) * nu));
    for (int l = 1; l <= b2; ++l) {
        const int e = b1 - b2 + l - 1;
        double rhs = p(e, l - 1) * 0.5 * nu;
        for (int k1 = e + 1; k1 <= b1; ++k1) rhs += p(k1, l - 1) * nu;
        r.second_location =
            std::max(r.second_location, std::abs(y2[static_cast<std::size_t>(l)] * l2 - rhs));
    }
    return r;
}

// max over permutations sigma and states k of |theta(k) - theta(sigma k)|.
// `allow_heterogeneous_rates` lifts the equal-lambda requirement (equal base
// stocks are still needed for sigma k to lie in K).
inline double check_symmetry(const ThetaMeasure& theta, const NetworkConfig& config,
                             bool allow_heterogeneous_rates = false) {
    config.validate();
    if (!allow_heterogeneous_rates) detail::require_homogeneous(config, "symmetry check");
    if (std::adjacent_find(config.b.begin(), config.b.end(), std::not_equal_to<>()) !=
        config.b.end())
        throw precondition_error("symmetry check needs equal base-stock levels");
    const std::size_t J = config.locations();
    std::vector<std::size_t> sigma(J);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::vector<int> permuted(J);
    double worst = 0.0;
    do {
        for (std::size_t s = 0; s < theta.size(); ++s) {
            const auto& k = theta.states[s].k;
            for (std::size_t j = 0; j < J; ++j) permuted[j] = k[sigma[j]];
            worst = std::max(worst, std::abs(theta.weights[s] - theta.at(permuted)));
        }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return worst;
}

// Exchanges the two locations of a J = 2 config, e.g. to reach b1 >= b2.
inline NetworkConfig swap_locations(NetworkConfig config) {
    if (config.locations() != 2) throw precondition_error("swap_locations needs J = 2");
    std::swap(config.lambda[0], config.lambda[1]);
    std::swap(config.mu[0], config.mu[1]);
    std::swap(config.b[0], config.b[1]);
    return config;
}

inline ThetaMeasure swap_locations(const ThetaMeasure& theta) {
    if (theta.locations() != 2) throw precondition_error("swap_locations needs J = 2");
    const int b[2] = {theta.base_stock[1], theta.base_stock[0]};
    std::vector<double> w;
    for (int k1 = 0; k1 <= b[0]; ++k1)
        for (int k2 = 0; k2 <= b[1]; ++k2) {
            const int stock[2] = {k2, k1};
            w.push_back(theta.at(stock));
        }
    ThetaMeasure out = make_theta(b, std::move(w), theta.provenance);
    out.normalized = theta.normalized;
    return out;
}

// Largest relative spread of pi(n, k) / theta(k) across k, over every n in
// the window. Zero when the truncated joint factorises.
inline double factorization_defect(const TruncatedDistribution& pi) {
    const auto& theta = pi.theta();
    const std::size_t J = theta.locations();
    std::vector<int> n(J, 0);
    double worst = 0.0;
    for (std::size_t c = 0; c < pi.queue_cells(); ++c) {
        const double ref = pi(n, 0) / theta.weights[0];
        for (std::size_t k = 1; k < theta.size(); ++k)
            worst = std::max(worst, std::abs(pi(n, k) / theta.weights[k] - ref) / ref);
        for (std::size_t j = J; j-- > 0;) {
            if (++n[j] <= static_cast<int>(pi.n_max())) break;
            n[j] = 0;
        }
    }
    return worst;
}

}  // namespace lbnet
