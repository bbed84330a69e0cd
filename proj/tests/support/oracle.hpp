#pragma once

// Independent reference implementations for the tests: a dense generator
// assembled straight from the model description (no shared code with
// lbnet/generator.hpp beyond state enumeration) and a Gaussian-elimination
// stationary solve.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "lbnet/model.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Routing probability by brute force: the set of locations with the largest
// deficit b_j - k_j, each chosen with equal probability.
inline double route(const lbnet::NetworkConfig& c, const std::vector<int>& k, std::size_t i) {
    int best = -1;
    for (std::size_t j = 0; j < c.b.size(); ++j) best = std::max(best, c.b[j] - k[j]);
    int ties = 0;
    for (std::size_t j = 0; j < c.b.size(); ++j) ties += (c.b[j] - k[j] == best);
    return (c.b[i] - k[i] == best) ? 1.0 / ties : 0.0;
}

inline Matrix dense_generator(const lbnet::NetworkConfig& c,
                              const std::vector<lbnet::InventoryState>& states) {
    const std::size_t n = states.size();
    const std::size_t J = c.b.size();
    Matrix q(n, std::vector<double>(n, 0.0));
    auto find = [&](const std::vector<int>& k) {
        for (std::size_t s = 0; s < n; ++s)
            if (states[s].k == k) return s;
        throw std::logic_error("state not found");
    };
    for (std::size_t s = 0; s < n; ++s) {
        const auto& k = states[s].k;
        for (std::size_t i = 0; i < J; ++i) {
            if (k[i] > 0) {
                auto t = k;
                --t[i];
                ++t[J];
                q[s][find(t)] += c.lambda[i];
            }
            if (k[i] < c.b[i] && k[J] > 0) {
                auto t = k;
                ++t[i];
                --t[J];
                q[s][find(t)] += c.nu * route(c, k, i);
            }
            if (c.transfer_beta)
                for (std::size_t j = 0; j < J; ++j)
                    if (j != i && k[i] - k[j] >= 2) {
                        auto t = k;
                        --t[i];
                        ++t[j];
                        q[s][find(t)] += *c.transfer_beta;
                    }
        }
        double out = 0.0;
        for (std::size_t t = 0; t < n; ++t) out += q[s][t];
        q[s][s] = -out;
    }
    return q;
}

// Solves pi Q = 0, sum pi = 1 by Gaussian elimination with partial pivoting
// on Q^T with the last equation replaced by normalisation.
inline std::vector<double> stationary(const Matrix& q) {
    const std::size_t n = q.size();
    Matrix a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t col = 0; col < n; ++col) a[r][col] = q[col][r];
    for (std::size_t col = 0; col < n; ++col) a[n - 1][col] = 1.0;
    a[n - 1][n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t x = col; x <= n; ++x) a[r][x] -= f * a[col][x];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t r = 0; r < n; ++r) pi[r] = a[r][n] / a[r][r];
    return pi;
}

// Random configurations for property tests.
class ConfigDraw {
public:
    explicit ConfigDraw(std::uint64_t seed) : rng_(seed) {}

    double rate(double lo = 0.2, double hi = 5.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int level(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    lbnet::NetworkConfig config(std::vector<int> b, bool homogeneous_lambda = false) {
        lbnet::NetworkConfig c;
        c.b = std::move(b);
        const double shared = rate();
        for (std::size_t j = 0; j < c.b.size(); ++j) {
            c.lambda.push_back(homogeneous_lambda ? shared : rate());
            c.mu.push_back(lbnet::ServiceRateProfile::constant(c.lambda.back() + rate(0.5, 3.0)));
        }
        c.nu = rate();
        return c;
    }

    lbnet::NetworkConfig homogeneous(std::size_t J, int b) {
        return config(std::vector<int>(J, b), true);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace oracle
