#pragma once

// Stationary measure of the inventory-replenishment subsystem by direct
// elimination (Grassmann-Taksar-Heyman state reduction). The reduction only
// adds, multiplies and divides non-negative numbers, so every weight comes out
// strictly positive and accurate to working precision relative to itself,
// which matters because theta spans many orders of magnitude once J and b grow.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lbnet/generator.hpp"
#include "lbnet/queue_marginal.hpp"
#include "lbnet/theta.hpp"

namespace lbnet {

inline constexpr double kBalanceTolerance = 1e-12;  // relative to max |rate|

// max_k |(theta Q_red)_k| / max |rate|.
inline double balance_residual(const ReducedGenerator& gen, const ThetaMeasure& theta) {
    const Eigen::Map<const Eigen::RowVectorXd> w(theta.weights.data(),
                                                 static_cast<Eigen::Index>(theta.size()));
    return (w * gen.rates).cwiseAbs().maxCoeff() / gen.max_rate();
}

inline ThetaMeasure solve_theta_exact(const ReducedGenerator& gen) {
    const auto n = static_cast<Eigen::Index>(gen.size());
    if (gen.rates.rows() != n || gen.rates.cols() != n)
        throw precondition_error("generator does not match its state list");
    if (!detail::strongly_connected(gen.rates))
        throw model_error("Q_red is reducible: its null space is not one-dimensional");

    // Censor the chain onto {0..k-1} for k = n-1, ..., 1.
    Eigen::MatrixXd a = gen.rates;
    for (Eigen::Index k = n - 1; k > 0; --k) {
        const double out = a.row(k).head(k).sum();
        if (!(out > 0.0)) throw solver_error("state reduction met a zero pivot");
        a.col(k).head(k) /= out;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double akj = a(k, j);
            if (akj == 0.0) continue;
            for (Eigen::Index i = 0; i < k; ++i)
                if (i != j) a(i, j) += a(i, k) * akj;
        }
    }
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    w[0] = 1.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) v += w[static_cast<std::size_t>(i)] * a(i, k);
        w[static_cast<std::size_t>(k)] = v;
    }

    ThetaMeasure theta;
    theta.base_stock = gen.index.base_stock();
    theta.states = gen.states;
    theta.weights = std::move(w);
    theta.provenance = Provenance::exact;
    theta.normalize();
    for (double v : theta.weights)
        if (!(v > 0.0)) throw solver_error("stationary vector is not strictly positive");

    if (balance_residual(gen, theta) > kBalanceTolerance)
        throw solver_error("balance residual above tolerance");
    return theta;
}

inline ThetaMeasure solve_theta_exact(const NetworkConfig& config) {
    return solve_theta_exact(build_reduced_generator(config));
}

// pi(n, k) = xi(n) * theta(k) on the window n_j <= n_max.
class TruncatedDistribution {
public:
    TruncatedDistribution(const NetworkConfig& config, std::size_t n_max)
        : n_max_(n_max), theta_(solve_theta_exact(config)) {
        for (std::size_t j = 0; j < config.locations(); ++j)
            queues_.emplace_back(queue_marginal(config, j));
        const std::size_t J = config.locations();
        std::size_t cells = 1;
        for (std::size_t j = 0; j < J; ++j) cells *= n_max_ + 1;
        queue_cells_ = cells;
        values_.resize(cells * theta_.size());

        std::vector<int> n(J, 0);
        for (std::size_t c = 0; c < cells; ++c) {
            double xi = 1.0;
            for (std::size_t j = 0; j < J; ++j) xi *= queues_[j](static_cast<std::size_t>(n[j]));
            for (std::size_t k = 0; k < theta_.size(); ++k)
                values_[c * theta_.size() + k] = xi * theta_.weights[k];
            for (std::size_t j = J; j-- > 0;) {
                if (++n[j] <= static_cast<int>(n_max_)) break;
                n[j] = 0;
            }
        }
        window_mass_ = 0.0;
        for (double v : values_) window_mass_ += v;
    }

    std::size_t n_max() const noexcept { return n_max_; }
    double window_mass() const noexcept { return window_mass_; }
    const ThetaMeasure& theta() const noexcept { return theta_; }
    const std::vector<QueueMarginal>& queues() const noexcept { return queues_; }
    std::size_t queue_cells() const noexcept { return queue_cells_; }

    // Queue vector n (each n_j <= n_max), inventory state by canonical index.
    double operator()(std::span<const int> n, std::size_t k) const {
        return values_[queue_cell(n) * theta_.size() + k];
    }

    std::size_t queue_cell(std::span<const int> n) const {
        std::size_t c = 0;
        for (int v : n) c = c * (n_max_ + 1) + static_cast<std::size_t>(v);
        return c;
    }

private:
    std::size_t n_max_;
    ThetaMeasure theta_;
    std::vector<QueueMarginal> queues_;
    std::size_t queue_cells_ = 0;
    std::vector<double> values_;
    double window_mass_ = 0.0;
};

inline TruncatedDistribution solve_pi_truncated(const NetworkConfig& config, std::size_t n_max) {
    config.validate();
    const auto report = ergodicity_check(config);
    if (!report.ergodic) throw ergodicity_error("configuration is not ergodic");
    return TruncatedDistribution(config, n_max);
}

}  // namespace lbnet
