#pragma once

// Queue side of the product form: per-location ergodicity and the marginal
// xi_j(n) = C_j^{-1} prod_{l=1}^{n} lambda_j / mu_j(l).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lbnet/model.hpp"

namespace lbnet {

struct ErgodicityReport {
    bool ergodic = true;
    std::vector<double> load_ratio;  // lambda_j / mu_j tail, one per location
    std::vector<bool> stable;        // load_ratio < 1
};

// With an eventually constant tail the series sum_n prod lambda/mu(l) converges
// iff lambda < tail rate; the head only contributes finitely many terms.
inline ErgodicityReport ergodicity_check(const NetworkConfig& config) {
    config.validate();
    ErgodicityReport r;
    for (std::size_t j = 0; j < config.locations(); ++j) {
        const double ratio = config.lambda[j] / config.mu[j].tail();
        r.load_ratio.push_back(ratio);
        r.stable.push_back(ratio < 1.0);
        r.ergodic = r.ergodic && ratio < 1.0;
    }
    return r;
}

class QueueMarginal {
public:
    QueueMarginal(const NetworkConfig& config, std::size_t j)
        : location_(j), lambda_(config.lambda.at(j)), mu_(config.mu.at(j)) {
        tail_ratio_ = lambda_ / mu_.tail();
        if (!(tail_ratio_ < 1.0))
            throw ergodicity_error("queue at location " + std::to_string(j + 1) +
                                   " is unstable (lambda >= tail service rate)");
        // Head: n = 0..m, then a geometric tail from n = m + 1 onwards.
        const std::size_t m = mu_.head().size();
        double term = 1.0;
        double sum = 1.0;
        for (std::size_t n = 1; n <= m; ++n) {
            term *= lambda_ / mu_(n);
            sum += term;
        }
        head_last_ = term;
        normalization_ = sum + term * tail_ratio_ / (1.0 - tail_ratio_);
    }

    std::size_t location() const noexcept { return location_; }
    double normalization() const noexcept { return normalization_; }
    double tail_ratio() const noexcept { return tail_ratio_; }

    // Unnormalised xi~_j(n).
    double unnormalized(std::size_t n) const {
        const std::size_t m = mu_.head().size();
        if (n <= m) {
            double term = 1.0;
            for (std::size_t l = 1; l <= n; ++l) term *= lambda_ / mu_(l);
            return term;
        }
        return head_last_ * std::pow(tail_ratio_, static_cast<double>(n - m));
    }

    double operator()(std::size_t n) const { return unnormalized(n) / normalization_; }

    // P(X_j > 0).
    double prob_nonempty() const { return 1.0 - 1.0 / normalization_; }

    // P(X_j <= n).
    double cdf(std::size_t n) const {
        double acc = 0.0;
        for (std::size_t i = 0; i <= n; ++i) acc += (*this)(i);
        return acc;
    }

private:
    std::size_t location_;
    double lambda_;
    ServiceRateProfile mu_;
    double tail_ratio_ = 0.0;
    double head_last_ = 1.0;
    double normalization_ = 1.0;
};

inline QueueMarginal queue_marginal(const NetworkConfig& config, std::size_t j) {
    config.validate();
    if (j >= config.locations()) throw precondition_error("location index out of range");
    return QueueMarginal(config, j);
}

}  // namespace lbnet
