#include <catch2/catch_amalgamated.hpp>

#include "lbnet/closed_form.hpp"
#include "lbnet/exact_solver.hpp"
#include "support/oracle.hpp"

using namespace lbnet;
using Catch::Approx;

namespace {

NetworkConfig unit_rates() {
    NetworkConfig c;
    c.lambda = {1.0, 1.0};
    c.mu = {ServiceRateProfile::constant(2.0), ServiceRateProfile::constant(2.0)};
    c.b = {1, 1};
    c.nu = 1.0;
    return c;
}

}  // namespace

TEST_CASE("hand-solved theta for b = (1,1), lambda = nu = 1") {
    const auto theta = solve_theta_exact(unit_rates());
    REQUIRE(theta.size() == 4);
    CHECK(theta.weights[0] == Approx(0.4).margin(1e-14));
    CHECK(theta.weights[1] == Approx(0.2).margin(1e-14));
    CHECK(theta.weights[2] == Approx(0.2).margin(1e-14));
    CHECK(theta.weights[3] == Approx(0.2).margin(1e-14));
    CHECK(theta.provenance == Provenance::exact);
    CHECK(theta.normalized);
}

TEST_CASE("exact solve agrees with Gaussian elimination") {
    oracle::ConfigDraw draw(21);
    const std::vector<std::vector<int>> shapes{{1, 1}, {2, 2}, {4, 2}, {1, 3}, {2, 2, 1}, {3, 3, 3},
                                               {2, 1, 2, 1}};
    for (const auto& b : shapes) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto c = draw.config(b);
            const auto gen = build_reduced_generator(c);
            const auto theta = solve_theta_exact(gen);
            const auto ref = oracle::stationary(oracle::dense_generator(c, gen.states));
            CHECK(total_variation(theta.weights, ref) < 1e-12);
            CHECK(balance_residual(gen, theta) <= kBalanceTolerance);
            CHECK(theta.total() == Approx(1.0).margin(1e-14));
            CHECK(*std::min_element(theta.weights.begin(), theta.weights.end()) > 0.0);
        }
    }
}

TEST_CASE("transfer chain is solved as well") {
    oracle::ConfigDraw draw(22);
    auto c = draw.homogeneous(2, 4);
    c.transfer_beta = 1.3;
    const auto gen = build_reduced_generator(c);
    const auto theta = solve_theta_exact(gen);
    const auto ref = oracle::stationary(oracle::dense_generator(c, gen.states));
    CHECK(total_variation(theta.weights, ref) < 1e-12);
}

TEST_CASE("tiny weights keep full relative accuracy") {
    // A slow supplier pushes the all-stocked state down to ~1e-22; the closed form
    // is evaluated by products only, so it is accurate entrywise.
    NetworkConfig c;
    c.lambda = {40.0, 0.05, 25.0, 0.08, 30.0, 0.1};
    c.mu.assign(6, ServiceRateProfile::constant(100.0));
    c.b.assign(6, 1);
    c.nu = 0.001;
    const auto exact = solve_theta_exact(c);
    const auto closed = theta_unit_base_stock(c);
    double smallest = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        smallest = std::min(smallest, closed.weights[i]);
        worst = std::max(worst, std::abs(exact.weights[i] / closed.weights[i] - 1.0));
    }
    CHECK(smallest < 1e-18);
    CHECK(worst < 1e-12);

    oracle::ConfigDraw draw(23);
    const auto big = draw.homogeneous(4, 3);
    const auto theta = solve_theta_exact(big);
    CHECK(*std::min_element(theta.weights.begin(), theta.weights.end()) > 0.0);
}

TEST_CASE("a reducible generator is rejected") {
    ReducedGenerator gen;
    const std::vector<int> b{1, 1};
    gen.index = StateIndex(b);
    gen.states = enumerate_inventory_states(b);
    gen.rates = Eigen::MatrixXd::Zero(4, 4);
    // two closed classes {0,1} and {2,3}
    gen.rates(0, 1) = 1.0;
    gen.rates(1, 0) = 2.0;
    gen.rates(2, 3) = 1.0;
    gen.rates(3, 2) = 1.0;
    for (Eigen::Index i = 0; i < 4; ++i) gen.rates(i, i) = -gen.rates.row(i).sum();
    CHECK_THROWS_AS(solve_theta_exact(gen), model_error);
}

TEST_CASE("balance residual flags a wrong vector") {
    const auto gen = build_reduced_generator(unit_rates());
    auto theta = solve_theta_exact(gen);
    theta.weights = {0.25, 0.25, 0.25, 0.25};
    CHECK(balance_residual(gen, theta) > 1e-3);
}

TEST_CASE("queue marginal: geometric and with a head") {
    NetworkConfig c = unit_rates();
    c.mu[0] = ServiceRateProfile::constant(4.0);
    const auto q = queue_marginal(c, 0);
    CHECK(q.normalization() == Approx(4.0 / 3.0));
    CHECK(q(0) == Approx(0.75));
    CHECK(q(3) == Approx(0.75 * std::pow(0.25, 3)));
    CHECK(q.prob_nonempty() == Approx(0.25));

    c.mu[1] = ServiceRateProfile({0.5, 1.0}, 2.0);
    const auto h = queue_marginal(c, 1);
    // terms 1, 2, 2, then 2 * (1/2)^n
    CHECK(h.unnormalized(1) == Approx(2.0));
    CHECK(h.unnormalized(2) == Approx(2.0));
    CHECK(h.unnormalized(4) == Approx(0.5));
    CHECK(h.normalization() == Approx(7.0));
    CHECK(h.cdf(400) == Approx(1.0).margin(1e-12));
}

TEST_CASE("unstable queues and truncated joint") {
    NetworkConfig c = unit_rates();
    c.mu[1] = ServiceRateProfile({5.0}, 1.0);  // tail rate equals lambda
    const auto e = ergodicity_check(c);
    CHECK_FALSE(e.ergodic);
    CHECK(e.stable[0]);
    CHECK_FALSE(e.stable[1]);
    CHECK_THROWS_AS(queue_marginal(c, 1), ergodicity_error);
    CHECK_THROWS_AS(solve_pi_truncated(c, 4), ergodicity_error);

    c.mu[1] = ServiceRateProfile::constant(3.0);
    const auto pi = solve_pi_truncated(c, 30);
    CHECK(pi.window_mass() == Approx(1.0).margin(1e-12));
    const std::vector<int> n{2, 1};
    CHECK(pi(n, 3) == Approx(pi.queues()[0](2) * pi.queues()[1](1) * pi.theta().weights[3]));
}
