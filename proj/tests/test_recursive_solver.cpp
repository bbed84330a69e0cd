#include <catch2/catch_amalgamated.hpp>

#include "lbnet/exact_solver.hpp"
#include "lbnet/recursive_solver.hpp"
#include "support/oracle.hpp"

using namespace lbnet;
using Catch::Approx;

namespace {

NetworkConfig pair(int b1, int b2, double l1, double l2, double nu) {
    NetworkConfig c;
    c.lambda = {l1, l2};
    c.mu = {ServiceRateProfile::constant(l1 + 1.0), ServiceRateProfile::constant(l2 + 1.0)};
    c.b = {b1, b2};
    c.nu = nu;
    return c;
}

}  // namespace

TEST_CASE("balance residual of a unit indicator at (2,0)") {
    const auto c = pair(2, 2, 1.0, 2.0, 3.0);
    ThetaTable t(2, 2);
    for (int k1 = 0; k1 <= 2; ++k1)
        for (int k2 = 0; k2 <= 2; ++k2) t.set({k1, k2}, AffineKappa::constant(0.0));
    t.set({2, 0}, AffineKappa::constant(1.0));
    // outflow of (2,0): consumption at location 1 (1) + replenishment of location 2 (3)
    CHECK(gbe_residual(t, c, {2, 0}).a == 4.0);

    // The same number from the dense generator: -(e_(2,0) Q)_(2,0).
    const auto gen = build_reduced_generator(c);
    const int stock[2] = {2, 0};
    const auto i = static_cast<Eigen::Index>(gen.index.of_stock(stock));
    CHECK(-gen.rates(i, i) == 4.0);
    // (2,0) feeds (2,1) by replenishment and (1,0) by consumption
    CHECK(gbe_residual(t, c, {2, 1}).a == -3.0);
    CHECK(gbe_residual(t, c, {1, 0}).a == -1.0);
}

TEST_CASE("balance terms match the dense generator column") {
    oracle::ConfigDraw draw(41);
    const auto c = draw.config({4, 3});
    const auto gen = build_reduced_generator(c);
    for (int k1 = 0; k1 <= 4; ++k1)
        for (int k2 = 0; k2 <= 3; ++k2) {
            const int at[2] = {k1, k2};
            const auto col = static_cast<Eigen::Index>(gen.index.of_stock(at));
            double predecessors = 0.0;
            for (const auto& [x, coef] : gbe_terms(c, {k1, k2})) {
                const int from[2] = {x.k1, x.k2};
                const auto row = static_cast<Eigen::Index>(gen.index.of_stock(from));
                CHECK(coef == Approx(-gen.rates(row, col)));
                if (row != col) predecessors += -coef;
            }
            double column = gen.rates.col(col).sum() - gen.rates(col, col);
            CHECK(predecessors == Approx(column));
        }
}

TEST_CASE("recursive elimination agrees with the exact solve") {
    oracle::ConfigDraw draw(42);
    for (int b1 = 2; b1 <= 6; ++b1)
        for (int b2 = 2; b2 <= b1; ++b2)
            for (int rep = 0; rep < 3; ++rep) {
                const auto c = draw.config({b1, b2});
                const auto rec = solve_theta_recursive(c);
                const auto exact = solve_theta_exact(c);
                INFO("b = (" << b1 << "," << b2 << ")");
                CHECK(total_variation(rec, exact) <= 1e-10);
                CHECK(rec.provenance == Provenance::recursive);
                const ThetaTable t = to_table(rec);
                for (int k1 = 0; k1 <= b1; ++k1)
                    for (int k2 = 0; k2 <= b2; ++k2)
                        CHECK(std::abs(gbe_residual(t, c, {k1, k2}).a) <= 1e-10);
            }
}

TEST_CASE("homogeneous rates and equal levels") {
    const auto c = pair(3, 3, 1.0, 1.0, 1.0);
    CHECK(total_variation(solve_theta_recursive(c), solve_theta_exact(c)) <= 1e-12);
}

TEST_CASE("phases run from k2 = b2 down to 1 and each closes its unknown") {
    oracle::ConfigDraw draw(43);
    const auto c = draw.config({5, 4});
    std::vector<int> rows;
    std::size_t previous = 0;
    solve_theta_recursive_table(c, [&](int k2, const ThetaTable& t) {
        rows.push_back(k2);
        CHECK(t.fully_resolved());
        CHECK(t.derived_count() > previous);
        previous = t.derived_count();
    });
    CHECK(rows == std::vector<int>{4, 3, 2, 1});
    CHECK(previous == 30);
}

TEST_CASE("b1 < b2 is handled by relabelling") {
    oracle::ConfigDraw draw(44);
    const auto c = draw.config({2, 4});
    CHECK_THROWS_AS(solve_theta_recursive(c), precondition_error);
    const auto theta = solve_theta_recursive_any_order(c);
    CHECK(theta.base_stock == std::vector<int>{2, 4});
    CHECK(total_variation(theta, solve_theta_exact(c)) <= 1e-10);
}

TEST_CASE("preconditions") {
    oracle::ConfigDraw draw(45);
    CHECK_THROWS_AS(solve_theta_recursive(draw.config({3, 1})), precondition_error);
    CHECK_THROWS_AS(solve_theta_recursive(draw.config({2, 2, 2})), precondition_error);
    auto c = draw.homogeneous(2, 3);
    c.transfer_beta = 0.5;
    CHECK_THROWS_AS(solve_theta_recursive(c), precondition_error);
    c.transfer_beta = 0.0;
    CHECK(total_variation(solve_theta_recursive(c), solve_theta_exact(c)) <= 1e-10);
}

TEST_CASE("affine bookkeeping and sequencing") {
    const AffineKappa x{1.0, 2.0};
    CHECK((x + AffineKappa::unknown()) == AffineKappa{1.0, 3.0});
    CHECK((2.0 * x - AffineKappa::constant(1.0)) == AffineKappa{1.0, 4.0});
    CHECK(x.resolve(0.5) == 2.0);
    CHECK_FALSE(x.resolved());

    ThetaTable t(2, 2);
    CHECK_THROWS_AS(t.at({1, 1}), sequencing_error);
    CHECK_THROWS_AS(t.set({3, 0}, x), precondition_error);
    t.set({1, 1}, x);
    t.substitute(1.0);
    CHECK(t.at({1, 1}) == AffineKappa::constant(3.0));

    // a closing equation with no kappa in it cannot determine kappa
    const auto c = pair(2, 2, 1.0, 2.0, 3.0);
    for (int k1 = 0; k1 <= 2; ++k1)
        for (int k2 = 0; k2 <= 2; ++k2) t.set({k1, k2}, AffineKappa::constant(1.0));
    CHECK_THROWS_AS(detail::close_phase(t, c, {2, 1}), degenerate_elimination);
    // deriving a term the equation does not contain
    CHECK_THROWS_AS(detail::derive(t, c, {0, 0}, {2, 2}), sequencing_error);
}
