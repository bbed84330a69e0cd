#include <catch2/catch_amalgamated.hpp>

#include "lbnet/generator.hpp"
#include "support/oracle.hpp"

using namespace lbnet;

namespace {

NetworkConfig unit_pair() {
    NetworkConfig c;
    c.lambda = {1.0, 2.0};
    c.mu = {ServiceRateProfile::constant(3.0), ServiceRateProfile::constant(4.0)};
    c.b = {1, 1};
    c.nu = 3.0;
    return c;
}

}  // namespace

TEST_CASE("hand-built generator for b = (1,1)") {
    const auto gen = build_reduced_generator(unit_pair());
    // states (0,0,2), (0,1,1), (1,0,1), (1,1,0)
    Eigen::Matrix4d q;
    q << -3.0, 1.5, 1.5, 0.0,
          2.0, -5.0, 0.0, 3.0,
          1.0, 0.0, -4.0, 3.0,
          0.0, 1.0, 2.0, -3.0;
    CHECK((gen.rates - q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(gen.max_rate() == 5.0);
}

TEST_CASE("generator matches an independently assembled dense matrix") {
    oracle::ConfigDraw draw(11);
    const std::vector<std::vector<int>> shapes{{2, 2}, {3, 1}, {1, 4}, {2, 1, 3}, {2, 2, 2, 2}};
    for (const auto& b : shapes) {
        const auto c = draw.config(b);
        const auto gen = build_reduced_generator(c);
        const auto dense = oracle::dense_generator(c, gen.states);
        for (std::size_t r = 0; r < gen.size(); ++r) {
            double row = 0.0;
            for (std::size_t s = 0; s < gen.size(); ++s) {
                const auto i = static_cast<Eigen::Index>(r);
                const auto j = static_cast<Eigen::Index>(s);
                CHECK(gen.rates(i, j) == Catch::Approx(dense[r][s]).margin(1e-15));
                row += gen.rates(i, j);
            }
            CHECK(std::abs(row) < 1e-12);
        }
    }
}

TEST_CASE("reduced transitions never leave K") {
    oracle::ConfigDraw draw(12);
    auto c = draw.homogeneous(2, 4);
    c.transfer_beta = 0.7;
    for (const auto& s : enumerate_inventory_states(c.b))
        for_each_reduced_transition(c, s, [&](const InventoryState& t, double r) {
            CHECK(r > 0.0);
            CHECK(is_valid_state(c.b, t));
        });
}

TEST_CASE("transfer moves one unit from the richer to the poorer location") {
    NetworkConfig c = unit_pair();
    c.lambda = {1.0, 1.0};
    c.b = {3, 3};
    c.transfer_beta = 0.25;
    const auto from = make_inventory_state(c.b, std::vector<int>{3, 1});
    CHECK(reduced_rate(c, from, make_inventory_state(c.b, std::vector<int>{2, 2})) == 0.25);
    const auto near = make_inventory_state(c.b, std::vector<int>{2, 1});
    CHECK(reduced_rate(c, near, make_inventory_state(c.b, std::vector<int>{1, 2})) == 0.0);
    c.transfer_beta = 0.0;
    CHECK(reduced_rate(c, from, make_inventory_state(c.b, std::vector<int>{2, 2})) == 0.0);
}

TEST_CASE("reduced chain is irreducible for every admissible config") {
    oracle::ConfigDraw draw(13);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> b(static_cast<std::size_t>(draw.level(2, 4)));
        for (int& v : b) v = draw.level(1, 3);
        CHECK_NOTHROW(build_reduced_generator(draw.config(b)));
    }
}

TEST_CASE("strong connectivity detects a reducible matrix") {
    Eigen::Matrix3d q;
    q << -1, 1, 0,
          1, -1, 0,
          0, 1, -1;
    CHECK_FALSE(detail::strongly_connected(q));
    q(1, 2) = 0.5;
    CHECK(detail::strongly_connected(q));
}

TEST_CASE("full process: lost sales, idle server on stock-out, and conservation") {
    NetworkConfig c = unit_pair();
    c.b = {2, 1};
    FullState s{{3, 0}, make_inventory_state(c.b, std::vector<int>{0, 1})};
    const auto moves = full_transitions(c, s);
    // only location 2 accepts arrivals; location 1 cannot serve; one replenishment
    int arrivals = 0, services = 0, replenishments = 0;
    for (const auto& t : moves) {
        const int stock = t.target.k.k[0] + t.target.k.k[1] + t.target.k.supplier();
        CHECK(stock == 3);
        if (t.target.n[1] == 1) ++arrivals;
        if (t.target.n[0] == 2) ++services;
        if (t.target.k.k[0] == 1) ++replenishments;
    }
    CHECK(arrivals == 1);
    CHECK(services == 0);
    CHECK(replenishments == 1);

    FullState busy{{2, 0}, make_inventory_state(c.b, std::vector<int>{1, 1})};
    bool served = false;
    for_each_full_move(c, busy, [&](const Move& m, double rate) {
        if (m.kind == MoveKind::service) {
            served = true;
            CHECK(m.location == 0);
            CHECK(rate == 3.0);
        }
    });
    CHECK(served);
    apply_move(busy, Move{MoveKind::service, 0});
    CHECK(busy.n[0] == 1);
    CHECK(busy.k.k == std::vector<int>{0, 1, 2});
}

TEST_CASE("full-process replenishment and transfer rates match Q_red") {
    // With empty queues only replenishment and transfer change k.
    oracle::ConfigDraw draw(14);
    auto c = draw.homogeneous(2, 3);
    c.transfer_beta = 0.4;
    for (const auto& k : enumerate_inventory_states(c.b)) {
        FullState s{{0, 0}, k};
        for_each_full_move(c, s, [&](const Move& m, double rate) {
            if (m.kind == MoveKind::arrival) return;
            FullState t = s;
            apply_move(t, m);
            CHECK(reduced_rate(c, k, t.k) == rate);
        });
    }
}
