#pragma once

// Recursive elimination of the balance equations of Q_red for two locations
// with b_1 >= b_2 > 1.
//
// The grid theta~(k1, k2) is filled row by row from k2 = b2 down to k2 = 1.
// Each row (phase) introduces one unknown kappa for theta~(0, k2), expresses
// the entries it reaches as a + c * kappa through balance equations that have
// exactly one undetermined term, then closes the phase with a balance equation
// whose every term is already known and solves it for kappa. The routing
// probabilities (including the 1/2 tie on the policy diagonal) come from
// routing_prob via the generator's transition enumeration.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lbnet/generator.hpp"
#include "lbnet/theta.hpp"

namespace lbnet {

// a + c * kappa.
struct AffineKappa {
    double a = 0.0;
    double c = 0.0;

    static constexpr AffineKappa constant(double v) { return {v, 0.0}; }
    static constexpr AffineKappa unknown() { return {0.0, 1.0}; }

    constexpr double resolve(double kappa) const { return a + c * kappa; }
    constexpr bool resolved() const { return c == 0.0; }

    friend constexpr AffineKappa operator+(AffineKappa x, AffineKappa y) { return {x.a + y.a, x.c + y.c}; }
    friend constexpr AffineKappa operator-(AffineKappa x, AffineKappa y) { return {x.a - y.a, x.c - y.c}; }
    friend constexpr AffineKappa operator*(double s, AffineKappa x) { return {s * x.a, s * x.c}; }
    friend constexpr AffineKappa operator*(AffineKappa x, double s) { return {s * x.a, s * x.c}; }
    friend constexpr AffineKappa operator/(AffineKappa x, double s) { return {x.a / s, x.c / s}; }
    friend constexpr AffineKappa operator-(AffineKappa x) { return {-x.a, -x.c}; }
    AffineKappa& operator+=(AffineKappa y) { return *this = *this + y; }
    AffineKappa& operator-=(AffineKappa y) { return *this = *this - y; }

    friend constexpr bool operator==(AffineKappa, AffineKappa) = default;
};

struct GridPoint {
    int k1;
    int k2;
    friend constexpr bool operator==(GridPoint, GridPoint) = default;
};

inline std::string to_string(GridPoint p) {
    return "(" + std::to_string(p.k1) + "," + std::to_string(p.k2) + ")";
}

// (b1 + 1) x (b2 + 1) grid of partially derived entries.
class ThetaTable {
public:
    ThetaTable(int b1, int b2)
        : b1_(b1), b2_(b2), cells_(static_cast<std::size_t>((b1 + 1) * (b2 + 1))) {}

    int b1() const noexcept { return b1_; }
    int b2() const noexcept { return b2_; }

    bool contains(GridPoint p) const { return p.k1 >= 0 && p.k1 <= b1_ && p.k2 >= 0 && p.k2 <= b2_; }

    bool has(GridPoint p) const { return contains(p) && cells_[slot(p)].has_value(); }

    const AffineKappa& at(GridPoint p) const {
        if (!has(p)) throw sequencing_error("entry " + to_string(p) + " has not been derived yet");
        return *cells_[slot(p)];
    }

    void set(GridPoint p, AffineKappa v) {
        if (!contains(p)) throw precondition_error("entry " + to_string(p) + " outside the grid");
        cells_[slot(p)] = v;
    }

    void substitute(double kappa) {
        for (auto& cell : cells_)
            if (cell) *cell = AffineKappa::constant(cell->resolve(kappa));
    }

    bool fully_resolved() const {
        for (const auto& cell : cells_)
            if (cell && !cell->resolved()) return false;
        return true;
    }

    std::size_t derived_count() const {
        std::size_t n = 0;
        for (const auto& cell : cells_) n += cell.has_value() ? 1 : 0;
        return n;
    }

private:
    std::size_t slot(GridPoint p) const {
        return static_cast<std::size_t>(p.k1 * (b2_ + 1) + p.k2);
    }

    int b1_;
    int b2_;
    std::vector<std::optional<AffineKappa>> cells_;
};

// Coefficients of the balance equation at `at`, written as
//   sum_x coef(x) * theta~(x) = 0,
// with coef(at) = total outflow rate and coef(x) = -q_red(x; at) for each
// predecessor x. Only positive-rate terms appear.
inline std::vector<std::pair<GridPoint, double>> gbe_terms(const NetworkConfig& config,
                                                           GridPoint at) {
    const std::vector<int>& b = config.b;
    auto state = [&](GridPoint p) {
        const int stock[2] = {p.k1, p.k2};
        return make_inventory_state(b, stock);
    };
    const InventoryState s = state(at);
    std::vector<std::pair<GridPoint, double>> terms;
    double outflow = 0.0;
    for_each_reduced_transition(config, s, [&](const InventoryState&, double r) { outflow += r; });
    terms.emplace_back(at, outflow);
    const GridPoint neighbours[4] = {{at.k1 + 1, at.k2}, {at.k1, at.k2 + 1},
                                     {at.k1 - 1, at.k2}, {at.k1, at.k2 - 1}};
    for (GridPoint x : neighbours) {
        if (x.k1 < 0 || x.k1 > b[0] || x.k2 < 0 || x.k2 > b[1]) continue;
        const double r = reduced_rate(config, state(x), s);
        if (r > 0.0) terms.emplace_back(x, -r);
    }
    return terms;
}

// Outflow minus inflow at `at`, as an affine expression in kappa.
inline AffineKappa gbe_residual(const ThetaTable& table, const NetworkConfig& config,
                                GridPoint at) {
    AffineKappa r;
    for (const auto& [x, coef] : gbe_terms(config, at)) r += coef * table.at(x);
    return r;
}

namespace detail {

inline void check_recursive_preconditions(const NetworkConfig& config) {
    config.validate();
    if (config.locations() != 2)
        throw precondition_error("recursive solver handles exactly two locations; "
                                 "use the exact solver");
    if (config.has_transfer())
        throw precondition_error("recursive solver does not cover channel transfer; "
                                 "use the exact solver");
    if (config.b[0] < config.b[1])
        throw precondition_error("recursive solver requires b1 >= b2");
    if (config.b[0] < 2 || config.b[1] < 2)
        throw precondition_error("recursive solver requires b1 > 1 and b2 > 1; use the "
                                 "closed form (all b = 1) or the exact solver");
}

// Uses the balance equation at `at` to express `target`, the only term of
// that equation not yet in the table.
inline void derive(ThetaTable& table, const NetworkConfig& config, GridPoint at, GridPoint target) {
    AffineKappa rest;
    double target_coef = 0.0;
    for (const auto& [x, coef] : gbe_terms(config, at)) {
        if (x == target)
            target_coef = coef;
        else
            rest += coef * table.at(x);
    }
    if (target_coef == 0.0)
        throw sequencing_error("balance equation at " + to_string(at) + " does not involve " +
                               to_string(target));
    table.set(target, -rest / target_coef);
}

// Solves the closing equation at `at` for kappa and substitutes it.
inline double close_phase(ThetaTable& table, const NetworkConfig& config, GridPoint at) {
    AffineKappa r;
    double scale = 0.0;
    for (const auto& [x, coef] : gbe_terms(config, at)) {
        const AffineKappa& v = table.at(x);
        r += coef * v;
        scale += std::abs(coef * v.c);
    }
    if (!(std::abs(r.c) > 1e-12 * scale) || !std::isfinite(r.c))
        throw degenerate_elimination("closing balance equation at " + to_string(at) +
                                     " does not determine kappa");
    const double kappa = -r.a / r.c;
    table.substitute(kappa);
    return kappa;
}

}  // namespace detail

// Called after each phase with the row index k2 it resolved.
using PhaseObserver = std::function<void(int k2, const ThetaTable&)>;

// Normalised grid produced by the elimination, before conversion to a measure.
inline ThetaTable solve_theta_recursive_table(const NetworkConfig& config,
                                              const PhaseObserver& observer = {}) {
    detail::check_recursive_preconditions(config);
    const int b1 = config.b[0];
    const int b2 = config.b[1];
    ThetaTable t(b1, b2);
    using detail::derive;

    t.set({b1, 0}, AffineKappa::constant(1.0));

    // Row k2 = b2 together with column k1 = b1.
    t.set({0, b2}, AffineKappa::unknown());
    for (int l = 0; l <= b2 - 2; ++l) {
        derive(t, config, {b1, l}, {b1, l + 1});
        if (!t.at({b1, l + 1}).resolved())
            throw sequencing_error("column k1 = b1 picked up a kappa dependence");
    }
    for (int k1 = 0; k1 <= b1 - 2; ++k1) derive(t, config, {k1, b2}, {k1 + 1, b2});
    derive(t, config, {b1, b2}, {b1, b2});
    derive(t, config, {b1 - 1, b2}, {b1 - 1, b2 - 1});
    detail::close_phase(t, config, {b1, b2 - 1});
    if (observer) observer(b2, t);

    // Interior rows b2 > k2 >= 2; m is the column where the row meets the
    // policy diagonal (equal deficits).
    for (int k2 = b2 - 1; k2 >= 2; --k2) {
        const int m = b1 - (b2 - k2);
        t.set({0, k2}, AffineKappa::unknown());
        for (int k1 = 0; k1 <= m - 1; ++k1) {
            if (k1 < m - 1)
                derive(t, config, {k1, k2}, {k1 + 1, k2});
            else
                derive(t, config, {k1, k2}, {k1, k2 - 1});
        }
        for (int l = k2; l >= 1; --l) derive(t, config, {m, l}, {m, l - 1});
        detail::close_phase(t, config, {m, 0});
        if (observer) observer(k2, t);
    }

    // Row k2 = 1 and the remainder of row 0.
    {
        const int m = b1 - b2 + 1;
        t.set({0, 1}, AffineKappa::unknown());
        for (int k1 = 0; k1 <= m; ++k1) {
            if (k1 < b1 - b2)
                derive(t, config, {k1, 1}, {k1 + 1, 1});
            else
                derive(t, config, {k1, 1}, {k1, 0});
        }
        for (int k1 = b1 - b2; k1 >= 1; --k1) derive(t, config, {k1, 0}, {k1 - 1, 0});
        detail::close_phase(t, config, {m, 0});
        if (observer) observer(1, t);
    }

    if (t.derived_count() != static_cast<std::size_t>((b1 + 1) * (b2 + 1)))
        throw sequencing_error("elimination left entries undetermined");

    double total = 0.0;
    for (int k1 = 0; k1 <= b1; ++k1)
        for (int k2 = 0; k2 <= b2; ++k2) total += t.at({k1, k2}).a;
    for (int k1 = 0; k1 <= b1; ++k1)
        for (int k2 = 0; k2 <= b2; ++k2) t.set({k1, k2}, t.at({k1, k2}) / total);
    return t;
}

inline ThetaMeasure to_measure(const ThetaTable& table, Provenance provenance) {
    const int b[2] = {table.b1(), table.b2()};
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>((b[0] + 1) * (b[1] + 1)));
    // Canonical order is k1-major, matching enumerate_inventory_states.
    for (int k1 = 0; k1 <= b[0]; ++k1)
        for (int k2 = 0; k2 <= b[1]; ++k2) w.push_back(table.at({k1, k2}).a);
    ThetaMeasure m = make_theta(b, std::move(w), provenance);
    m.normalized = true;
    return m;
}

inline ThetaTable to_table(const ThetaMeasure& theta) {
    if (theta.locations() != 2) throw precondition_error("grid view needs two locations");
    ThetaTable t(theta.base_stock[0], theta.base_stock[1]);
    for (int k1 = 0; k1 <= t.b1(); ++k1)
        for (int k2 = 0; k2 <= t.b2(); ++k2) {
            const int stock[2] = {k1, k2};
            t.set({k1, k2}, AffineKappa::constant(theta.at(stock)));
        }
    return t;
}

inline ThetaMeasure solve_theta_recursive(const NetworkConfig& config,
                                          const PhaseObserver& observer = {}) {
    ThetaMeasure theta = to_measure(solve_theta_recursive_table(config, observer),
                                    Provenance::recursive);
    for (double w : theta.weights)
        if (!(w > 0.0)) throw solver_error("recursive elimination produced a non-positive weight");
    return theta;
}

// Swaps the two locations when b1 < b2, solves, and maps the result back.
inline ThetaMeasure solve_theta_recursive_any_order(const NetworkConfig& config) {
    if (config.b.size() != 2 || config.b[0] >= config.b[1]) return solve_theta_recursive(config);
    NetworkConfig swapped = config;
    std::swap(swapped.lambda[0], swapped.lambda[1]);
    std::swap(swapped.mu[0], swapped.mu[1]);
    std::swap(swapped.b[0], swapped.b[1]);
    const ThetaMeasure s = solve_theta_recursive(swapped);
    std::vector<double> w;
    for (int k1 = 0; k1 <= config.b[0]; ++k1)
        for (int k2 = 0; k2 <= config.b[1]; ++k2) {
            const int stock[2] = {k2, k1};
            w.push_back(s.at(stock));
        }
    ThetaMeasure out = make_theta(config.b, std::move(w), Provenance::recursive);
    out.normalized = true;
    return out;
}

}  // namespace lbnet
