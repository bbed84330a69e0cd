#pragma once

// Command implementations behind tools/lbnet. Each command writes a
// human-readable report to `out`, diagnostics to `err`, optional JSON/CSV
// files, and returns the process exit code.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lbnet/analysis.hpp"
#include "lbnet/closed_form.hpp"
#include "lbnet/exact_solver.hpp"
#include "lbnet/io.hpp"
#include "lbnet/recursive_solver.hpp"
#include "lbnet/simulator.hpp"

namespace lbnet::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kPropertyFailure = 2,
    kNumericalFailure = 3,
};

enum class Method { automatic, exact, closed_form, recursive };

inline Method parse_method(const std::string& name) {
    if (name == "auto") return Method::automatic;
    if (name == "exact") return Method::exact;
    if (name == "closed") return Method::closed_form;
    if (name == "recursive") return Method::recursive;
    throw invalid_config("--method", "expected auto, exact, closed or recursive");
}

struct MethodChoice {
    Method method;
    std::string note;
};

// auto: closed form when every b_j = 1, recursion for J = 2 with both levels
// above 1, exact otherwise. Explicit requests are checked, never replaced.
inline MethodChoice select_method(const NetworkConfig& config, Method requested) {
    const bool transfer = config.has_transfer();
    const bool two_deep = config.locations() == 2 && config.b[0] > 1 && config.b[1] > 1;
    switch (requested) {
        case Method::automatic:
            if (transfer) return {Method::exact, "auto: channel transfer present, exact solver"};
            if (config.unit_base_stock())
                return {Method::closed_form, "auto: all base-stock levels are 1, closed form"};
            if (two_deep)
                return {Method::recursive, "auto: two locations with b1, b2 > 1, recursive elimination"};
            if (config.locations() == 2)
                return {Method::exact, "auto: one base-stock level equals 1, outside the recursive "
                                       "algorithm; exact solver"};
            return {Method::exact, "auto: exact solver"};
        case Method::closed_form:
            if (transfer || !config.unit_base_stock())
                throw precondition_error("--method closed needs every b_j = 1 and no transfer; "
                                         "use --method exact");
            return {Method::closed_form, "requested: closed form"};
        case Method::recursive:
            if (transfer || !two_deep)
                throw precondition_error("--method recursive needs J = 2, b1 > 1, b2 > 1 and no "
                                         "transfer; use --method exact");
            return {Method::recursive, "requested: recursive elimination"};
        case Method::exact:
            return {Method::exact, "requested: exact solver"};
    }
    return {Method::exact, ""};
}

inline ThetaMeasure solve_with(const NetworkConfig& config, Method method) {
    switch (method) {
        case Method::closed_form: return theta_unit_base_stock(config);
        case Method::recursive: return solve_theta_recursive_any_order(config);
        default: return solve_theta_exact(config);
    }
}

namespace detail {

inline std::vector<std::vector<double>> all_inventory_marginals(const ThetaMeasure& theta) {
    std::vector<std::vector<double>> m;
    for (std::size_t j = 0; j < theta.locations(); ++j) m.push_back(inventory_marginal(theta, j));
    return m;
}

inline void print_theta(std::ostream& out, const ThetaMeasure& theta) {
    const std::size_t J = theta.locations();
    out << "theta (" << to_string(theta.provenance) << "):\n ";
    for (std::size_t j = 0; j <= J; ++j) out << std::setw(5) << ("k" + std::to_string(j + 1));
    out << "  weight\n";
    for (std::size_t i = 0; i < theta.size(); ++i) {
        out << ' ';
        for (int v : theta.states[i].k) out << std::setw(5) << v;
        out << "  " << format_number(theta.weights[i]) << '\n';
    }
}

inline void print_marginals(std::ostream& out, const std::vector<std::vector<double>>& m) {
    out << "inventory marginals P(Y_j = l):\n";
    for (std::size_t j = 0; j < m.size(); ++j) {
        out << "  location " << j + 1 << ':';
        for (double p : m[j]) out << ' ' << format_number(p);
        out << '\n';
    }
}

inline void print_ergodicity(std::ostream& out, const ErgodicityReport& e) {
    out << "ergodic: " << (e.ergodic ? "yes" : "no") << '\n';
    for (std::size_t j = 0; j < e.load_ratio.size(); ++j)
        out << "  location " << j + 1 << ": lambda / mu_tail = " << format_number(e.load_ratio[j])
            << (e.stable[j] ? "" : "  (unstable)") << '\n';
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const invalid_config& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kValidationError;
    } catch (const precondition_error& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const ergodicity_error& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw invalid_config("<output>", "cannot write " + path);
    return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct SolveOptions {
    std::string method = "auto";
    std::optional<std::string> json_path;
    std::optional<std::string> csv_path;
};

inline int cmd_solve(const NetworkConfig& config, const SolveOptions& opts, std::ostream& out,
                     std::ostream& err) {
    return detail::guarded(err, [&] {
        config.validate();
        const MethodChoice choice = select_method(config, parse_method(opts.method));
        const ThetaMeasure theta = solve_with(config, choice.method);
        const ReducedGenerator gen = build_reduced_generator(config);
        const double residual = balance_residual(gen, theta);
        const auto marginals = detail::all_inventory_marginals(theta);
        const auto ergodic = ergodicity_check(config);

        out << "method: " << to_string(theta.provenance) << "  [" << choice.note << "]\n";
        detail::print_ergodicity(out, ergodic);
        detail::print_theta(out, theta);
        detail::print_marginals(out, marginals);
        out << "queue marginals xi_j(n) = C_j^-1 prod lambda_j / mu_j(l):\n";
        std::vector<std::optional<QueueMarginal>> queues;
        for (std::size_t j = 0; j < config.locations(); ++j) {
            if (ergodic.stable[j]) {
                queues.emplace_back(queue_marginal(config, j));
                out << "  location " << j + 1 << ": C = " << format_number(queues.back()->normalization())
                    << ", xi(0) = " << format_number((*queues.back())(0))
                    << ", tail ratio = " << format_number(queues.back()->tail_ratio()) << '\n';
            } else {
                queues.emplace_back();
                out << "  location " << j + 1 << ": not normalisable (unstable queue)\n";
            }
        }
        out << "balance residual |theta Q_red|_inf / max rate: " << format_number(residual) << '\n';

        if (opts.json_path) {
            auto f = detail::open_output(*opts.json_path);
            JsonWriter w(f);
            w.begin_object();
            w.field("command", "solve");
            w.field("method", std::string(to_string(theta.provenance)));
            w.field("method_note", choice.note);
            write_theta_json(w, theta);
            w.key("inventory_marginals").begin_array();
            for (const auto& m : marginals) w.values(m);
            w.end_array();
            w.field("ergodic", ergodic.ergodic);
            w.key("queues").begin_array();
            for (std::size_t j = 0; j < config.locations(); ++j) {
                w.begin_object();
                w.field("location", j + 1);
                w.field("lambda", config.lambda[j]);
                w.field("mu_head", config.mu[j].head());
                w.field("mu_tail", config.mu[j].tail());
                w.field("load_ratio", ergodic.load_ratio[j]);
                w.key("normalization");
                if (queues[j]) w.value(queues[j]->normalization()); else w.null();
                w.end_object();
            }
            w.end_array();
            w.key("checks").begin_object();
            w.field("balance_residual", residual);
            w.end_object();
            w.end_object();
            f << '\n';
        }
        if (opts.csv_path) {
            auto f = detail::open_output(*opts.csv_path);
            write_theta_csv(f, theta);
            f << '\n';
            write_marginals_csv(f, marginals);
            f << '\n';
            write_checks_csv(f, {{"balance_residual", residual}});
        }
        return kSuccess;
    });
}

// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = true;
};

struct VerifyOptions {
    std::uint64_t events = 0;  // 0: scale with the size of the joint support
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    std::size_t threads = 1;
    std::optional<std::string> json_path;
};

struct VerifyReport {
    std::vector<Check> checks;
    std::vector<std::string> notices;

    void add(std::string name, double value, double tolerance) {
        checks.push_back({std::move(name), value, tolerance, value <= tolerance});
    }
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// The plug-in decoupling TV is biased upwards by roughly sqrt(cells / events),
// so the default budget grows with the number of (clipped n, k) cells.
inline std::uint64_t default_verify_events(const NetworkConfig& config, int n_obs) {
    std::uint64_t cells = StateIndex(config.b).size();
    for (std::size_t j = 0; j < config.locations(); ++j) cells *= static_cast<std::uint64_t>(n_obs + 1);
    return std::max<std::uint64_t>(1'000'000, 400 * cells);
}

// Runs every applicable solver and property check on one configuration.
inline VerifyReport run_verification(const NetworkConfig& config, const VerifyOptions& opts) {
    config.validate();
    VerifyReport rep;
    const ReducedGenerator gen = build_reduced_generator(config);
    const ThetaMeasure exact = solve_theta_exact(gen);
    rep.add("exact.balance_residual", balance_residual(gen, exact), kBalanceTolerance);

    std::vector<std::pair<std::string, ThetaMeasure>> thetas{{"exact", exact}};
    const bool transfer = config.has_transfer();
    if (transfer) {
        rep.notices.push_back("channel transfer present: closed form, recursion and cut identities "
                              "describe the base model only and are skipped");
        int escapes = 0;
        for (const auto& s : gen.states)
            for_each_reduced_transition(config, s, [&](const InventoryState& t, double) {
                escapes += is_valid_state(config.b, t) ? 0 : 1;
            });
        rep.add("transfer.inventory_conservation_violations", escapes, 0.0);
    } else {
        if (config.unit_base_stock()) {
            const ThetaMeasure cf = theta_unit_base_stock(config);
            rep.add("closed_form.tv_vs_exact", total_variation(cf, exact), 1e-12);
            thetas.emplace_back("closed_form", cf);
        }
        if (config.locations() == 2 && config.b[0] > 1 && config.b[1] > 1) {
            const bool swapped = config.b[0] < config.b[1];
            const NetworkConfig oriented = swapped ? swap_locations(config) : config;
            const ThetaMeasure rec_oriented = solve_theta_recursive(oriented);
            const ThetaMeasure rec = swapped ? swap_locations(rec_oriented) : rec_oriented;
            rep.add("recursive.tv_vs_exact", total_variation(rec, exact), 1e-10);
            const ThetaTable table = to_table(rec_oriented);
            double worst = 0.0;
            for (int k1 = 0; k1 <= table.b1(); ++k1)
                for (int k2 = 0; k2 <= table.b2(); ++k2)
                    worst = std::max(worst, std::abs(gbe_residual(table, oriented, {k1, k2}).a));
            rep.add("recursive.gbe_residual", worst, kIdentityTolerance);
            thetas.emplace_back("recursive", rec);
        } else if (config.locations() == 2) {
            rep.notices.push_back("recursive elimination needs b1, b2 > 1; skipped");
        }
        for (const auto& [name, theta] : thetas) {
            if (config.homogeneous())
                rep.add(name + ".cut_homogeneous", check_cut_homogeneous(theta, config),
                        kIdentityTolerance);
            if (config.locations() == 2) {
                const bool swapped = config.b[0] < config.b[1];
                const auto r = swapped ? check_cut_heterogeneous(swap_locations(theta), swap_locations(config))
                                       : check_cut_heterogeneous(theta, config);
                rep.add(name + ".cut_geometric_range", r.geometric_range, kIdentityTolerance);
                rep.add(name + ".cut_mid_range", r.mid_range, kIdentityTolerance);
                rep.add(name + ".cut_full_level", r.full_level, kIdentityTolerance);
                rep.add(name + ".cut_second_location", r.second_location, kIdentityTolerance);
                rep.add(name + ".geometric_relation", r.geometric_relation, kIdentityTolerance);
            }
        }
    }
    if (config.homogeneous())
        for (const auto& [name, theta] : thetas)
            rep.add(name + ".symmetry", check_symmetry(theta, config), 1e-12);

    // theta must not depend on the service profiles at all.
    NetworkConfig perturbed = config;
    for (auto& m : perturbed.mu) m = ServiceRateProfile({0.5 * m.tail(), 3.0}, 2.0 * m.tail() + 1.0);
    const ThetaMeasure other = solve_theta_exact(perturbed);
    rep.add("insensitivity.theta_mismatches",
            other.weights == exact.weights ? 0.0 : 1.0, 0.0);

    const auto ergodic = ergodicity_check(config);
    if (!ergodic.ergodic) {
        rep.notices.push_back("configuration is not ergodic: product-form and simulation checks "
                              "skipped (theta checks above need no ergodicity)");
        return rep;
    }
    const TruncatedDistribution pi = solve_pi_truncated(config, 8);
    rep.add("product_form.factorization_defect", factorization_defect(pi), 1e-12);

    SimulationOptions so;
    so.total_events = opts.events ? opts.events : default_verify_events(config, so.n_obs);
    so.seed = opts.seed;
    rep.notices.push_back("simulating " + std::to_string(so.total_events) + " events x " +
                          std::to_string(opts.replications) + " replication(s)");
    const auto runs = simulate_replications(config, so, opts.replications, opts.threads);
    const SimulationResult sim = merge(runs);
    rep.add("simulation.theta_tv", total_variation(sim.theta, exact), 0.02);
    rep.add("simulation.decoupling_tv", decoupling_test(sim), 0.03);
    return rep;
}

inline int cmd_verify(const NetworkConfig& config, const VerifyOptions& opts, std::ostream& out,
                      std::ostream& err) {
    return detail::guarded(err, [&] {
        const VerifyReport rep = run_verification(config, opts);
        for (const auto& n : rep.notices) out << "note: " << n << '\n';
        for (const auto& c : rep.checks)
            out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(44) << c.name
                << std::right << format_number(c.value) << "  (tol " << format_number(c.tolerance)
                << ")\n";
        if (opts.json_path) {
            auto f = detail::open_output(*opts.json_path);
            JsonWriter w(f);
            w.begin_object();
            w.field("command", "verify");
            w.field("passed", rep.all_passed());
            w.key("checks").begin_array();
            for (const auto& c : rep.checks) {
                w.begin_object();
                w.field("name", c.name);
                w.field("value", c.value);
                w.field("tolerance", c.tolerance);
                w.field("passed", c.passed);
                w.end_object();
            }
            w.end_array();
            w.field("notices", rep.notices);
            w.end_object();
            f << '\n';
        }
        if (!rep.all_passed()) {
            for (const auto& c : rep.checks)
                if (!c.passed)
                    err << "failed: " << c.name << " = " << format_number(c.value) << " > "
                        << format_number(c.tolerance) << '\n';
            return kPropertyFailure;
        }
        out << "all checks passed\n";
        return kSuccess;
    });
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::uint64_t events = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    std::size_t threads = 1;
    int n_obs = 6;
    std::optional<std::string> json_path;
    std::optional<std::string> csv_path;
};

// Analytic xi_j on 0..n_obs with the tail mass lumped into the last cell.
inline std::vector<double> clipped_queue_marginal(const QueueMarginal& q, int n_obs) {
    std::vector<double> p(static_cast<std::size_t>(n_obs + 1));
    double below = 0.0;
    for (int n = 0; n < n_obs; ++n) {
        p[static_cast<std::size_t>(n)] = q(static_cast<std::size_t>(n));
        below += p[static_cast<std::size_t>(n)];
    }
    p.back() = 1.0 - below;
    return p;
}

inline int cmd_simulate(const NetworkConfig& config, const SimulateOptions& opts, std::ostream& out,
                        std::ostream& err) {
    return detail::guarded(err, [&] {
        config.validate();
        const auto ergodic = ergodicity_check(config);
        if (!ergodic.ergodic) {
            detail::print_ergodicity(err, ergodic);
            throw ergodicity_error("simulation refused: some lambda_j >= mu_j tail");
        }
        SimulationOptions so;
        so.total_events = opts.events;
        so.seed = opts.seed;
        so.n_obs = opts.n_obs;
        const auto runs = simulate_replications(config, so, opts.replications, opts.threads);
        const SimulationResult sim = merge(runs);
        const ThetaMeasure exact = solve_theta_exact(config);

        std::vector<std::pair<std::string, double>> checks;
        checks.emplace_back("theta_tv", total_variation(sim.theta, exact));
        for (std::size_t j = 0; j < config.locations(); ++j) {
            const auto analytic = clipped_queue_marginal(queue_marginal(config, j), opts.n_obs);
            checks.emplace_back("xi" + std::to_string(j + 1) + "_tv",
                                total_variation(sim.queue_marginals[j], analytic));
        }
        checks.emplace_back("decoupling_tv", decoupling_test(sim));
        if (runs.size() > 1) {
            double lo = 1.0, hi = 0.0;
            for (const auto& r : runs) {
                const double tv = total_variation(r.theta, exact);
                lo = std::min(lo, tv);
                hi = std::max(hi, tv);
            }
            checks.emplace_back("theta_tv_replication_min", lo);
            checks.emplace_back("theta_tv_replication_max", hi);
        }

        out << "events: " << sim.events << " in " << runs.size() << " replication(s), first seed "
            << opts.seed << '\n';
        out << "recorded time: " << format_number(sim.simulated_time) << '\n';
        detail::print_theta(out, sim.theta);
        out << "queue marginals (clipped at " << opts.n_obs << "):\n";
        for (std::size_t j = 0; j < sim.queue_marginals.size(); ++j) {
            out << "  location " << j + 1 << ':';
            for (double p : sim.queue_marginals[j]) out << ' ' << format_number(p);
            out << '\n';
        }
        for (const auto& [name, v] : checks) out << name << ": " << format_number(v) << '\n';

        if (opts.json_path) {
            auto f = detail::open_output(*opts.json_path);
            JsonWriter w(f);
            w.begin_object();
            w.field("command", "simulate");
            w.field("events", sim.events);
            w.field("replications", runs.size());
            w.field("seed", opts.seed);
            w.field("simulated_time", sim.simulated_time);
            w.field("n_obs", opts.n_obs);
            write_theta_json(w, sim.theta);
            w.key("queue_marginals").begin_array();
            for (const auto& m : sim.queue_marginals) w.values(m);
            w.end_array();
            w.key("inventory_marginals").begin_array();
            for (const auto& m : detail::all_inventory_marginals(sim.theta)) w.values(m);
            w.end_array();
            w.key("checks").begin_object();
            for (const auto& [name, v] : checks) w.field(name, v);
            w.end_object();
            w.end_object();
            f << '\n';
        }
        if (opts.csv_path) {
            auto f = detail::open_output(*opts.csv_path);
            write_theta_csv(f, sim.theta);
            f << '\n';
            write_marginals_csv(f, detail::all_inventory_marginals(sim.theta));
            f << '\n';
            write_checks_csv(f, checks);
        }
        return kSuccess;
    });
}

}  // namespace lbnet::cli
