#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lbnet/cli.hpp"

namespace {

int with_config(const std::string& path, auto&& fn) {
    try {
        return fn(lbnet::load_config(path));
    } catch (const lbnet::invalid_config& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return lbnet::cli::kValidationError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary analysis of load-balanced production-inventory networks"};
    app.require_subcommand(1);

    std::string config_path;

    lbnet::cli::SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "compute theta, marginals and queue parameters");
    solve_cmd->add_option("config", config_path, "JSON config file")->required();
    solve_cmd->add_option("--method", solve.method, "auto | exact | closed | recursive")
        ->capture_default_str();
    solve_cmd->add_option("--json", solve.json_path, "write a JSON report");
    solve_cmd->add_option("--csv", solve.csv_path, "write a CSV report");

    lbnet::cli::VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "cross-check solvers and structural properties");
    verify_cmd->add_option("config", config_path, "JSON config file")->required();
    verify_cmd->add_option("--events", verify.events,
                           "simulated events per replication (default: scaled to the state space)");
    verify_cmd->add_option("--seed", verify.seed, "first replication seed")->capture_default_str();
    verify_cmd->add_option("--replications", verify.replications)->capture_default_str();
    verify_cmd->add_option("--threads", verify.threads)->capture_default_str();
    verify_cmd->add_option("--json", verify.json_path, "write a JSON report");

    lbnet::cli::SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "simulate the joint queue-inventory process");
    sim_cmd->add_option("config", config_path, "JSON config file")->required();
    sim_cmd->add_option("--events", sim.events, "events per replication")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "first replication seed")->capture_default_str();
    sim_cmd->add_option("--replications", sim.replications)->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads)->capture_default_str();
    sim_cmd->add_option("--n-obs", sim.n_obs, "queue lengths are clipped here")->capture_default_str();
    sim_cmd->add_option("--json", sim.json_path, "write a JSON report");
    sim_cmd->add_option("--csv", sim.csv_path, "write a CSV report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lbnet::cli::kValidationError;
    }

    if (*solve_cmd)
        return with_config(config_path, [&](const lbnet::NetworkConfig& c) {
            return lbnet::cli::cmd_solve(c, solve, std::cout, std::cerr);
        });
    if (*verify_cmd)
        return with_config(config_path, [&](const lbnet::NetworkConfig& c) {
            return lbnet::cli::cmd_verify(c, verify, std::cout, std::cerr);
        });
    return with_config(config_path, [&](const lbnet::NetworkConfig& c) {
        return lbnet::cli::cmd_simulate(c, sim, std::cout, std::cerr);
    });
}
