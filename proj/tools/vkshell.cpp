#include "vkshell/cli/commands.hpp"
#include "vkshell/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace vkshell::cli;

    CLI::App app{"Prestrained von Karman plates and shallow shells: identity checks and experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;

    auto* verify = app.add_subcommand("verify", "Run the identity suite and print a JSON report");
    verify->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto* run = app.add_subcommand("run", "Run the configured command and write artifacts");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--threads", threads, "Worker threads for scaling sweeps")->check(CLI::Range(1, 256));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const vkshell::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (verify->parsed()) return cmd_verify(cfg, std::cout);
        return cmd_run(cfg, out_dir, threads, std::cerr);
    } catch (const vkshell::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const vkshell::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
