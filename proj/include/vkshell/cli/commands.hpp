#pragma once

#include "vkshell/cli/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace vkshell::cli {

enum ExitCode { kOk = 0, kSolverFailure = 1, kConfigError = 2 };

struct CheckRecord {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    /// Convergence order under grid doubling, NaN when not measured or at roundoff.
    double order;
    /// Minimum order required, NaN if the check does not gate on it.
    double min_order;
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckRecord> checks;
    bool all_pass() const;
    nlohmann::json to_json(const ExperimentConfig& cfg) const;
};

VerifyReport run_verify(const ExperimentConfig& cfg);

/// Prints the JSON report to `out`; returns kOk iff every check passes.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out);

/// Executes cfg.run.command and writes summary.json, config.resolved.json, timing.json,
/// fields/*.csv and (scaling) scaling.csv into `out_dir`.  Diagnostics go to `log`.
int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir, int threads, std::ostream& log);

} // namespace vkshell::cli
