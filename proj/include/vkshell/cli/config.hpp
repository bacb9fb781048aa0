#pragma once

#include "vkshell/growth.hpp"
#include "vkshell/material.hpp"
#include "vkshell/shell.hpp"
#include "vkshell/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace vkshell::cli {

struct GridConfig {
    int nx = 64;
    int ny = 64;
    Box domain;
    BoundaryMode bc = BoundaryMode::Periodic;
};

enum class Command { Verify, Minimize, SolveVK, Scaling };
const char* to_string(Command c);

struct RunConfig {
    Command command = Command::Verify;
    Functional functional = Functional::I40;
    VKModel model = VKModel::Old;
    /// Negative selects each solver's default.
    double tol = -1.0;
    int max_iter = 10000;
    std::vector<double> h_list{0.1, 0.07, 0.05, 0.03, 0.02, 0.01};
    int n_t = 5;
    PenaltySchedule penalty;
    double relaxation = 0.7;
    EnergyRoute route = EnergyRoute::Direct;
    std::uint64_t seed = 1;
    /// "zero", "random" or "state"
    std::string init = "zero";
    double init_amplitude = 1e-3;
    std::string output_dir = "out";
};

struct ExperimentConfig {
    GridConfig grid;
    double mu = 1.0;
    double lambda = 1.0;
    GrowthSpec growth;
    ClosedForm v0;
    double alpha = 1.0;
    std::optional<RecoveryState> state;
    RunConfig run;

    /// Canonical (fully defaulted) form of the document and its FNV-1a hash.
    nlohmann::json resolved;
    std::string hash;

    Grid2D make_grid() const;
    Material material() const;
};

/// Throws ConfigError on schema violations (unknown keys, wrong types, bad values).
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

ClosedForm parse_closed_form(const nlohmann::json& j, const Box& domain, const std::string& where);
nlohmann::json closed_form_to_json(const ClosedForm& f);

} // namespace vkshell::cli
