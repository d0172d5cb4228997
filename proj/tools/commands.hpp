#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "latinhib/config.hpp"

namespace latinhib::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_not_equitable = 2,
    exit_not_converged = 3,
    exit_validation = 4,
};

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Compartment (A-first index) that receives the symmetry-breaking seed:
/// seed 0 picks the first A compartment, any other seed draws uniformly.
std::size_t seed_compartment(std::uint64_t seed, std::size_t compartments);

int cmd_analyze(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_validate(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Loads the config and dispatches by name; config problems exit with 1.
int run(const std::string& command, const std::filesystem::path& config, const CommandOptions& opt, std::ostream& out,
        std::ostream& err);

}  // namespace latinhib::cli
