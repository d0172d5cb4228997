#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "latinhib/channel1d.hpp"
#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/patterning.hpp"
#include "latinhib/simulate.hpp"
#include "latinhib/sweep.hpp"

namespace latinhib {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulateSettings {
    double t_end = 200.0 * 3600.0;  // s
    double seed_amount = 1e-12;     // M
    SimulationControls controls;
};

struct ValidateSettings {
    bool compare_pde = true;        // two-compartment graphs only
    std::size_t pde_cells = 50;
    double pde_t_end = 250.0 * 3600.0;  // s
    double quotient_tol = 1e-10;
    double jacobian_tol = 1e-8;     // relative, block assembly vs direct Jacobian
};

//
// Everything one CLI invocation needs. Lengths are read in micrometres and
// times in hours, and stored here in meters and seconds.
//
struct ExperimentConfig {
    CompartmentGraph graph = CompartmentGraph::pair(500e-6, 1.0, 4.9e-10);
    CorrectionMode correction = CorrectionMode::none;
    ParameterSet params_a;
    std::optional<ParameterSet> params_b;
    FixedPointOptions fixed_points;
    SimulateSettings simulate;
    SweepSpec sweep = SweepSpec::defaults();
    ValidateSettings validate;

    const ParameterSet& b() const { return params_b ? *params_b : params_a; }
    NetworkModel model() const;
};

/// Parses and validates a config document. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file and parses it; I/O and syntax problems are ConfigErrors.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace latinhib
