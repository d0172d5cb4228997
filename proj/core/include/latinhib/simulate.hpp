#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latinhib/network.hpp"
#include "latinhib/ode.hpp"

namespace latinhib {

struct SimulationControls {
    IntegratorControls integrator;
    double sample_interval = 360.0;   // s
    double steady_threshold = 1e-10;  // 1/s, on the scaled derivative
    double steady_window = 3600.0;    // s the threshold must hold before t_end
    double scale_floor = 1e-15;       // M, denominator floor of the scaled derivative
};

struct Trajectory {
    std::vector<double> times;             // s
    std::vector<Eigen::VectorXd> states;   // one per sample
    std::vector<double> derivative_norm;   // max_i |f_i| / max(|y_i|, floor), 1/s
    std::vector<std::string> names;        // one per state component
    bool steady = false;
    double steady_since = 0.0;             // s; first sample of the final sub-threshold run
    IntegrationStats stats;

    const Eigen::VectorXd& final_state() const { return states.back(); }
    std::vector<double> series(Eigen::Index component) const;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scaled derivative norm used for steady-state detection.
double scaled_derivative_norm(const Eigen::VectorXd& y, const Eigen::VectorXd& dy, double floor);

/// All zeros except p_I = `amount` in compartment `index` (A-first numbering).
Eigen::VectorXd default_initial_state(const NetworkModel& m, std::size_t index = 0, double amount = 1e-12);

/// Integrates the full network from y0 over [0, t_end] seconds.
Trajectory integrate(const NetworkModel& m, const Eigen::VectorXd& y0, double t_end,
                     const SimulationControls& controls = {});

/// Generic variant for any OdeSystem (used for isolated blocks and the channel model).
Trajectory integrate_system(const OdeSystem& sys, const Eigen::VectorXd& y0, double t_end,
                            const SimulationControls& controls, std::vector<std::string> names = {});

/// Time constant in hours of one component's final approach. Throws
/// ConvergenceError if the trajectory is not steady or shows no decay.
double estimate_time_constant(const Trajectory& traj, Eigen::Index component);

/// Same fit on a bare series (times in s).
double estimate_time_constant(const std::vector<double>& times, const std::vector<double>& values);

/// Index of the receptor complex that ends highest: the high receiver.
Eigen::Index high_receiver_component(const NetworkModel& m, const Eigen::VectorXd& y);

struct OrderedPair {
    Eigen::VectorXd low;
    Eigen::VectorXd high;
};

struct MonotonicityReport {
    std::size_t pairs = 0;
    std::size_t violations = 0;       // pairs that lost order at some sample
    double worst = 0.0;               // largest signed-order breach, M
    std::string detail;
    bool passed() const { return violations == 0; }
};

/// Order check under a sign pattern: sign_i (high_i - low_i) >= -slack.
bool ordered(const Eigen::VectorXd& low, const Eigen::VectorXd& high, const Eigen::VectorXd& signs,
             double slack = 0.0);

/// Integrates each pair of the same system and checks the order at every
/// sample. Throws std::invalid_argument if an input pair is not ordered.
MonotonicityReport order_preservation(const OdeSystem& low_sys, const OdeSystem& high_sys,
                                      const std::vector<OrderedPair>& pairs, const Eigen::VectorXd& signs,
                                      double t_end, const SimulationControls& controls);

/// Network probe in the cone of StateLayout::cone_signs.
MonotonicityReport monotonicity_probe(const NetworkModel& m, const std::vector<OrderedPair>& pairs, double t_end,
                                      const SimulationControls& controls = {});

/// CSV: header "time_h,<names...>", one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace latinhib
