#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace latinhib {

/// Autonomous ODE system dx/dt = f(x) with an analytic Jacobian.
struct OdeSystem {
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)> rhs;
    std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& jac)> jacobian;
};

enum class IntegratorMethod {
    rosenbrock,  // linearly implicit, 4th order, for the stiff binding kinetics
    dopri5,      // explicit Dormand-Prince 5(4)
};

struct IntegratorControls {
    double rtol = 1e-8;
    double atol = 1e-14;  // molar
    IntegratorMethod method = IntegratorMethod::rosenbrock;
    double initial_step = 1e-3;  // s
    double min_step = 1e-12;     // s; below this the step is considered underflowed
    std::size_t max_steps = 5'000'000;
    bool project_nonnegative = true;
    // Optional per-component upper bound (e.g. total receptor); empty means none.
    Eigen::VectorXd upper_bound;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t projections = 0;     // accepted steps that needed clamping
    double projected_mass = 0.0;     // sum of all clamped magnitudes
    double max_projection = 0.0;     // largest single clamp
};

/// Raised when the step size underflows or the step budget runs out.
class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrates from t = times.front() and returns the state at every entry of
/// `times` (strictly increasing). The first returned sample is x0 itself.
std::vector<Eigen::VectorXd> integrate_samples(const OdeSystem& sys, const Eigen::VectorXd& x0,
                                               const std::vector<double>& times,
                                               const IntegratorControls& controls,
                                               IntegrationStats* stats = nullptr);

/// Evenly spaced sample grid [0, dt, 2 dt, ..., t_end] with t_end always included.
std::vector<double> sample_grid(double t_end, double dt);

}  // namespace latinhib
