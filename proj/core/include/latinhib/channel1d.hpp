#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/network.hpp"
#include "latinhib/ode.hpp"
#include "latinhib/simulate.hpp"

namespace latinhib {

//
// Finite-volume channel of length l and width w (2-D areal concentrations),
// n cells of width dx = l/n. Each end is a no-flux wall, a well-mixed
// reservoir of area w^2 (a compartment), or a held concentration. End nodes
// couple to the first/last cell over a half-cell distance.
//
enum class ChannelEnd { sealed, reservoir, fixed };

struct ChannelGeometry {
    double length = 500e-6;    // m
    double width = 500e-6;     // m; also the side of the square end compartments
    std::size_t cells = 100;   // at least 50
    double diffusivity = 4.9e-10;

    double dx() const { return length / static_cast<double>(cells); }
    void validate() const;
};

struct ChannelField {
    ChannelGeometry geom;
    ChannelEnd left_end = ChannelEnd::reservoir;
    ChannelEnd right_end = ChannelEnd::reservoir;
    Eigen::VectorXd c;     // cell concentrations, M
    double left = 0.0;     // reservoir or held value at x = 0, M
    double right = 0.0;    // same at x = l

    static ChannelField uniform(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double value);

    /// Amount in the channel and in reservoir ends (held ends excluded), M m^2.
    double total_amount() const;
    /// Cell-centre positions, m.
    Eigen::VectorXd centres() const;
};

struct StepBalance {
    double amount_before = 0.0;
    double amount_after = 0.0;
    double boundary_inflow = 0.0;  // through held ends and reservoir sources over the step
    double degraded = 0.0;         // over the step
    // (after - before) - (inflow - degraded), relative to max(before, after).
    double relative_defect() const;
};

class CflError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class StepScheme { implicit, explicit_euler };

//
// Stepper for dX/dt = D X'' - gamma X on the channel plus the end nodes, with
// optional constant production in the reservoirs. The implicit scheme is
// backward Euler with a cached sparse factorization.
//
class ChannelStepper {
public:
    ChannelStepper(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double gamma,
                   StepScheme scheme = StepScheme::implicit);
    ~ChannelStepper();
    ChannelStepper(ChannelStepper&&) noexcept;
    ChannelStepper& operator=(ChannelStepper&&) noexcept;

    /// Advances by dt. Reservoir sources are in M/s. Throws CflError when the
    /// explicit scheme is asked for dt beyond its stability limit.
    StepBalance step(ChannelField& f, double dt, double source_left = 0.0, double source_right = 0.0);

    /// Largest stable explicit step, s.
    double explicit_limit() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One step with a fresh stepper.
StepBalance step_pde(ChannelField& f, double gamma, double dt, StepScheme scheme = StepScheme::implicit);

/// Steady profile for held value u0 at x = 0 and a no-flux wall at x = l:
/// u0 cosh(kappa (l - x)) / cosh(kappa l), kappa = sqrt(gamma / D).
double analytic_profile(double x, double u0, double length, double gamma, double diffusivity);

/// Steady channel field (linear solve) for constant reservoir sources.
ChannelField steady_field(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double gamma,
                          double source_left, double source_right, double held_left = 0.0, double held_right = 0.0);

/// kappa l / sinh(kappa l): end-flux attenuation of the steady channel.
double correction_factor(double length, double gamma, double diffusivity);

/// Extra first-order loss the channel imposes on each end compartment:
/// d kappa l tanh(kappa l / 2) for compartment coupling weight d.
double channel_end_loss(double weight, double length, double gamma, double diffusivity);

enum class CorrectionMode {
    none,               // plain compartmental weights
    attenuation,        // weights times correction_factor
    attenuation_and_loss // attenuated weights plus the end loss
};

/// Network whose weights (and end losses) account for degradation inside the
/// channels; every channel is treated as an independent two-port.
NetworkModel corrected_network(const CompartmentGraph& g, const ParameterSet& params_a, const ParameterSet& params_b,
                               CorrectionMode mode);

/// Two-compartment network with channel-corrected weights.
NetworkModel corrected_pair(double length, double width_factor, double diffusivity, const ParameterSet& params_a,
                            const ParameterSet& params_b, CorrectionMode mode);

//
// Method-of-lines model of one A and one B compartment joined by a channel
// carrying both signals. State layout:
//   [A cell (4) | B cell (4) | R_A | R_B | X: A end, n cells, B end | Y: same]
//
class ChannelNetwork {
public:
    ChannelNetwork(const ChannelGeometry& g, const ParameterSet& params_a, const ParameterSet& params_b);

    Eigen::Index size() const { return 10 + 2 * chain(); }
    Eigen::Index chain() const { return static_cast<Eigen::Index>(geom_.cells) + 2; }
    Eigen::Index x_offset() const { return 10; }
    Eigen::Index y_offset() const { return 10 + chain(); }
    static constexpr Eigen::Index r_a = 8;
    static constexpr Eigen::Index r_b = 9;

    const ChannelGeometry& geometry() const { return geom_; }
    const ParameterSet& params_a() const { return params_a_; }
    const ParameterSet& params_b() const { return params_b_; }

    void rhs(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const;
    void jacobian(const Eigen::VectorXd& y, Eigen::MatrixXd& J) const;
    OdeSystem system() const;
    Eigen::VectorXd upper_bound() const;
    Eigen::VectorXd initial_state(double seed_a = 1e-12) const;
    std::vector<std::string> names() const;

    /// Fields of the two signals at state y.
    ChannelField x_field(const Eigen::VectorXd& y) const;
    ChannelField y_field(const Eigen::VectorXd& y) const;

private:
    void chain_rhs(const Eigen::VectorXd& y, Eigen::Index off, double gamma, Eigen::VectorXd& dy) const;

    ChannelGeometry geom_;
    ParameterSet params_a_;
    ParameterSet params_b_;
    double cap_end_;    // w^2
    double cap_cell_;   // w dx
    double g_end_;      // D w / (dx/2)
    double g_inner_;    // D w / dx
};

struct Observables {
    double p_I_a = 0.0;
    double p_I_b = 0.0;
    double R_a = 0.0;
    double R_b = 0.0;
    double tau_hours = 0.0;
    bool steady = false;
    bool contrasting = false;  // |R_A - R_B| > 0.5 max(R_A, R_B)
};

struct ComparisonReport {
    double length = 0.0;
    double width = 0.0;
    std::size_t cells = 0;
    double factor = 1.0;
    Observables pde;
    Observables ode_plain;
    Observables ode_corrected;       // attenuation only
    Observables ode_two_port;        // attenuation and end loss
    double max_rel_plain = 0.0;      // worst relative steady-state difference vs PDE
    double max_rel_corrected = 0.0;
    double max_rel_two_port = 0.0;
    double tau_ratio = 0.0;          // PDE / ODE (plain)
    double pde_seconds = 0.0;
    double ode_seconds = 0.0;
};

struct ComparisonOptions {
    double width_factor = 1.0;
    double diffusivity = 4.9e-10;
    std::size_t cells = 50;
    double t_end = 250.0 * 3600.0;
    SimulationControls controls;
};

/// Runs the compartmental ODE and the channel model from the same seeded start.
ComparisonReport compare_models(const ParameterSet& params_a, const ParameterSet& params_b, double length,
                                const ComparisonOptions& opt = {});

/// Steady receiver-end signal per unit sender production (s), channel model
/// versus the plain compartmental model, for a fixed channel width.
struct TransferPoint {
    double length;
    double pde;
    double ode;
    double rel_diff;
};
std::vector<TransferPoint> refinement_study(const ParameterSet& p, const std::vector<double>& lengths, double width,
                                            std::size_t cells = 200, double diffusivity = 4.9e-10);

/// CSV with header "x_um,X_M,Y_M" over the cell centres.
void write_snapshot_csv(std::ostream& os, const ChannelField& x, const ChannelField& y);

}  // namespace latinhib
