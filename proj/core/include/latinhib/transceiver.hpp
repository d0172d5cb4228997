#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/ode.hpp"

namespace latinhib {

/// Signal in the producing compartments, signal in the receiving compartments,
/// and bound receptor complex in the receiving compartments (all M).
struct TransceiverState {
    Eigen::VectorXd sender;
    Eigen::VectorXd receiver;
    Eigen::VectorXd complex;
};

//
// One diffusible signal: production in the sender class, diffusion over the
// whole network, receptor binding in the receiver class. The Laplacian is
// stored sender-first, so the B -> A transceiver is the A -> B one with the
// compartment indices swapped.
//
struct Transceiver {
    Eigen::MatrixXd laplacian;    // sender compartments first
    Eigen::VectorXd extra_loss;   // 1/s per compartment, same order as laplacian
    Eigen::Index n_sender = 0;
    Eigen::Index n_receiver = 0;
    double nu = 0.0;              // production per unit synthase, sender side
    double gamma = 0.0;           // signal degradation
    double k_on = 0.0;            // receptor binding, receiver side
    double k_off = 0.0;
    double p_R = 0.0;             // total receptor, receiver side

    // `laplacian` and `extra_loss` are A-first; extra_loss may be empty.
    static Transceiver a_to_b(const Eigen::MatrixXd& laplacian, std::size_t count_a,
                              const ParameterSet& sender, const ParameterSet& receiver,
                              const Eigen::VectorXd& extra_loss = {});
    static Transceiver b_to_a(const Eigen::MatrixXd& laplacian, std::size_t count_a,
                              const ParameterSet& sender, const ParameterSet& receiver,
                              const Eigen::VectorXd& extra_loss = {});

    Eigen::Index size() const { return n_sender + n_receiver; }
    Eigen::Index state_size() const { return n_sender + 2 * n_receiver; }

    Eigen::VectorXd pack(const TransceiverState& s) const;
    TransceiverState unpack(const Eigen::VectorXd& v) const;
    TransceiverState zero_state() const;
};

/// Right-hand side for synthase levels `p_I` in the sender compartments.
TransceiverState transceiver_rhs(const Transceiver& tx, const TransceiverState& st, const Eigen::VectorXd& p_I);

/// Steady state: linear solve for the signal, then the binding isotherm.
TransceiverState transceiver_steady_state(const Transceiver& tx, const Eigen::VectorXd& p_I);

/// Jacobian with state order [sender, receiver, complex].
Eigen::MatrixXd transceiver_jacobian(const Transceiver& tx, const TransceiverState& st);

struct TransceiverLinearization {
    Eigen::MatrixXd A;  // state_size x state_size
    Eigen::MatrixXd B;  // state_size x n_sender
    Eigen::MatrixXd C;  // n_receiver x state_size

    /// -C A^-1 B, the slope of the steady-state map p_I -> complex.
    Eigen::MatrixXd dc_gain() const;
};
TransceiverLinearization linearize_transceiver(const Transceiver& tx, const TransceiverState& st);

struct ContractionReport {
    double measure;           // mu_1(D J D^-1), 1/s
    double k;                 // weight on the complex coordinates
    double k_upper;           // 1 + gamma / (k_on p_R)
    Eigen::VectorXd weights;  // diagonal of D
};

/// Weighted one-norm matrix measure of the Jacobian at `st`, with the complex
/// coordinates weighted by the midpoint of (1, 1 + gamma/(k_on p_R)).
ContractionReport contraction_check(const Transceiver& tx, const TransceiverState& st);

/// The transceiver under constant synthase levels as an OdeSystem.
OdeSystem transceiver_system(const Transceiver& tx, const Eigen::VectorXd& p_I);

//
// Scalar transceiver map under an equitable partition: every sender holds z,
// every receiver settles to the same complex level.
//
struct DecoupledTransceiver {
    double nu = 0.0;
    double gamma = 0.0;
    double k_on = 0.0;
    double k_off = 0.0;
    double p_R = 0.0;
    double d_out = 0.0;          // total weight from a sender into the receiver class
    double d_in = 0.0;           // total weight from a receiver into the sender class
    double loss_sender = 0.0;    // extra per-compartment loss, 1/s
    double loss_receiver = 0.0;

    static DecoupledTransceiver a_to_b(const LaplacianPair& lp, const ParameterSet& sender,
                                       const ParameterSet& receiver, double loss_a = 0.0, double loss_b = 0.0);
    static DecoupledTransceiver b_to_a(const LaplacianPair& lp, const ParameterSet& sender,
                                       const ParameterSet& receiver, double loss_a = 0.0, double loss_b = 0.0);

    // Receiver signal per unit z, d_in nu / ((g_s + d_out)(g_r + d_in) - d_out d_in).
    double signal_gain() const;
    double value(double z) const;
    double slope(double z) const;
};

/// T_AB for symmetric parameters: p_Ri / (1 + (k_off/k_on) gamma (gamma + d_ab + d_ba) / (d_ba nu z)).
double decoupled_T_AB(double z, double d_ab, double d_ba, const ParameterSet& p);
double decoupled_T_AB_prime(double z, double d_ab, double d_ba, const ParameterSet& p);

}  // namespace latinhib
