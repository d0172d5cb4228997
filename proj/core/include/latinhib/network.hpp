#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/ode.hpp"
#include "latinhib/transceiver.hpp"

namespace latinhib {

enum class Species : int { m_T = 0, p_T = 1, m_I = 2, p_I = 3 };

//
// Flat layout of the full network state, in block order
//   [A cells | X transceiver | B cells | Y transceiver]
// Cell blocks are species-major (all m_T, then all p_T, ...). The X block is
// [X in A, X in B, R_B]; the Y block is [Y in B, Y in A, R_A].
//
struct StateLayout {
    Eigen::Index n_a = 0;
    Eigen::Index n_b = 0;

    Eigen::Index size() const { return 7 * (n_a + n_b); }
    Eigen::Index cells_a() const { return 0; }
    Eigen::Index tx_ab() const { return 4 * n_a; }
    Eigen::Index cells_b() const { return 5 * n_a + 2 * n_b; }
    Eigen::Index tx_ba() const { return 5 * n_a + 6 * n_b; }

    Eigen::Index cell_a(Species s, Eigen::Index i) const { return static_cast<int>(s) * n_a + i; }
    Eigen::Index cell_b(Species s, Eigen::Index j) const { return cells_b() + static_cast<int>(s) * n_b + j; }
    Eigen::Index x_a(Eigen::Index i) const { return tx_ab() + i; }
    Eigen::Index x_b(Eigen::Index j) const { return tx_ab() + n_a + j; }
    Eigen::Index r_b(Eigen::Index j) const { return tx_ab() + n_a + n_b + j; }
    Eigen::Index y_b(Eigen::Index j) const { return tx_ba() + j; }
    Eigen::Index y_a(Eigen::Index i) const { return tx_ba() + n_b + i; }
    Eigen::Index r_a(Eigen::Index i) const { return tx_ba() + n_b + n_a + i; }

    /// Column names "<compartment>:<species>"; `ids` lists A compartments then B.
    std::vector<std::string> names(const std::vector<std::string>& ids) const;

    /// Orientation of the monotone ordering cone: +1 where the larger state
    /// must be componentwise larger, -1 where it must be smaller.
    Eigen::VectorXd cone_signs() const;
};

/// Concatenated network state with named accessors.
struct NetworkState {
    StateLayout layout;
    Eigen::VectorXd values;

    CellState cell_a(Eigen::Index i) const;
    CellState cell_b(Eigen::Index j) const;
    void set_cell_a(Eigen::Index i, const CellState& s);
    void set_cell_b(Eigen::Index j, const CellState& s);
    double r_a(Eigen::Index i) const { return values[layout.r_a(i)]; }
    double r_b(Eigen::Index j) const { return values[layout.r_b(j)]; }
};

//
// The complete compartment network: cells of both types wired to both
// transceivers through the (A-first) Laplacian.
//
class NetworkModel {
public:
    NetworkModel(const CompartmentGraph& g, const ParameterSet& params_a,
                 const std::optional<ParameterSet>& params_b = std::nullopt);

    // Explicit Laplacian (A first) with optional per-compartment extra signal loss.
    NetworkModel(Eigen::MatrixXd laplacian, std::size_t count_a, const ParameterSet& params_a,
                 const ParameterSet& params_b, Eigen::VectorXd extra_loss = {},
                 std::vector<std::string> ids = {});

    const StateLayout& layout() const { return layout_; }
    const ParameterSet& params_a() const { return params_a_; }
    const ParameterSet& params_b() const { return params_b_; }
    const Eigen::MatrixXd& laplacian() const { return laplacian_; }
    const Eigen::VectorXd& extra_loss() const { return extra_loss_; }
    const Transceiver& tx_ab() const { return tx_ab_; }
    const Transceiver& tx_ba() const { return tx_ba_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t count_a() const { return static_cast<std::size_t>(layout_.n_a); }
    std::size_t count_b() const { return static_cast<std::size_t>(layout_.n_b); }

    /// Quotient data if the A/B partition is equitable.
    std::optional<LaplacianPair> equitable(double tol = 1e-9) const;

    /// Extra loss shared by every compartment of each class, if uniform.
    std::optional<std::pair<double, double>> uniform_loss() const;

    /// Upper bounds for projection: total receptor for complexes, +inf otherwise.
    Eigen::VectorXd upper_bound() const;

    NetworkState zero_state() const;

private:
    StateLayout layout_;
    ParameterSet params_a_;
    ParameterSet params_b_;
    Eigen::MatrixXd laplacian_;
    Eigen::VectorXd extra_loss_;
    Transceiver tx_ab_;
    Transceiver tx_ba_;
    std::vector<std::string> ids_;
};

Eigen::VectorXd network_rhs(const NetworkModel& m, const Eigen::VectorXd& y);
void network_rhs(const NetworkModel& m, const Eigen::VectorXd& y, Eigen::VectorXd& dy);

/// Analytic Jacobian of network_rhs.
Eigen::MatrixXd network_jacobian(const NetworkModel& m, const Eigen::VectorXd& y);

OdeSystem network_system(const NetworkModel& m);

}  // namespace latinhib
