#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "latinhib/ode.hpp"

namespace latinhib {

//
// Rate constants of one cell type's inhibitory circuit, the AHL it produces
// and the receptor it expresses. Concentrations in M, rates in 1/s. Defaults
// are the reference parameter table with p_Ri = 5e-7 M.
//
struct ParameterSet {
    double k_on = 1e9;            // 1/(M s), AHL-LuxR binding
    double k_off = 50.0;          // 1/s
    double p_Ri = 5e-7;           // M, constitutive total LuxR
    double V_PLuxI = 0.26;        // 1/s
    double N_PLuxI = 5.0;         // copies
    double C = 1.5e-9;            // M per molecule
    double K_RA = 1.5e-9;         // M
    double n_RA = 2.0;
    double leak_PLuxI = 1.0 / 167.0;
    double V_PLtetO1 = 0.3;       // 1/s
    double N_PLtetO1 = 5.0;       // copies
    double K_T = 1.786e-10;       // M
    double n_T = 2.0;
    double leak_PLtetO1 = 1.0 / 5050.0;
    double gamma_X = 7.70e-4;     // 1/s, AHL degradation
    double gamma_mT = 5.78e-3;    // 1/s
    double gamma_T = 2.89e-4;     // 1/s
    double gamma_mI = 5.78e-3;    // 1/s
    double gamma_I = 1.16e-3;     // 1/s
    double eps_T = 6.224e-6;      // 1/s
    double eps_I = 2.655e-5;      // 1/s
    double nu = 0.0135;           // 1/s, AHL generation

    // Steady-state gain of the synthase chain, (eps_I/gamma_I)(V N C/gamma_mI).
    double K1() const;
    // Steady-state gain of the TetR chain, (eps_T/gamma_T)(V N C/gamma_mT).
    double K2() const;

    // Maximum of the static map T, K1 (1 + leak_PLtetO1).
    double output_bound() const;

    /// Throws std::domain_error if any invariant fails.
    void validate() const;
};

struct ParameterField {
    std::string_view name;
    double ParameterSet::*member;
    std::string_view unit;
};

/// Name, member and unit of every entry of ParameterSet, in declaration order.
std::span<const ParameterField> parameter_fields();

/// mRNA and protein for TetR (m_T, p_T) and for the AHL synthase (m_I, p_I).
struct CellState {
    double m_T = 0.0;
    double p_T = 0.0;
    double m_I = 0.0;
    double p_I = 0.0;

    Eigen::Vector4d as_vector() const { return {m_T, p_T, m_I, p_I}; }
    static CellState from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

// Hill terms shared by the cell model and the network right-hand side.
double activation(double R, const ParameterSet& p);        // R^n / (R^n + K_RA^n), 0 at R = 0
double activation_prime(double R, const ParameterSet& p);
double repression(double p_T, const ParameterSet& p);      // 1 / (1 + (p_T/K_T)^n_T)
double repression_prime(double p_T, const ParameterSet& p);

/// Time derivative of one cell under a receptor-complex input R.
CellState cell_rhs(const CellState& s, double R, const ParameterSet& p);

/// Unique steady state of the cell chain for a constant input R.
CellState cell_steady_state(double R, const ParameterSet& p);

/// Static input-output map R* -> p_I*, strictly decreasing.
double static_map_T(double R, const ParameterSet& p);

/// dT/dR; zero at R = 0 when n_RA > 1.
double static_map_T_prime(double R, const ParameterSet& p);

/// Linearization (A, B, C) of the cell at its steady state for input R.
struct CellLinearization {
    Eigen::Matrix4d A;
    Eigen::Vector4d B;
    Eigen::RowVector4d C;

    // Static gain -C A^-1 B.
    double dc_gain() const;
};
CellLinearization linearize_cell(double R, const ParameterSet& p);

/// Jacobian of cell_rhs with respect to the state (input held fixed).
Eigen::Matrix4d cell_jacobian(const CellState& s, const ParameterSet& p);

/// The cell under a constant input as an OdeSystem (state order m_T, p_T, m_I, p_I).
OdeSystem cell_system(double R, const ParameterSet& p);

}  // namespace latinhib
