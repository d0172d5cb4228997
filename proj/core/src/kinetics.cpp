#include "latinhib/kinetics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latinhib {

double ParameterSet::K1() const { return (eps_I / gamma_I) * (V_PLtetO1 * N_PLtetO1 * C / gamma_mI); }

double ParameterSet::K2() const { return (eps_T / gamma_T) * (V_PLuxI * N_PLuxI * C / gamma_mT); }

double ParameterSet::output_bound() const { return K1() * (1.0 + leak_PLtetO1); }

std::span<const ParameterField> parameter_fields() {
    static const std::array<ParameterField, 22> fields{{
        {"k_on", &ParameterSet::k_on, "1/(M s)"},
        {"k_off", &ParameterSet::k_off, "1/s"},
        {"p_Ri", &ParameterSet::p_Ri, "M"},
        {"V_PLuxI", &ParameterSet::V_PLuxI, "1/s"},
        {"N_PLuxI", &ParameterSet::N_PLuxI, "1"},
        {"C", &ParameterSet::C, "M"},
        {"K_RA", &ParameterSet::K_RA, "M"},
        {"n_RA", &ParameterSet::n_RA, "1"},
        {"leak_PLuxI", &ParameterSet::leak_PLuxI, "1"},
        {"V_PLtetO1", &ParameterSet::V_PLtetO1, "1/s"},
        {"N_PLtetO1", &ParameterSet::N_PLtetO1, "1"},
        {"K_T", &ParameterSet::K_T, "M"},
        {"n_T", &ParameterSet::n_T, "1"},
        {"leak_PLtetO1", &ParameterSet::leak_PLtetO1, "1"},
        {"gamma_X", &ParameterSet::gamma_X, "1/s"},
        {"gamma_mT", &ParameterSet::gamma_mT, "1/s"},
        {"gamma_T", &ParameterSet::gamma_T, "1/s"},
        {"gamma_mI", &ParameterSet::gamma_mI, "1/s"},
        {"gamma_I", &ParameterSet::gamma_I, "1/s"},
        {"eps_T", &ParameterSet::eps_T, "1/s"},
        {"eps_I", &ParameterSet::eps_I, "1/s"},
        {"nu", &ParameterSet::nu, "1/s"},
    }};
    return fields;
}

void ParameterSet::validate() const {
    for (const auto& f : parameter_fields()) {
        const double v = this->*f.member;
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw std::domain_error("parameter '" + std::string(f.name) + "' must be positive and finite");
        }
    }
    if (n_RA < 1.0 || n_T < 1.0) throw std::domain_error("Hill coefficients must be >= 1");
    if (leak_PLuxI >= 1.0 || leak_PLtetO1 >= 1.0) throw std::domain_error("promoter leakages must lie in (0, 1)");
}

double activation(double R, const ParameterSet& p) {
    if (R <= 0.0) return 0.0;
    const double r = std::pow(R / p.K_RA, p.n_RA);
    return std::isinf(r) ? 1.0 : r / (1.0 + r);
}

double activation_prime(double R, const ParameterSet& p) {
    if (R <= 0.0) return p.n_RA == 1.0 ? 1.0 / p.K_RA : 0.0;
    // d/dR [x^n/(1+x^n)] with x = R/K is n x^(n-1) / (K (1+x^n)^2)
    const double x = R / p.K_RA;
    const double xn = std::pow(x, p.n_RA);
    if (std::isinf(xn)) return 0.0;
    return p.n_RA * xn / (x * p.K_RA * (1.0 + xn) * (1.0 + xn));
}

double repression(double p_T, const ParameterSet& p) {
    if (p_T <= 0.0) return 1.0;
    return 1.0 / (1.0 + std::pow(p_T / p.K_T, p.n_T));
}

double repression_prime(double p_T, const ParameterSet& p) {
    if (p_T <= 0.0) return p.n_T == 1.0 ? -1.0 / p.K_T : 0.0;
    const double x = p_T / p.K_T;
    const double xn = std::pow(x, p.n_T);
    return -p.n_T * xn / (x * p.K_T * (1.0 + xn) * (1.0 + xn));
}

namespace {

// Hill terms already treat nonpositive arguments by their limits, so this is
// safe on the slightly negative trial states an implicit integrator produces.
CellState rhs_raw(const CellState& s, double R, const ParameterSet& p) {
    return {
        p.V_PLuxI * p.N_PLuxI * p.C * (activation(R, p) + p.leak_PLuxI) - p.gamma_mT * s.m_T,
        p.eps_T * s.m_T - p.gamma_T * s.p_T,
        p.V_PLtetO1 * p.N_PLtetO1 * p.C * (repression(s.p_T, p) + p.leak_PLtetO1) - p.gamma_mI * s.m_I,
        p.eps_I * s.m_I - p.gamma_I * s.p_I,
    };
}

}  // namespace

CellState cell_rhs(const CellState& s, double R, const ParameterSet& p) {
    if (s.m_T < 0.0 || s.p_T < 0.0 || s.m_I < 0.0 || s.p_I < 0.0 || R < 0.0) {
        throw std::domain_error("cell_rhs: concentrations must be nonnegative");
    }
    return rhs_raw(s, R, p);
}

CellState cell_steady_state(double R, const ParameterSet& p) {
    if (R < 0.0) throw std::domain_error("cell_steady_state: input must be nonnegative");
    CellState s;
    s.m_T = p.V_PLuxI * p.N_PLuxI * p.C * (activation(R, p) + p.leak_PLuxI) / p.gamma_mT;
    s.p_T = p.eps_T * s.m_T / p.gamma_T;
    s.m_I = p.V_PLtetO1 * p.N_PLtetO1 * p.C * (repression(s.p_T, p) + p.leak_PLtetO1) / p.gamma_mI;
    s.p_I = p.eps_I * s.m_I / p.gamma_I;
    return s;
}

double static_map_T(double R, const ParameterSet& p) {
    if (!(R >= 0.0)) throw std::domain_error("static_map_T: input must be nonnegative");
    const double u = (p.K2() / p.K_T) * (activation(R, p) + p.leak_PLuxI);
    return p.K1() * (1.0 / (1.0 + std::pow(u, p.n_T)) + p.leak_PLtetO1);
}

double static_map_T_prime(double R, const ParameterSet& p) {
    if (!(R >= 0.0)) throw std::domain_error("static_map_T_prime: input must be nonnegative");
    const double g = p.K2() / p.K_T;
    const double u = g * (activation(R, p) + p.leak_PLuxI);
    const double un = std::pow(u, p.n_T);
    const double drep_du = -p.n_T * un / (u * (1.0 + un) * (1.0 + un));
    return p.K1() * drep_du * g * activation_prime(R, p);
}

double CellLinearization::dc_gain() const { return -(C * A.inverse() * B)(0, 0); }

Eigen::Matrix4d cell_jacobian(const CellState& s, const ParameterSet& p) {
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A(0, 0) = -p.gamma_mT;
    A(1, 0) = p.eps_T;
    A(1, 1) = -p.gamma_T;
    A(2, 1) = p.V_PLtetO1 * p.N_PLtetO1 * p.C * repression_prime(s.p_T, p);
    A(2, 2) = -p.gamma_mI;
    A(3, 2) = p.eps_I;
    A(3, 3) = -p.gamma_I;
    return A;
}

CellLinearization linearize_cell(double R, const ParameterSet& p) {
    CellLinearization lin;
    lin.A = cell_jacobian(cell_steady_state(R, p), p);
    lin.B = Eigen::Vector4d(p.V_PLuxI * p.N_PLuxI * p.C * activation_prime(R, p), 0.0, 0.0, 0.0);
    lin.C = Eigen::RowVector4d(0.0, 0.0, 0.0, 1.0);
    return lin;
}

OdeSystem cell_system(double R, const ParameterSet& p) {
    OdeSystem sys;
    sys.rhs = [R, p](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        dx = rhs_raw(CellState::from_vector(x.head<4>()), R, p).as_vector();
    };
    sys.jacobian = [p](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J = cell_jacobian(CellState::from_vector(x.head<4>()), p);
    };
    return sys;
}

}  // namespace latinhib
