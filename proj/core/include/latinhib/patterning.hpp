#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/network.hpp"
#include "latinhib/transceiver.hpp"

namespace latinhib {

/// Differentiable scalar map with an analytic derivative.
struct StaticMap {
    std::function<double(double)> value;
    std::function<double(double)> slope;

    double operator()(double z) const { return value(z); }

    /// this(inner(z)), derivative by the chain rule.
    StaticMap after(const StaticMap& inner) const;
};

//
// The four block maps of an equitable two-class network and their
// compositions T̄_A = T_A∘T_BA∘T_B∘T_AB and T̄_B = T_B∘T_AB∘T_A∘T_BA.
//
struct ReducedMaps {
    StaticMap T_A;
    StaticMap T_B;
    StaticMap T_AB;
    StaticMap T_BA;
    double bound_a = 0.0;  // sup of T_A
    double bound_b = 0.0;

    StaticMap Tbar_A() const;
    StaticMap Tbar_B() const;
    /// z̄_A -> z̄_B = T_B(T_AB(z̄_A)).
    StaticMap partner_of_a() const;
};

ReducedMaps reduced_maps(const ParameterSet& params_a, const ParameterSet& params_b,
                         const DecoupledTransceiver& ab, const DecoupledTransceiver& ba);

/// Maps for an equitable model (throws std::invalid_argument otherwise).
ReducedMaps reduced_maps(const NetworkModel& m);

/// Maps for symmetric parameters and the given quotient weights.
StaticMap compose_Tbar(const ParameterSet& p, double d_ab, double d_ba);

enum class Stability { stable, unstable, marginal };
const char* to_string(Stability s);

struct FixedPoint {
    double z_a;
    double z_b;
    double slope;
    Stability label;
};

struct FixedPointReport {
    std::vector<FixedPoint> points;  // ascending in z_a
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool is_patterned = false;
    std::optional<std::size_t> near_homogeneous;  // index into points
};

struct FixedPointOptions {
    int grid_points = 4096;
    double grid_floor = 1e-15;       // M, start of the log-spaced part
    int linear_fill = 64;            // linear points in [0, grid_floor]
    double dedupe_rel = 1e-3;
    double marginal_band = 1e-6;     // |slope - 1| below this is marginal
};

/// Roots of T̄(z) - z on [0, z_max] with slope and label. z_max must bound T̄.
std::vector<FixedPoint> scalar_fixed_points(const StaticMap& Tbar, double z_max,
                                            const FixedPointOptions& opt = {});

/// Fixed points of T̄_A, paired with z̄_B, over [0, 1.01 * sup T_A].
FixedPointReport find_fixed_points(const ReducedMaps& maps, const FixedPointOptions& opt = {});

struct Classification {
    bool patterned = false;
    bool marginal = false;  // near-homogeneous slope inside the marginal band
};

Classification classify_patterning(const FixedPointReport& report);

/// Full-network state assembled from block steady states at a reduced fixed point.
NetworkState assemble_steady_state(const NetworkModel& m, const FixedPoint& fp);

/// Linearization at `fp`, assembled block by block in the order
/// [H_A cells, tx/rx A->B, H_B cells, tx/rx B->A].
Eigen::MatrixXd full_jacobian(const NetworkModel& m, const FixedPoint& fp);

/// Largest real part over the spectrum of a square matrix.
double spectral_abscissa(const Eigen::MatrixXd& M);

struct QuotientEigenReport {
    double quotient_product = 0.0;     // T'_AB(z̃_A) T'_BA(z̃_B)
    double residual = 0.0;             // |G 1 - q 1|_inf / |q|
    double spectral_radius = 0.0;      // of G
    double largest_real_eigenvalue = 0.0;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXd composed_gain;     // G = G_BA G_AB, N_A x N_A
    bool eigenvector_ok = false;
    bool is_largest = false;
    bool positive = false;
    std::string message;

    bool passed() const { return eigenvector_ok && is_largest && positive; }
};

/// Checks that T'_AB T'_BA is the dominant eigenvalue of the composed
/// transceiver dc gain, with eigenvector 1.
QuotientEigenReport verify_quotient_eigenvalue(const NetworkModel& m, const FixedPoint& fp, double tol = 1e-10);

}  // namespace latinhib
