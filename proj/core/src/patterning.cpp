#include "latinhib/patterning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace latinhib {

StaticMap StaticMap::after(const StaticMap& inner) const {
    auto outer_v = value;
    auto outer_s = slope;
    auto inner_v = inner.value;
    auto inner_s = inner.slope;
    return {[=](double z) { return outer_v(inner_v(z)); },
            [=](double z) { return outer_s(inner_v(z)) * inner_s(z); }};
}

StaticMap ReducedMaps::Tbar_A() const { return T_A.after(T_BA.after(T_B.after(T_AB))); }

StaticMap ReducedMaps::Tbar_B() const { return T_B.after(T_AB.after(T_A.after(T_BA))); }

StaticMap ReducedMaps::partner_of_a() const { return T_B.after(T_AB); }

namespace {

StaticMap cell_map(const ParameterSet& p) {
    return {[p](double R) { return static_map_T(R, p); }, [p](double R) { return static_map_T_prime(R, p); }};
}

StaticMap transceiver_map(const DecoupledTransceiver& t) {
    return {[t](double z) { return t.value(z); }, [t](double z) { return t.slope(z); }};
}

}  // namespace

ReducedMaps reduced_maps(const ParameterSet& params_a, const ParameterSet& params_b, const DecoupledTransceiver& ab,
                         const DecoupledTransceiver& ba) {
    ReducedMaps maps;
    maps.T_A = cell_map(params_a);
    maps.T_B = cell_map(params_b);
    maps.T_AB = transceiver_map(ab);
    maps.T_BA = transceiver_map(ba);
    maps.bound_a = params_a.output_bound();
    maps.bound_b = params_b.output_bound();
    return maps;
}

ReducedMaps reduced_maps(const NetworkModel& m) {
    auto lp = m.equitable();
    if (!lp) throw std::invalid_argument("reduced_maps: the A/B partition is not equitable");
    auto loss = m.uniform_loss();
    if (!loss) throw std::invalid_argument("reduced_maps: extra loss must be uniform within each class");
    return reduced_maps(m.params_a(), m.params_b(),
                        DecoupledTransceiver::a_to_b(*lp, m.params_a(), m.params_b(), loss->first, loss->second),
                        DecoupledTransceiver::b_to_a(*lp, m.params_b(), m.params_a(), loss->first, loss->second));
}

StaticMap compose_Tbar(const ParameterSet& p, double d_ab, double d_ba) {
    const DecoupledTransceiver ab{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d_ab, d_ba};
    const DecoupledTransceiver ba{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d_ba, d_ab};
    return reduced_maps(p, p, ab, ba).Tbar_A();
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

std::vector<FixedPoint> scalar_fixed_points(const StaticMap& Tbar, double z_max, const FixedPointOptions& opt) {
    if (!(z_max > opt.grid_floor) || opt.grid_points < 2) {
        throw std::invalid_argument("scalar_fixed_points: empty bracket");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(opt.grid_points + opt.linear_fill));
    for (int k = 0; k < opt.linear_fill; ++k) grid.push_back(opt.grid_floor * k / opt.linear_fill);
    const double lo = std::log(opt.grid_floor);
    const double hi = std::log(z_max);
    for (int k = 0; k < opt.grid_points; ++k) {
        grid.push_back(std::exp(lo + (hi - lo) * k / (opt.grid_points - 1)));
    }
    grid.back() = z_max;

    auto g = [&](double z) { return Tbar(z) - z; };
    std::vector<double> roots;
    double z_prev = grid.front();
    double g_prev = g(z_prev);
    if (g_prev == 0.0) roots.push_back(z_prev);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double z = grid[k];
        const double gz = g(z);
        if (gz == 0.0) {
            roots.push_back(z);
        } else if (g_prev != 0.0 && std::signbit(gz) != std::signbit(g_prev)) {
            double a = z_prev;
            double b = z;
            double ga = g_prev;
            for (int it = 0; it < 400; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const double gm = g(mid);
                if (gm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (std::signbit(gm) == std::signbit(ga)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
                if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b) break;
            }
            roots.push_back(0.5 * (a + b));
        }
        z_prev = z;
        g_prev = gz;
    }

    std::vector<FixedPoint> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back().z_a) <= opt.dedupe_rel * std::max(r, out.back().z_a)) continue;
        const double s = Tbar.slope(r);
        Stability label = Stability::marginal;
        if (s < 1.0 - opt.marginal_band) label = Stability::stable;
        else if (s > 1.0 + opt.marginal_band) label = Stability::unstable;
        out.push_back(FixedPoint{r, 0.0, s, label});
    }
    if (out.empty()) {
        throw std::logic_error("scalar_fixed_points: no fixed point found; the map is not bounded by z_max");
    }
    return out;
}

FixedPointReport find_fixed_points(const ReducedMaps& maps, const FixedPointOptions& opt) {
    FixedPointReport rep;
    rep.bracket_lo = 0.0;
    rep.bracket_hi = 1.01 * maps.bound_a;
    rep.points = scalar_fixed_points(maps.Tbar_A(), rep.bracket_hi, opt);
    const StaticMap partner = maps.partner_of_a();
    for (auto& fp : rep.points) fp.z_b = partner(fp.z_a);

    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.points.size(); ++k) {
        const auto& fp = rep.points[k];
        const double gap = std::abs(fp.z_a - fp.z_b) / (fp.z_a + fp.z_b);
        if (gap < best_gap) {
            best_gap = gap;
            best = k;
        }
    }
    rep.near_homogeneous = best;

    if (rep.points.size() >= 3) {
        const FixedPoint& mid = rep.points[best];
        const FixedPoint& low = rep.points.front();
        const FixedPoint& high = rep.points.back();
        rep.is_patterned = mid.label == Stability::unstable && low.label == Stability::stable &&
                           high.label == Stability::stable && high.z_a > mid.z_a && high.z_b < mid.z_b &&
                           low.z_a < mid.z_a && low.z_b > mid.z_b;
    }
    return rep;
}

Classification classify_patterning(const FixedPointReport& report) {
    Classification c;
    if (!report.near_homogeneous || report.points.empty()) return c;
    const FixedPoint& mid = report.points[*report.near_homogeneous];
    c.marginal = mid.label == Stability::marginal;
    c.patterned = report.points.size() >= 3 && mid.label == Stability::unstable;
    return c;
}

NetworkState assemble_steady_state(const NetworkModel& m, const FixedPoint& fp) {
    const StateLayout& s = m.layout();
    NetworkState st = m.zero_state();

    const Eigen::VectorXd pI_a = Eigen::VectorXd::Constant(s.n_a, fp.z_a);
    const TransceiverState ab = transceiver_steady_state(m.tx_ab(), pI_a);
    Eigen::VectorXd pI_b(s.n_b);
    for (Eigen::Index j = 0; j < s.n_b; ++j) {
        const CellState c = cell_steady_state(ab.complex[j], m.params_b());
        st.set_cell_b(j, c);
        pI_b[j] = c.p_I;
    }
    const TransceiverState ba = transceiver_steady_state(m.tx_ba(), pI_b);
    for (Eigen::Index i = 0; i < s.n_a; ++i) st.set_cell_a(i, cell_steady_state(ba.complex[i], m.params_a()));
    st.values.segment(s.tx_ab(), m.tx_ab().state_size()) = m.tx_ab().pack(ab);
    st.values.segment(s.tx_ba(), m.tx_ba().state_size()) = m.tx_ba().pack(ba);
    return st;
}

Eigen::MatrixXd full_jacobian(const NetworkModel& m, const FixedPoint& fp) {
    const StateLayout& s = m.layout();
    const NetworkState st = assemble_steady_state(m, fp);
    const Eigen::Index na = s.n_a;
    const Eigen::Index nb = s.n_b;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s.size(), s.size());

    const TransceiverState ab = m.tx_ab().unpack(st.values.segment(s.tx_ab(), m.tx_ab().state_size()));
    const TransceiverState ba = m.tx_ba().unpack(st.values.segment(s.tx_ba(), m.tx_ba().state_size()));

    // Cell blocks A_k (x) I with species-major ordering; B_k C picks the complex input.
    auto cells = [&](Eigen::Index base, Eigen::Index n, const ParameterSet& p, const Eigen::VectorXd& inputs,
                     Eigen::Index input_base) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const CellLinearization lin = linearize_cell(inputs[i], p);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) J(base + a * n + i, base + b * n + i) = lin.A(a, b);
            }
            J(base + i, input_base + i) = lin.B[0];
        }
    };
    cells(s.cells_a(), na, m.params_a(), ba.complex, s.r_a(0));
    cells(s.cells_b(), nb, m.params_b(), ab.complex, s.r_b(0));

    // Transceiver blocks A_AB, A_BA and their inputs B_AB (C_A (x) I), B_BA (C_B (x) I).
    const TransceiverLinearization lab = linearize_transceiver(m.tx_ab(), ab);
    const TransceiverLinearization lba = linearize_transceiver(m.tx_ba(), ba);
    J.block(s.tx_ab(), s.tx_ab(), lab.A.rows(), lab.A.cols()) = lab.A;
    J.block(s.tx_ba(), s.tx_ba(), lba.A.rows(), lba.A.cols()) = lba.A;
    J.block(s.tx_ab(), s.cell_a(Species::p_I, 0), lab.B.rows(), na) = lab.B;
    J.block(s.tx_ba(), s.cell_b(Species::p_I, 0), lba.B.rows(), nb) = lba.B;
    return J;
}

double spectral_abscissa(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectral_abscissa: eigenvalue solve failed");
    return es.eigenvalues().real().maxCoeff();
}

QuotientEigenReport verify_quotient_eigenvalue(const NetworkModel& m, const FixedPoint& fp, double tol) {
    QuotientEigenReport rep;
    const StateLayout& s = m.layout();
    const NetworkState st = assemble_steady_state(m, fp);
    const TransceiverState ab = m.tx_ab().unpack(st.values.segment(s.tx_ab(), m.tx_ab().state_size()));
    const TransceiverState ba = m.tx_ba().unpack(st.values.segment(s.tx_ba(), m.tx_ba().state_size()));
    const Eigen::MatrixXd g_ab = linearize_transceiver(m.tx_ab(), ab).dc_gain();
    const Eigen::MatrixXd g_ba = linearize_transceiver(m.tx_ba(), ba).dc_gain();
    rep.composed_gain = g_ba * g_ab;

    const Eigen::VectorXd g1 = rep.composed_gain * Eigen::VectorXd::Ones(s.n_a);
    if (m.equitable() && m.uniform_loss()) {
        const ReducedMaps maps = reduced_maps(m);
        rep.quotient_product = maps.T_AB.slope(fp.z_a) * maps.T_BA.slope(fp.z_b);
    } else {
        rep.quotient_product = g1.mean();
        rep.message = "partition not equitable; comparing against the mean row sum";
    }
    const double q = rep.quotient_product;
    rep.residual = (g1.array() - q).abs().maxCoeff() / std::abs(q);

    Eigen::EigenSolver<Eigen::MatrixXd> es(rep.composed_gain, false);
    rep.eigenvalues = es.eigenvalues();
    rep.spectral_radius = rep.eigenvalues.cwiseAbs().maxCoeff();
    rep.largest_real_eigenvalue = rep.eigenvalues.real().maxCoeff();
    rep.eigenvector_ok = rep.residual < tol;
    rep.is_largest = std::abs(rep.spectral_radius - q) <= std::max(tol, 1e-12) * std::abs(q) &&
                     std::abs(rep.largest_real_eigenvalue - q) <= std::max(tol, 1e-12) * std::abs(q);
    rep.positive = q > 0.0;
    if (!rep.passed() && rep.message.empty()) {
        rep.message = "quotient product " + std::to_string(q) + " vs spectral radius " +
                      std::to_string(rep.spectral_radius) + ", residual " + std::to_string(rep.residual);
    }
    return rep;
}

}  // namespace latinhib
