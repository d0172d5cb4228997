#include "latinhib/channel1d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace latinhib {

void ChannelGeometry::validate() const {
    if (!(length > 0.0) || !(width > 0.0) || !(diffusivity > 0.0)) {
        throw std::domain_error("ChannelGeometry: length, width and diffusivity must be positive");
    }
    if (cells < 50) throw std::domain_error("ChannelGeometry: at least 50 cells are required");
}

ChannelField ChannelField::uniform(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double value) {
    g.validate();
    ChannelField f;
    f.geom = g;
    f.left_end = left_end;
    f.right_end = right_end;
    f.c = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.cells), value);
    f.left = left_end == ChannelEnd::sealed ? 0.0 : value;
    f.right = right_end == ChannelEnd::sealed ? 0.0 : value;
    return f;
}

double ChannelField::total_amount() const {
    double m = c.sum() * geom.width * geom.dx();
    const double cap = geom.width * geom.width;
    if (left_end == ChannelEnd::reservoir) m += cap * left;
    if (right_end == ChannelEnd::reservoir) m += cap * right;
    return m;
}

Eigen::VectorXd ChannelField::centres() const {
    const auto n = static_cast<Eigen::Index>(geom.cells);
    return Eigen::VectorXd::LinSpaced(n, 0.5, static_cast<double>(n) - 0.5) * geom.dx();
}

double StepBalance::relative_defect() const {
    const double scale = std::max({std::abs(amount_before), std::abs(amount_after), 1e-300});
    return std::abs((amount_after - amount_before) - (boundary_inflow - degraded)) / scale;
}

//
// Unknowns are the channel cells plus any reservoir ends, ordered left to
// right. Held ends enter only through the right-hand side.
//
struct ChannelStepper::Impl {
    ChannelGeometry g;
    ChannelEnd left_end;
    ChannelEnd right_end;
    double gamma;
    StepScheme scheme;
    Eigen::Index n;         // channel cells
    Eigen::Index offset;    // index of cell 0 among the unknowns
    Eigen::Index unknowns;
    Eigen::VectorXd cap;    // per unknown
    std::vector<Eigen::Triplet<double>> links;  // (i, j, conductance), i < j
    double g_end;
    double cached_dt = -1.0;
    Eigen::SparseMatrix<double> matrix;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

    Impl(const ChannelGeometry& geom, ChannelEnd le, ChannelEnd re, double gam, StepScheme sch)
        : g(geom), left_end(le), right_end(re), gamma(gam), scheme(sch) {
        g.validate();
        if (!(gamma >= 0.0)) throw std::domain_error("ChannelStepper: negative degradation rate");
        n = static_cast<Eigen::Index>(g.cells);
        offset = le == ChannelEnd::reservoir ? 1 : 0;
        unknowns = n + offset + (re == ChannelEnd::reservoir ? 1 : 0);
        cap = Eigen::VectorXd::Constant(unknowns, g.width * g.dx());
        const double g_inner = g.diffusivity * g.width / g.dx();
        g_end = 2.0 * g_inner;
        if (le == ChannelEnd::reservoir) {
            cap[0] = g.width * g.width;
            links.emplace_back(0, 1, g_end);
        }
        for (Eigen::Index i = 0; i + 1 < n; ++i) links.emplace_back(offset + i, offset + i + 1, g_inner);
        if (re == ChannelEnd::reservoir) {
            cap[unknowns - 1] = g.width * g.width;
            links.emplace_back(unknowns - 2, unknowns - 1, g_end);
        }
    }

    // Total conductance leaving each unknown, held ends included.
    Eigen::VectorXd out_conductance() const {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(unknowns);
        for (const auto& t : links) {
            s[t.row()] += t.value();
            s[t.col()] += t.value();
        }
        if (left_end == ChannelEnd::fixed) s[offset] += g_end;
        if (right_end == ChannelEnd::fixed) s[offset + n - 1] += g_end;
        return s;
    }

    Eigen::SparseMatrix<double> system_matrix(double inv_dt) const {
        const Eigen::VectorXd out = out_conductance();
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(unknowns) + 2 * links.size());
        for (Eigen::Index i = 0; i < unknowns; ++i) t.emplace_back(i, i, cap[i] * (inv_dt + gamma) + out[i]);
        for (const auto& l : links) {
            t.emplace_back(l.row(), l.col(), -l.value());
            t.emplace_back(l.col(), l.row(), -l.value());
        }
        Eigen::SparseMatrix<double> A(unknowns, unknowns);
        A.setFromTriplets(t.begin(), t.end());
        return A;
    }

    Eigen::VectorXd gather(const ChannelField& f) const {
        Eigen::VectorXd u(unknowns);
        if (offset) u[0] = f.left;
        u.segment(offset, n) = f.c;
        if (right_end == ChannelEnd::reservoir) u[unknowns - 1] = f.right;
        return u;
    }

    void scatter(const Eigen::VectorXd& u, ChannelField& f) const {
        if (offset) f.left = u[0];
        f.c = u.segment(offset, n);
        if (right_end == ChannelEnd::reservoir) f.right = u[unknowns - 1];
    }

    Eigen::VectorXd sources(const ChannelField& f, double s_left, double s_right) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns);
        if (left_end == ChannelEnd::reservoir) b[0] += cap[0] * s_left;
        if (right_end == ChannelEnd::reservoir) b[unknowns - 1] += cap[unknowns - 1] * s_right;
        if (left_end == ChannelEnd::fixed) b[offset] += g_end * f.left;
        if (right_end == ChannelEnd::fixed) b[offset + n - 1] += g_end * f.right;
        return b;
    }

    // Net inflow rate through held ends and reservoir sources at state u.
    double inflow_rate(const ChannelField& f, const Eigen::VectorXd& u, double s_left, double s_right) const {
        double r = 0.0;
        if (left_end == ChannelEnd::reservoir) r += cap[0] * s_left;
        if (right_end == ChannelEnd::reservoir) r += cap[unknowns - 1] * s_right;
        if (left_end == ChannelEnd::fixed) r += g_end * (f.left - u[offset]);
        if (right_end == ChannelEnd::fixed) r += g_end * (f.right - u[offset + n - 1]);
        return r;
    }

    Eigen::VectorXd apply_diffusion(const Eigen::VectorXd& u) const {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(unknowns);
        for (const auto& l : links) {
            const double flux = l.value() * (u[l.col()] - u[l.row()]);
            r[l.row()] += flux;
            r[l.col()] -= flux;
        }
        return r;
    }

    // Amount rate per unknown at u: diffusion, held ends, sources and decay.
    Eigen::VectorXd net_rate(const ChannelField& f, const Eigen::VectorXd& u, double s_left, double s_right) const {
        Eigen::VectorXd flow = apply_diffusion(u) + sources(f, s_left, s_right);
        // held ends drain the adjacent cell through the end conductance
        if (left_end == ChannelEnd::fixed) flow[offset] -= g_end * u[offset];
        if (right_end == ChannelEnd::fixed) flow[offset + n - 1] -= g_end * u[offset + n - 1];
        return flow - gamma * cap.cwiseProduct(u);
    }

    double explicit_limit() const {
        const Eigen::VectorXd out = out_conductance();
        return 1.0 / (out.cwiseQuotient(cap).array() + gamma).maxCoeff();
    }
};

ChannelStepper::ChannelStepper(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double gamma,
                               StepScheme scheme)
    : impl_(std::make_unique<Impl>(g, left_end, right_end, gamma, scheme)) {}
ChannelStepper::~ChannelStepper() = default;
ChannelStepper::ChannelStepper(ChannelStepper&&) noexcept = default;
ChannelStepper& ChannelStepper::operator=(ChannelStepper&&) noexcept = default;

double ChannelStepper::explicit_limit() const { return impl_->explicit_limit(); }

StepBalance ChannelStepper::step(ChannelField& f, double dt, double source_left, double source_right) {
    Impl& s = *impl_;
    if (!(dt > 0.0)) throw std::invalid_argument("ChannelStepper::step: dt must be positive");
    if (f.left_end != s.left_end || f.right_end != s.right_end || f.c.size() != s.n) {
        throw std::invalid_argument("ChannelStepper::step: field does not match the stepper");
    }
    StepBalance bal;
    bal.amount_before = f.total_amount();
    const Eigen::VectorXd u0 = s.gather(f);
    Eigen::VectorXd u1;
    if (s.scheme == StepScheme::implicit) {
        if (dt != s.cached_dt) {
            s.matrix = s.system_matrix(1.0 / dt);
            s.solver.compute(s.matrix);
            if (s.solver.info() != Eigen::Success) throw std::runtime_error("ChannelStepper: factorization failed");
            s.cached_dt = dt;
        }
        // Solve for the increment with a flux-form right-hand side, so that
        // round-off scales with the change rather than with the state.
        const Eigen::VectorXd rhs = s.net_rate(f, u0, source_left, source_right);
        Eigen::VectorXd delta = s.solver.solve(rhs);
        delta += s.solver.solve(rhs - s.matrix * delta);
        u1 = u0 + delta;
        bal.boundary_inflow = dt * s.inflow_rate(f, u1, source_left, source_right);
        bal.degraded = dt * s.gamma * s.cap.dot(u1);
    } else {
        const double limit = s.explicit_limit();
        if (dt > limit) {
            std::ostringstream msg;
            msg << "explicit channel step dt = " << dt << " s exceeds the stability limit " << limit << " s";
            throw CflError(msg.str());
        }
        const Eigen::VectorXd rate = s.net_rate(f, u0, source_left, source_right).cwiseQuotient(s.cap);
        u1 = u0 + dt * rate;
        bal.boundary_inflow = dt * s.inflow_rate(f, u0, source_left, source_right);
        bal.degraded = dt * s.gamma * s.cap.dot(u0);
    }
    s.scatter(u1, f);
    bal.amount_after = f.total_amount();
    return bal;
}

StepBalance step_pde(ChannelField& f, double gamma, double dt, StepScheme scheme) {
    ChannelStepper stepper(f.geom, f.left_end, f.right_end, gamma, scheme);
    return stepper.step(f, dt);
}

double analytic_profile(double x, double u0, double length, double gamma, double diffusivity) {
    const double kappa = std::sqrt(gamma / diffusivity);
    return u0 * std::cosh(kappa * (length - x)) / std::cosh(kappa * length);
}

ChannelField steady_field(const ChannelGeometry& g, ChannelEnd left_end, ChannelEnd right_end, double gamma,
                          double source_left, double source_right, double held_left, double held_right) {
    ChannelField f = ChannelField::uniform(g, left_end, right_end, 0.0);
    if (left_end == ChannelEnd::fixed) f.left = held_left;
    if (right_end == ChannelEnd::fixed) f.right = held_right;
    if (!(gamma > 0.0) && left_end != ChannelEnd::fixed && right_end != ChannelEnd::fixed) {
        throw std::domain_error("steady_field: no steady state without degradation or a held end");
    }
    // One implicit step this long is the steady solve; cap/dt is below round-off.
    ChannelStepper stepper(g, left_end, right_end, gamma);
    stepper.step(f, 1e200, source_left, source_right);
    return f;
}

double correction_factor(double length, double gamma, double diffusivity) {
    const double kl = std::sqrt(gamma / diffusivity) * length;
    if (kl < 1e-8) return 1.0 - kl * kl / 6.0;
    return kl / std::sinh(kl);
}

double channel_end_loss(double weight, double length, double gamma, double diffusivity) {
    const double kl = std::sqrt(gamma / diffusivity) * length;
    return weight * kl * std::tanh(0.5 * kl);
}

NetworkModel corrected_network(const CompartmentGraph& g, const ParameterSet& params_a, const ParameterSet& params_b,
                               CorrectionMode mode) {
    std::vector<std::string> ids;
    for (const auto& c : g.compartments()) ids.push_back(c.id);
    Eigen::VectorXd loss = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    if (mode == CorrectionMode::none) return NetworkModel(build_laplacian(g), g.count_a(), params_a, params_b, loss, ids);
    if (params_a.gamma_X != params_b.gamma_X) {
        throw std::invalid_argument("channel correction needs one degradation rate for both signals");
    }
    const double gamma = params_a.gamma_X;
    std::vector<double> weights;
    for (const auto& c : g.channels()) {
        const double d = g.weight(c);
        weights.push_back(d * correction_factor(c.length, gamma, g.diffusivity()));
        if (mode == CorrectionMode::attenuation_and_loss) {
            const double e = channel_end_loss(d, c.length, gamma, g.diffusivity());
            loss[static_cast<Eigen::Index>(c.a)] += e;
            loss[static_cast<Eigen::Index>(c.b)] += e;
        }
    }
    return NetworkModel(build_laplacian(g, weights), g.count_a(), params_a, params_b, loss, ids);
}

NetworkModel corrected_pair(double length, double width_factor, double diffusivity, const ParameterSet& params_a,
                            const ParameterSet& params_b, CorrectionMode mode) {
    return corrected_network(CompartmentGraph::pair(length, width_factor, diffusivity), params_a, params_b, mode);
}

// ---------------------------------------------------------------------------

ChannelNetwork::ChannelNetwork(const ChannelGeometry& g, const ParameterSet& params_a, const ParameterSet& params_b)
    : geom_(g), params_a_(params_a), params_b_(params_b) {
    geom_.validate();
    params_a_.validate();
    params_b_.validate();
    cap_end_ = g.width * g.width;
    cap_cell_ = g.width * g.dx();
    g_inner_ = g.diffusivity * g.width / g.dx();
    g_end_ = 2.0 * g_inner_;
}

namespace {

void cell_terms(const ParameterSet& p, const Eigen::VectorXd& y, Eigen::Index base, double R, Eigen::VectorXd& dy) {
    const double mT = y[base], pT = y[base + 1], mI = y[base + 2], pI = y[base + 3];
    dy[base] = p.V_PLuxI * p.N_PLuxI * p.C * (activation(R, p) + p.leak_PLuxI) - p.gamma_mT * mT;
    dy[base + 1] = p.eps_T * mT - p.gamma_T * pT;
    dy[base + 2] = p.V_PLtetO1 * p.N_PLtetO1 * p.C * (repression(pT, p) + p.leak_PLtetO1) - p.gamma_mI * mI;
    dy[base + 3] = p.eps_I * mI - p.gamma_I * pI;
}

void cell_jac(const ParameterSet& p, const Eigen::VectorXd& y, Eigen::Index base, Eigen::Index r, Eigen::MatrixXd& J) {
    J(base, base) = -p.gamma_mT;
    J(base, r) = p.V_PLuxI * p.N_PLuxI * p.C * activation_prime(y[r], p);
    J(base + 1, base) = p.eps_T;
    J(base + 1, base + 1) = -p.gamma_T;
    J(base + 2, base + 1) = p.V_PLtetO1 * p.N_PLtetO1 * p.C * repression_prime(y[base + 1], p);
    J(base + 2, base + 2) = -p.gamma_mI;
    J(base + 3, base + 2) = p.eps_I;
    J(base + 3, base + 3) = -p.gamma_I;
}

}  // namespace

void ChannelNetwork::chain_rhs(const Eigen::VectorXd& y, Eigen::Index off, double gamma, Eigen::VectorXd& dy) const {
    const Eigen::Index m = chain();
    for (Eigen::Index i = 0; i < m; ++i) dy[off + i] = -gamma * y[off + i];
    auto link = [&](Eigen::Index i, Eigen::Index j, double g) {
        const double flux = g * (y[off + j] - y[off + i]);
        dy[off + i] += flux / (i == 0 || i == m - 1 ? cap_end_ : cap_cell_);
        dy[off + j] -= flux / (j == 0 || j == m - 1 ? cap_end_ : cap_cell_);
    };
    link(0, 1, g_end_);
    for (Eigen::Index i = 1; i + 2 < m; ++i) link(i, i + 1, g_inner_);
    link(m - 2, m - 1, g_end_);
}

void ChannelNetwork::rhs(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
    if (y.size() != size()) throw std::invalid_argument("ChannelNetwork::rhs: state size mismatch");
    dy.resize(size());
    const ParameterSet& pa = params_a_;
    const ParameterSet& pb = params_b_;
    cell_terms(pa, y, 0, y[r_a], dy);
    cell_terms(pb, y, 4, y[r_b], dy);
    chain_rhs(y, x_offset(), pa.gamma_X, dy);
    chain_rhs(y, y_offset(), pb.gamma_X, dy);

    const Eigen::Index xa = x_offset();
    const Eigen::Index xb = x_offset() + chain() - 1;
    const Eigen::Index ya = y_offset();
    const Eigen::Index yb = y_offset() + chain() - 1;
    dy[xa] += pa.nu * y[3];
    dy[yb] += pb.nu * y[7];
    const double bind_b = pb.k_on * y[xb] * (pb.p_Ri - y[r_b]) - pb.k_off * y[r_b];
    const double bind_a = pa.k_on * y[ya] * (pa.p_Ri - y[r_a]) - pa.k_off * y[r_a];
    dy[xb] -= bind_b;
    dy[r_b] = bind_b;
    dy[ya] -= bind_a;
    dy[r_a] = bind_a;
}

void ChannelNetwork::jacobian(const Eigen::VectorXd& y, Eigen::MatrixXd& J) const {
    J.setZero(size(), size());
    const ParameterSet& pa = params_a_;
    const ParameterSet& pb = params_b_;
    cell_jac(pa, y, 0, r_a, J);
    cell_jac(pb, y, 4, r_b, J);
    const Eigen::Index m = chain();
    auto chain_jac = [&](Eigen::Index off, double gamma) {
        for (Eigen::Index i = 0; i < m; ++i) J(off + i, off + i) = -gamma;
        auto link = [&](Eigen::Index i, Eigen::Index j, double g) {
            const double ci = i == 0 || i == m - 1 ? cap_end_ : cap_cell_;
            const double cj = j == 0 || j == m - 1 ? cap_end_ : cap_cell_;
            J(off + i, off + i) -= g / ci;
            J(off + i, off + j) += g / ci;
            J(off + j, off + j) -= g / cj;
            J(off + j, off + i) += g / cj;
        };
        link(0, 1, g_end_);
        for (Eigen::Index i = 1; i + 2 < m; ++i) link(i, i + 1, g_inner_);
        link(m - 2, m - 1, g_end_);
    };
    chain_jac(x_offset(), pa.gamma_X);
    chain_jac(y_offset(), pb.gamma_X);

    const Eigen::Index xa = x_offset();
    const Eigen::Index xb = x_offset() + m - 1;
    const Eigen::Index ya = y_offset();
    const Eigen::Index yb = y_offset() + m - 1;
    J(xa, 3) = pa.nu;
    J(yb, 7) = pb.nu;
    // d(bind_b)/dX_B and d(bind_b)/dR_B
    const double bx = pb.k_on * (pb.p_Ri - y[r_b]);
    const double br = -pb.k_on * y[xb] - pb.k_off;
    J(xb, xb) -= bx;
    J(xb, r_b) -= br;
    J(r_b, xb) = bx;
    J(r_b, r_b) = br;
    const double ay = pa.k_on * (pa.p_Ri - y[r_a]);
    const double ar = -pa.k_on * y[ya] - pa.k_off;
    J(ya, ya) -= ay;
    J(ya, r_a) -= ar;
    J(r_a, ya) = ay;
    J(r_a, r_a) = ar;
}

OdeSystem ChannelNetwork::system() const {
    OdeSystem sys;
    sys.rhs = [this](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { rhs(y, dy); };
    sys.jacobian = [this](const Eigen::VectorXd& y, Eigen::MatrixXd& J) { jacobian(y, J); };
    return sys;
}

Eigen::VectorXd ChannelNetwork::upper_bound() const {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(size(), std::numeric_limits<double>::infinity());
    u[r_a] = params_a_.p_Ri;
    u[r_b] = params_b_.p_Ri;
    return u;
}

Eigen::VectorXd ChannelNetwork::initial_state(double seed_a) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(size());
    y[3] = seed_a;
    return y;
}

std::vector<std::string> ChannelNetwork::names() const {
    std::vector<std::string> n = {"A1:m_T", "A1:p_T", "A1:m_I", "A1:p_I", "B1:m_T", "B1:p_T",
                                  "B1:m_I", "B1:p_I", "A1:R_A", "B1:R_B"};
    const Eigen::Index m = chain();
    for (const char* sig : {"X", "Y"}) {
        n.push_back(std::string("A1:") + sig);
        for (Eigen::Index i = 1; i + 1 < m; ++i) n.push_back(std::string("channel") + std::to_string(i - 1) + ":" + sig);
        n.push_back(std::string("B1:") + sig);
    }
    return n;
}

ChannelField ChannelNetwork::x_field(const Eigen::VectorXd& y) const {
    ChannelField f = ChannelField::uniform(geom_, ChannelEnd::reservoir, ChannelEnd::reservoir, 0.0);
    f.left = y[x_offset()];
    f.c = y.segment(x_offset() + 1, chain() - 2);
    f.right = y[x_offset() + chain() - 1];
    return f;
}

ChannelField ChannelNetwork::y_field(const Eigen::VectorXd& y) const {
    ChannelField f = ChannelField::uniform(geom_, ChannelEnd::reservoir, ChannelEnd::reservoir, 0.0);
    f.left = y[y_offset()];
    f.c = y.segment(y_offset() + 1, chain() - 2);
    f.right = y[y_offset() + chain() - 1];
    return f;
}

// ---------------------------------------------------------------------------

namespace {

bool contrasting(double a, double b) { return std::abs(a - b) > 0.5 * std::max(a, b); }

Observables observe_network(const NetworkModel& m, const Trajectory& tr) {
    const StateLayout& s = m.layout();
    const Eigen::VectorXd& y = tr.final_state();
    Observables o;
    o.p_I_a = y[s.cell_a(Species::p_I, 0)];
    o.p_I_b = y[s.cell_b(Species::p_I, 0)];
    o.R_a = y[s.r_a(0)];
    o.R_b = y[s.r_b(0)];
    o.steady = tr.steady;
    o.contrasting = contrasting(o.R_a, o.R_b);
    if (!tr.steady) throw ConvergenceError("compare_models: compartmental model did not converge");
    o.tau_hours = estimate_time_constant(tr, high_receiver_component(m, y));
    return o;
}

double max_rel(const Observables& a, const Observables& ref) {
    auto rel = [](double x, double r) { return std::abs(x - r) / std::max(std::abs(r), 1e-300); };
    return std::max({rel(a.p_I_a, ref.p_I_a), rel(a.p_I_b, ref.p_I_b), rel(a.R_a, ref.R_a), rel(a.R_b, ref.R_b)});
}

}  // namespace

ComparisonReport compare_models(const ParameterSet& params_a, const ParameterSet& params_b, double length,
                                const ComparisonOptions& opt) {
    using clock = std::chrono::steady_clock;
    ComparisonReport rep;
    rep.length = length;
    rep.width = length / opt.width_factor;
    rep.cells = opt.cells;
    rep.factor = correction_factor(length, params_a.gamma_X, opt.diffusivity);

    const auto t0 = clock::now();
    auto run_ode = [&](CorrectionMode mode) {
        const NetworkModel m = corrected_pair(length, opt.width_factor, opt.diffusivity, params_a, params_b, mode);
        const Trajectory tr = integrate(m, default_initial_state(m), opt.t_end, opt.controls);
        return observe_network(m, tr);
    };
    rep.ode_plain = run_ode(CorrectionMode::none);
    rep.ode_corrected = run_ode(CorrectionMode::attenuation);
    rep.ode_two_port = run_ode(CorrectionMode::attenuation_and_loss);
    const auto t1 = clock::now();

    ChannelGeometry g;
    g.length = length;
    g.width = rep.width;
    g.cells = opt.cells;
    g.diffusivity = opt.diffusivity;
    const ChannelNetwork net(g, params_a, params_b);
    SimulationControls c = opt.controls;
    c.integrator.upper_bound = net.upper_bound();
    const Trajectory tr = integrate_system(net.system(), net.initial_state(), opt.t_end, c, net.names());
    const auto t2 = clock::now();
    if (!tr.steady) throw ConvergenceError("compare_models: channel model did not converge");
    const Eigen::VectorXd& y = tr.final_state();
    rep.pde.p_I_a = y[3];
    rep.pde.p_I_b = y[7];
    rep.pde.R_a = y[ChannelNetwork::r_a];
    rep.pde.R_b = y[ChannelNetwork::r_b];
    rep.pde.steady = true;
    rep.pde.contrasting = contrasting(rep.pde.R_a, rep.pde.R_b);
    rep.pde.tau_hours = estimate_time_constant(
        tr, rep.pde.R_a > rep.pde.R_b ? ChannelNetwork::r_a : ChannelNetwork::r_b);

    rep.max_rel_plain = max_rel(rep.ode_plain, rep.pde);
    rep.max_rel_corrected = max_rel(rep.ode_corrected, rep.pde);
    rep.max_rel_two_port = max_rel(rep.ode_two_port, rep.pde);
    rep.tau_ratio = rep.pde.tau_hours / rep.ode_plain.tau_hours;
    rep.ode_seconds = std::chrono::duration<double>(t1 - t0).count();
    rep.pde_seconds = std::chrono::duration<double>(t2 - t1).count();
    return rep;
}

std::vector<TransferPoint> refinement_study(const ParameterSet& p, const std::vector<double>& lengths, double width,
                                            std::size_t cells, double diffusivity) {
    std::vector<TransferPoint> out;
    for (double l : lengths) {
        ChannelGeometry g;
        g.length = l;
        g.width = width;
        g.cells = cells;
        g.diffusivity = diffusivity;
        const ChannelField f = steady_field(g, ChannelEnd::reservoir, ChannelEnd::reservoir, p.gamma_X, 1.0, 0.0);
        const double d = edge_weight(l, width, diffusivity);
        const double gm = p.gamma_X;
        const double ode = d / ((gm + d) * (gm + d) - d * d);
        out.push_back({l, f.right, ode, std::abs(f.right - ode) / ode});
    }
    return out;
}

void write_snapshot_csv(std::ostream& os, const ChannelField& x, const ChannelField& y) {
    if (x.c.size() != y.c.size()) throw std::invalid_argument("write_snapshot_csv: field sizes differ");
    os << "x_um,X_M,Y_M\n";
    const Eigen::VectorXd xs = x.centres();
    std::ostringstream row;
    row << std::setprecision(10);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        row.str("");
        row << xs[i] * 1e6 << ',' << x.c[i] << ',' << y.c[i];
        os << row.str() << '\n';
    }
}

}  // namespace latinhib
