#include "latinhib/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/ublas/matrix.hpp>
#include <boost/numeric/ublas/vector.hpp>

namespace latinhib {

namespace {

namespace odeint = boost::numeric::odeint;
namespace ublas = boost::numeric::ublas;

using UVec = ublas::vector<double>;
using UMat = ublas::matrix<double>;

Eigen::Map<const Eigen::VectorXd> view(const UVec& v) {
    return {&v.data()[0], static_cast<Eigen::Index>(v.size())};
}

// Bridges the Eigen-facing OdeSystem to the ublas types odeint expects.
struct Bridge {
    const OdeSystem* sys;
    mutable Eigen::VectorXd x;
    mutable Eigen::VectorXd dx;
    mutable Eigen::MatrixXd jac;

    void rhs(const UVec& in, UVec& out) const {
        x = view(in);
        dx.resize(x.size());
        sys->rhs(x, dx);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = dx[static_cast<Eigen::Index>(i)];
    }
    void jacobian(const UVec& in, UMat& J, UVec& dfdt) const {
        x = view(in);
        jac.resize(x.size(), x.size());
        sys->jacobian(x, jac);
        for (std::size_t i = 0; i < J.size1(); ++i) {
            for (std::size_t j = 0; j < J.size2(); ++j) {
                J(i, j) = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            dfdt[i] = 0.0;
        }
    }
};

// Clamps to [0, upper]; returns true if anything moved.
bool project(UVec& x, const IntegratorControls& c, IntegrationStats& st) {
    if (!c.project_nonnegative && c.upper_bound.size() == 0) return false;
    bool moved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = x[i];
        if (c.project_nonnegative && v < 0.0) {
            st.projected_mass += -v;
            st.max_projection = std::max(st.max_projection, -v);
            x[i] = 0.0;
            moved = true;
        } else if (c.upper_bound.size() > 0 && v > c.upper_bound[static_cast<Eigen::Index>(i)]) {
            double over = v - c.upper_bound[static_cast<Eigen::Index>(i)];
            st.projected_mass += over;
            st.max_projection = std::max(st.max_projection, over);
            x[i] = c.upper_bound[static_cast<Eigen::Index>(i)];
            moved = true;
        }
    }
    if (moved) ++st.projections;
    return moved;
}

[[noreturn]] void underflow(double t, double dt, const IntegratorControls& c) {
    std::ostringstream msg;
    msg << "integrator step size underflow at t = " << t << " s (dt = " << dt << " s)";
    if (c.method == IntegratorMethod::dopri5) {
        msg << "; the system is stiff, use the rosenbrock method";
    } else {
        msg << "; loosen rtol/atol (currently " << c.rtol << "/" << c.atol << ")";
    }
    throw StiffnessError(msg.str());
}

template <class Controller, class System>
std::vector<Eigen::VectorXd> drive(Controller& ctrl, System system, const Eigen::VectorXd& x0,
                                   const std::vector<double>& times, const IntegratorControls& c,
                                   IntegrationStats& st, bool reset_on_projection) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(times.size());
    UVec x(static_cast<std::size_t>(x0.size()));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[static_cast<Eigen::Index>(i)];
    out.push_back(x0);

    double t = times.front();
    double dt = c.initial_step;
    std::size_t steps = 0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double target = times[k];
        while (t < target) {
            double dt_try = dt;
            const bool clamped = t + dt_try >= target;
            if (clamped) dt_try = target - t;
            odeint::controlled_step_result res = ctrl.try_step(system, x, t, dt_try);
            if (++steps > c.max_steps) {
                std::ostringstream msg;
                msg << "integrator exceeded " << c.max_steps << " steps at t = " << t << " s";
                if (c.method == IntegratorMethod::dopri5) msg << "; the system is stiff, use the rosenbrock method";
                throw StiffnessError(msg.str());
            }
            if (res == odeint::success) {
                ++st.accepted;
                if (clamped) {
                    t = target;  // avoid round-off drift past the sample point
                    dt = std::max(dt_try, dt);
                } else {
                    dt = dt_try;
                }
                if (project(x, c, st) && reset_on_projection) ctrl.reset();
            } else {
                ++st.rejected;
                dt = dt_try;
                if (dt < c.min_step || dt < 1e-15 * std::max(1.0, std::abs(t))) underflow(t, dt, c);
            }
        }
        out.push_back(view(x));
    }
    return out;
}

// rosenbrock4_controller has no reset(); wrap it to share drive().
template <class C>
struct NoReset : C {
    using C::C;
    void reset() {}
};

}  // namespace

std::vector<Eigen::VectorXd> integrate_samples(const OdeSystem& sys, const Eigen::VectorXd& x0,
                                               const std::vector<double>& times,
                                               const IntegratorControls& controls,
                                               IntegrationStats* stats) {
    if (times.empty()) throw std::invalid_argument("integrate_samples: empty sample grid");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("integrate_samples: times must increase");
    }
    if (controls.upper_bound.size() != 0 && controls.upper_bound.size() != x0.size()) {
        throw std::invalid_argument("integrate_samples: upper bound size mismatch");
    }
    if (!sys.rhs) throw std::invalid_argument("integrate_samples: missing right-hand side");

    IntegrationStats local;
    IntegrationStats& st = stats ? *stats : local;
    Bridge bridge{&sys, {}, {}, {}};
    auto deriv = [&bridge](const UVec& x, UVec& dxdt, double) { bridge.rhs(x, dxdt); };

    if (controls.method == IntegratorMethod::rosenbrock) {
        if (!sys.jacobian) throw std::invalid_argument("integrate_samples: rosenbrock needs a Jacobian");
        auto jac = [&bridge](const UVec& x, UMat& J, double, UVec& dfdt) { bridge.jacobian(x, J, dfdt); };
        NoReset<odeint::rosenbrock4_controller<odeint::rosenbrock4<double>>> ctrl(controls.atol, controls.rtol);
        return drive(ctrl, std::make_pair(deriv, jac), x0, times, controls, st, false);
    }
    auto ctrl = odeint::make_controlled(controls.atol, controls.rtol, odeint::runge_kutta_dopri5<UVec>());
    return drive(ctrl, deriv, x0, times, controls, st, true);
}

std::vector<double> sample_grid(double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("sample_grid: t_end and dt must be positive");
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    t.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * dt);
    if (t_end - t.back() > 1e-9 * dt) t.push_back(t_end);
    return t;
}

}  // namespace latinhib
