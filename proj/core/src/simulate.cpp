#include "latinhib/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace latinhib {

std::vector<double> Trajectory::series(Eigen::Index component) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s[component]);
    return out;
}

double scaled_derivative_norm(const Eigen::VectorXd& y, const Eigen::VectorXd& dy, double floor) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        worst = std::max(worst, std::abs(dy[i]) / std::max(std::abs(y[i]), floor));
    }
    return worst;
}

Eigen::VectorXd default_initial_state(const NetworkModel& m, std::size_t index, double amount) {
    const StateLayout& s = m.layout();
    if (static_cast<Eigen::Index>(index) >= s.n_a + s.n_b) {
        throw std::out_of_range("default_initial_state: compartment index out of range");
    }
    if (!(amount >= 0.0)) throw std::invalid_argument("default_initial_state: negative seed amount");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(s.size());
    const auto i = static_cast<Eigen::Index>(index);
    if (i < s.n_a) y[s.cell_a(Species::p_I, i)] = amount;
    else y[s.cell_b(Species::p_I, i - s.n_a)] = amount;
    return y;
}

Trajectory integrate_system(const OdeSystem& sys, const Eigen::VectorXd& y0, double t_end,
                            const SimulationControls& controls, std::vector<std::string> names) {
    if ((y0.array() < 0.0).any()) throw std::invalid_argument("integrate: initial state must be nonnegative");
    Trajectory traj;
    traj.times = sample_grid(t_end, controls.sample_interval);
    traj.states = integrate_samples(sys, y0, traj.times, controls.integrator, &traj.stats);
    traj.names = std::move(names);

    Eigen::VectorXd dy(y0.size());
    traj.derivative_norm.reserve(traj.states.size());
    for (const auto& y : traj.states) {
        sys.rhs(y, dy);
        traj.derivative_norm.push_back(scaled_derivative_norm(y, dy, controls.scale_floor));
    }

    std::size_t k = traj.times.size();
    while (k > 0 && traj.derivative_norm[k - 1] < controls.steady_threshold) --k;
    if (k < traj.times.size()) {
        traj.steady_since = traj.times[k];
        traj.steady = t_end - traj.steady_since >= controls.steady_window;
    }
    return traj;
}

Trajectory integrate(const NetworkModel& m, const Eigen::VectorXd& y0, double t_end, const SimulationControls& controls) {
    if (y0.size() != m.layout().size()) throw std::invalid_argument("integrate: state size does not match the network");
    SimulationControls c = controls;
    if (c.integrator.upper_bound.size() == 0) c.integrator.upper_bound = m.upper_bound();
    std::vector<std::string> names;
    if (!m.ids().empty()) names = m.layout().names(m.ids());
    return integrate_system(network_system(m), y0, t_end, c, std::move(names));
}

double estimate_time_constant(const std::vector<double>& times, const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 3 || times.size() != n) throw std::invalid_argument("estimate_time_constant: need at least 3 samples");
    const double final = v.back();
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double eps = 1e-12 * scale;

    // Walk back over the final monotone run, ignoring round-off sized steps.
    int dir = 0;
    std::size_t start = n - 1;
    while (start > 0) {
        const double d = v[start] - v[start - 1];
        if (std::abs(d) > eps) {
            const int s = d > 0 ? 1 : -1;
            if (dir == 0) dir = s;
            else if (s != dir) break;
        }
        --start;
    }
    const double e0 = std::abs(v[start] - final);
    if (dir == 0 || !(e0 > eps)) throw ConvergenceError("estimate_time_constant: no decay segment");

    auto fit = [&](double hi_frac) {
        double st = 0, se = 0, stt = 0, ste = 0;
        std::size_t cnt = 0;
        for (std::size_t i = start; i < n; ++i) {
            const double e = std::abs(v[i] - final);
            if (e < 1e-6 * e0 || e > hi_frac * e0 || e <= eps) continue;
            const double t = times[i];
            const double le = std::log(e);
            st += t;
            se += le;
            stt += t * t;
            ste += t * le;
            ++cnt;
        }
        if (cnt < 3) return std::optional<double>{};
        const double c = static_cast<double>(cnt);
        const double denom = c * stt - st * st;
        if (!(denom > 0.0)) return std::optional<double>{};
        return std::optional<double>{(c * ste - st * se) / denom};
    };
    auto slope = fit(1e-2);
    if (!slope) slope = fit(1.0);
    if (!slope || !(*slope < 0.0)) throw ConvergenceError("estimate_time_constant: no decay segment");
    return -1.0 / *slope / 3600.0;
}

double estimate_time_constant(const Trajectory& traj, Eigen::Index component) {
    if (!traj.steady) throw ConvergenceError("estimate_time_constant: trajectory has not converged");
    return estimate_time_constant(traj.times, traj.series(component));
}

Eigen::Index high_receiver_component(const NetworkModel& m, const Eigen::VectorXd& y) {
    const StateLayout& s = m.layout();
    Eigen::Index best = s.r_a(0);
    for (Eigen::Index i = 0; i < s.n_a; ++i) {
        if (y[s.r_a(i)] > y[best]) best = s.r_a(i);
    }
    for (Eigen::Index j = 0; j < s.n_b; ++j) {
        if (y[s.r_b(j)] > y[best]) best = s.r_b(j);
    }
    return best;
}

bool ordered(const Eigen::VectorXd& low, const Eigen::VectorXd& high, const Eigen::VectorXd& signs, double slack) {
    return ((high - low).cwiseProduct(signs).array() >= -slack).all();
}

MonotonicityReport order_preservation(const OdeSystem& low_sys, const OdeSystem& high_sys,
                                      const std::vector<OrderedPair>& pairs, const Eigen::VectorXd& signs,
                                      double t_end, const SimulationControls& controls) {
    MonotonicityReport rep;
    const std::vector<double> times = sample_grid(t_end, controls.sample_interval);
    const IntegratorControls& ic = controls.integrator;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const OrderedPair& pr = pairs[k];
        if (pr.low.size() != signs.size() || pr.high.size() != signs.size()) {
            throw std::invalid_argument("order_preservation: state size mismatch");
        }
        if (!ordered(pr.low, pr.high, signs)) {
            throw std::invalid_argument("order_preservation: pair " + std::to_string(k) + " is not ordered in the cone");
        }
        const auto lo = integrate_samples(low_sys, pr.low, times, ic);
        const auto hi = integrate_samples(high_sys, pr.high, times, ic);
        bool broken = false;
        for (std::size_t t = 0; t < times.size(); ++t) {
            const Eigen::ArrayXd gap = (hi[t] - lo[t]).cwiseProduct(signs).array();
            // Both runs carry their own local error; order is judged up to that.
            const Eigen::ArrayXd slack =
                10.0 * (ic.atol + ic.rtol * lo[t].array().abs().max(hi[t].array().abs()));
            const Eigen::ArrayXd breach = (-gap - slack).max(0.0);
            if (breach.maxCoeff() > 0.0) {
                Eigen::Index at = 0;
                const double b = breach.maxCoeff(&at);
                if (!broken && rep.detail.empty()) {
                    std::ostringstream msg;
                    msg << "pair " << k << " lost order at t = " << times[t] << " s, component " << at;
                    rep.detail = msg.str();
                }
                broken = true;
                rep.worst = std::max(rep.worst, b);
            }
        }
        ++rep.pairs;
        if (broken) ++rep.violations;
    }
    return rep;
}

MonotonicityReport monotonicity_probe(const NetworkModel& m, const std::vector<OrderedPair>& pairs, double t_end,
                                      const SimulationControls& controls) {
    SimulationControls c = controls;
    if (c.integrator.upper_bound.size() == 0) c.integrator.upper_bound = m.upper_bound();
    const OdeSystem sys = network_system(m);
    return order_preservation(sys, sys, pairs, m.layout().cone_signs(), t_end, c);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "time_h";
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
    for (Eigen::Index i = 0; i < n; ++i) {
        os << ',';
        if (static_cast<std::size_t>(i) < traj.names.size()) os << traj.names[static_cast<std::size_t>(i)];
        else os << "x" << i;
    }
    os << '\n';
    std::ostringstream row;
    row << std::setprecision(10);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        row.str("");
        row << traj.times[k] / 3600.0;
        for (Eigen::Index i = 0; i < n; ++i) row << ',' << traj.states[k][i];
        os << row.str() << '\n';
    }
}

}  // namespace latinhib
