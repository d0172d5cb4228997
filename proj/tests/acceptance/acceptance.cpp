// Acceptance report: one line per criterion, "[PASS]" or "[FAIL]" followed by
// the measured numbers. Exits 0 once the report is complete; with --strict the
// exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latinhib/channel1d.hpp"
#include "latinhib/graph.hpp"
#include "latinhib/kinetics.hpp"
#include "latinhib/network.hpp"
#include "latinhib/patterning.hpp"
#include "latinhib/simulate.hpp"
#include "latinhib/sweep.hpp"
#include "latinhib/transceiver.hpp"

using namespace latinhib;

namespace {

constexpr double D = 4.9e-10;
constexpr double kLength = 500e-6;
constexpr double kWidthFactor = 1.0;

struct Result {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Every rate, gain and level scaled by U[0.5, 1.5]; Hill coefficients are
// structural and stay at 2.
ParameterSet draw_parameters(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    ParameterSet p;
    for (const auto& f : parameter_fields()) {
        if (f.member == &ParameterSet::n_RA || f.member == &ParameterSet::n_T) continue;
        p.*f.member *= u(rng);
    }
    p.validate();
    return p;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// Central difference with one Richardson step.
double derivative(const std::function<double(double)>& f, double x) {
    const double h = 1e-3 * x;
    const double d1 = (f(x + h) - f(x - h)) / (2 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4 * d2 - d1) / 3;
}

NetworkModel reference_pair() { return NetworkModel(CompartmentGraph::pair(kLength, kWidthFactor, D), ParameterSet{}); }

// 1. ODE side of the two-compartment time course.
Result time_course_ode() {
    const auto t0 = Clock::now();
    const NetworkModel m = reference_pair();
    const Trajectory tr = integrate(m, default_initial_state(m), 200 * 3600.0);
    const double secs = seconds_since(t0);
    if (!tr.steady) return {false, "not steady by 200 h"};
    const Eigen::VectorXd& y = tr.final_state();
    const double ra = y[m.layout().r_a(0)];
    const double rb = y[m.layout().r_b(0)];
    const bool contrasting = std::abs(ra - rb) > 0.5 * std::max(ra, rb);
    const Eigen::Index obs = high_receiver_component(m, y);
    const double tau = estimate_time_constant(tr, obs);
    const bool ok = contrasting && std::abs(tau - 22.0) <= 0.3 * 22.0 && secs < 10.0;
    return {ok, fmt("R_A = %.4g M, R_B = %.4g M, contrasting = %s, tau = %.3g h (target 22 h +-30%%), runtime %.2f s",
                    ra, rb, contrasting ? "yes" : "no", tau, secs)};
}

// 2. Channel model against the compartmental model.
Result time_course_channel() {
    const auto t0 = Clock::now();
    ComparisonOptions opt;
    opt.width_factor = kWidthFactor;
    const ComparisonReport r = compare_models(ParameterSet{}, ParameterSet{}, kLength, opt);
    const double secs = seconds_since(t0);
    const bool contrasting = r.pde.contrasting && r.ode_plain.contrasting;
    const bool ratio = r.tau_ratio >= 0.6 && r.tau_ratio <= 1.2;
    const bool match = r.max_rel_two_port <= 0.10;
    const bool ok = contrasting && ratio && match && secs < 120.0;
    return {ok, fmt("contrasting PDE/ODE = %s/%s, tau PDE %.3g h / ODE %.3g h = %.3f (need [0.6, 1.2]), "
                    "steady-state rel diff: corrected %.2e (need <= 0.1), attenuation only %.3f, uncorrected %.3f, "
                    "runtime %.1f s",
                    r.pde.contrasting ? "yes" : "no", r.ode_plain.contrasting ? "yes" : "no", r.pde.tau_hours,
                    r.ode_plain.tau_hours, r.tau_ratio, r.max_rel_two_port, r.max_rel_corrected, r.max_rel_plain,
                    secs)};
}

// 3. Patterned region of the (p_Ri, l12) plane.
Result patterned_region() {
    const auto t0 = Clock::now();
    SweepSpec spec = SweepSpec::defaults();
    spec.width_factor = kWidthFactor;
    const SweepGrid g = run_sweep(spec);

    const ParameterSet base;
    const bool reference = classify_point(base, 5e-7, kLength, kWidthFactor, D).value == CellValue::patterned;

    std::size_t low_bad = 0, high_bad = 0;
    for (double l : g.lengths) {
        if (classify_point(base, 1e-12, l, kWidthFactor, D).value != CellValue::homogeneous) ++low_bad;
        if (classify_point(base, 1e-3, l, kWidthFactor, D).value != CellValue::homogeneous) ++high_bad;
    }

    // every column with a patterned cell must stop being patterned at some length
    std::size_t columns = 0, capped = 0, patterned = 0;
    double cap_min = 1e300, cap_max = 0.0;
    for (std::size_t c = 0; c < g.p_Ri.size(); ++c) {
        std::optional<double> first;
        for (std::size_t r = 0; r < g.lengths.size(); ++r) {
            if (g.at(r, c).value == CellValue::patterned) {
                ++patterned;
                if (!first) first = g.lengths[r];
            }
        }
        if (!first) continue;
        ++columns;
        const auto cap = length_cap(base, g.p_Ri[c], *first, 1.0, kWidthFactor, D);
        if (cap) {
            ++capped;
            cap_min = std::min(cap_min, *cap);
            cap_max = std::max(cap_max, *cap);
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = reference && low_bad == 0 && high_bad == 0 && columns > 0 && capped == columns && secs < 300.0;
    return {ok, fmt("(5e-7 M, 500 um) patterned = %s; non-homogeneous lengths at 1e-12 M: %zu, at 1e-3 M: %zu; "
                    "%zu/%zu patterned columns capped (%.3g..%.3g mm); %zu of %zu cells patterned; runtime %.1f s",
                    reference ? "yes" : "no", low_bad, high_bad, capped, columns, cap_min * 1e3, cap_max * 1e3,
                    patterned, g.cells.size(), secs)};
}

// 4. Slope of the reduced map against the full Jacobian spectrum.
Result slope_stability_concordance() {
    std::mt19937_64 rng(2024);
    std::size_t points = 0, marginal = 0, violations = 0, multi = 0;
    for (int draw = 0; draw < 50; ++draw) {
        const ParameterSet pa = draw_parameters(rng);
        const ParameterSet pb = draw_parameters(rng);
        const NetworkModel m(build_laplacian(CompartmentGraph::pair(kLength, kWidthFactor, D)), 1, pa, pb);
        const FixedPointReport rep = find_fixed_points(reduced_maps(m));
        if (rep.points.size() > 1) ++multi;
        for (const auto& fp : rep.points) {
            if (fp.label == Stability::marginal) {
                ++marginal;
                continue;
            }
            ++points;
            const double a = spectral_abscissa(full_jacobian(m, fp));
            const bool unstable_map = fp.slope > 1.0;
            if (unstable_map != (a > 0.0)) ++violations;
        }
    }
    return {violations == 0 && points > 0,
            fmt("%zu fixed points over 50 draws (%zu draws with several), %zu marginal skipped, %zu sign violations",
                points, multi, marginal, violations)};
}

// 5. Quotient eigenvalue on the parallelogram.
Result quotient_eigenvalue() {
    const NetworkModel m(CompartmentGraph::parallelogram(kLength, 700e-6, kWidthFactor, D), ParameterSet{});
    const FixedPointReport rep = find_fixed_points(reduced_maps(m));
    if (!rep.near_homogeneous) return {false, "no near-homogeneous fixed point"};
    const QuotientEigenReport q = verify_quotient_eigenvalue(m, rep.points[*rep.near_homogeneous], 1e-10);
    const double gap = std::abs(q.spectral_radius - q.quotient_product) / q.quotient_product;
    const bool ok = q.passed() && q.residual < 1e-10 && gap < 1e-10;
    return {ok, fmt("q = T'_AB T'_BA = %.6g, residual %.2e (need < 1e-10), spectral radius %.6g (rel gap %.1e)",
                    q.quotient_product, q.residual, q.spectral_radius, gap)};
}

// 6. Isolated blocks integrated to steady state against their static maps.
Result map_ode_equivalence() {
    std::mt19937_64 rng(77);
    SimulationControls c;
    c.sample_interval = 3600.0;
    const double t_end = 600 * 3600.0;
    double worst_cell = 0.0, worst_tx = 0.0;
    for (int k = 0; k < 50; ++k) {
        const ParameterSet p = draw_parameters(rng);

        const double R = log_uniform(rng, 1e-11, 1e-7);
        const Trajectory tc = integrate_system(cell_system(R, p), Eigen::VectorXd::Zero(4), t_end, c);
        const Eigen::Vector4d ref = cell_steady_state(R, p).as_vector();
        worst_cell = std::max(worst_cell, std::abs(tc.final_state()[3] - static_map_T(R, p)) / static_map_T(R, p));
        for (int i = 0; i < 4; ++i) worst_cell = std::max(worst_cell, std::abs(tc.final_state()[i] - ref[i]) / ref[i]);

        const auto g = CompartmentGraph::pair(log_uniform(rng, 100e-6, 3e-3), kWidthFactor, D);
        const Transceiver tx = Transceiver::a_to_b(build_laplacian(g), 1, p, p);
        const Eigen::VectorXd pI = Eigen::VectorXd::Constant(1, log_uniform(rng, 1e-12, 1e-9));
        SimulationControls ct = c;
        ct.integrator.upper_bound = Eigen::VectorXd::Constant(3, std::numeric_limits<double>::infinity());
        ct.integrator.upper_bound[2] = tx.p_R;
        const Trajectory tt = integrate_system(transceiver_system(tx, pI), tx.pack(tx.zero_state()), t_end, ct);
        const Eigen::VectorXd ss = tx.pack(transceiver_steady_state(tx, pI));
        for (Eigen::Index i = 0; i < ss.size(); ++i) {
            worst_tx = std::max(worst_tx, std::abs(tt.final_state()[i] - ss[i]) / ss[i]);
        }
    }
    const bool ok = worst_cell <= 1e-6 && worst_tx <= 1e-6;
    return {ok, fmt("50 parameter sets: worst rel diff cell %.2e, transceiver %.2e (need <= 1e-6)", worst_cell,
                    worst_tx)};
}

// 7. Analytic derivatives against finite differences.
Result derivative_suite() {
    const ParameterSet p;
    const auto g = CompartmentGraph::pair(kLength, kWidthFactor, D);
    const ReducedMaps maps = reduced_maps(NetworkModel(g, p));
    const StaticMap tbar = maps.Tbar_A();
    double w_ta = 0.0, w_tab = 0.0, w_tbar = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double s = static_cast<double>(i) / 19.0;
        const double R = 1e-11 * std::pow(1e4, s);   // input range of T_A
        const double z = 1e-12 * std::pow(1e4, s);   // synthase range of T_AB and T̄_A
        const double fa = derivative([&](double x) { return static_map_T(x, p); }, R);
        w_ta = std::max(w_ta, std::abs(static_map_T_prime(R, p) - fa) / std::abs(fa));
        const double fab = derivative(maps.T_AB.value, z);
        w_tab = std::max(w_tab, std::abs(maps.T_AB.slope(z) - fab) / std::abs(fab));
        const double fbar = derivative(tbar.value, z);
        w_tbar = std::max(w_tbar, std::abs(tbar.slope(z) - fbar) / std::abs(fbar));
    }
    const bool ok = w_ta <= 1e-6 && w_tab <= 1e-6 && w_tbar <= 1e-6;
    return {ok, fmt("20 log-spaced points: worst rel error T'_A %.1e, T'_AB %.1e, chain-rule T̄' %.1e (need <= 1e-6)",
                    w_ta, w_tab, w_tbar)};
}

// 8. Order preservation and contraction.
Result monotonicity() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SimulationControls c;
    const double t_end = 48 * 3600.0;
    const ParameterSet p;

    // cells: larger input, larger TetR, smaller synthase
    std::size_t cell_viol = 0;
    const Eigen::Vector4d cell_signs(1, 1, -1, -1);
    for (int k = 0; k < 20; ++k) {
        const double r_lo = log_uniform(rng, 1e-11, 1e-8);
        const double r_hi = r_lo * (1.0 + 4.0 * u(rng));
        Eigen::VectorXd a(4), b(4);
        for (int i = 0; i < 4; ++i) {
            a[i] = 1e-9 * u(rng);
            b[i] = 1e-9 * u(rng);
        }
        OrderedPair pr{a, b};
        for (int i = 0; i < 4; ++i) {
            pr.low[i] = cell_signs[i] > 0 ? std::min(a[i], b[i]) : std::max(a[i], b[i]);
            pr.high[i] = cell_signs[i] > 0 ? std::max(a[i], b[i]) : std::min(a[i], b[i]);
        }
        cell_viol += order_preservation(cell_system(r_lo, p), cell_system(r_hi, p), {pr}, cell_signs, t_end, c)
                         .violations;
    }

    // transceivers: larger synthase, everything larger
    std::size_t tx_viol = 0;
    const auto g = CompartmentGraph::parallelogram(kLength, 700e-6, kWidthFactor, D);
    const Transceiver tx = Transceiver::a_to_b(build_laplacian(g), g.count_a(), p, p);
    SimulationControls ct = c;
    ct.integrator.upper_bound = Eigen::VectorXd::Constant(tx.state_size(), std::numeric_limits<double>::infinity());
    ct.integrator.upper_bound.tail(tx.n_receiver).setConstant(tx.p_R);
    const Eigen::VectorXd tx_signs = Eigen::VectorXd::Ones(tx.state_size());
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd lo_in(tx.n_sender), hi_in(tx.n_sender);
        for (Eigen::Index i = 0; i < tx.n_sender; ++i) {
            lo_in[i] = log_uniform(rng, 1e-12, 1e-9);
            hi_in[i] = lo_in[i] * (1.0 + 4.0 * u(rng));
        }
        Eigen::VectorXd lo(tx.state_size()), hi(tx.state_size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            const double cap = i >= tx.n_sender + tx.n_receiver ? tx.p_R : 1e-8;
            const double x = cap * u(rng), y = cap * u(rng);
            lo[i] = std::min(x, y);
            hi[i] = std::max(x, y);
        }
        tx_viol += order_preservation(transceiver_system(tx, lo_in), transceiver_system(tx, hi_in), {{lo, hi}},
                                      tx_signs, t_end, ct)
                       .violations;
    }

    // full network in its cone
    const NetworkModel m = reference_pair();
    const Eigen::VectorXd signs = m.layout().cone_signs();
    std::vector<OrderedPair> pairs;
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd a(signs.size()), b(signs.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a[i] = 1e-9 * u(rng);
            b[i] = 1e-9 * u(rng);
        }
        OrderedPair pr{a, b};
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            pr.low[i] = signs[i] > 0 ? std::min(a[i], b[i]) : std::max(a[i], b[i]);
            pr.high[i] = signs[i] > 0 ? std::max(a[i], b[i]) : std::min(a[i], b[i]);
        }
        pairs.push_back(std::move(pr));
    }
    const MonotonicityReport net = monotonicity_probe(m, pairs, t_end, c);

    // contraction at random feasible transceiver states
    double worst_mu = -1e300;
    for (int k = 0; k < 100; ++k) {
        TransceiverState s = tx.zero_state();
        for (Eigen::Index i = 0; i < s.sender.size(); ++i) s.sender[i] = 1e-6 * u(rng);
        for (Eigen::Index i = 0; i < s.receiver.size(); ++i) s.receiver[i] = 1e-6 * u(rng);
        for (Eigen::Index i = 0; i < s.complex.size(); ++i) s.complex[i] = tx.p_R * u(rng);
        worst_mu = std::max(worst_mu, contraction_check(tx, s).measure);
    }

    const bool ok = cell_viol == 0 && tx_viol == 0 && net.passed() && worst_mu < 0.0;
    return {ok, fmt("violations: cells %zu/20, transceivers %zu/20, network %zu/%zu; max mu1 over 100 states %.3e 1/s",
                    cell_viol, tx_viol, net.violations, net.pairs, worst_mu)};
}

// 9. Channel solver against the closed form and mass conservation.
Result pde_verification() {
    const double gamma = ParameterSet{}.gamma_X;
    ChannelGeometry g;
    g.length = 1e-3;
    g.width = 500e-6;
    g.cells = 200;
    g.diffusivity = D;
    const double u0 = 1e-9;
    const ChannelField f = steady_field(g, ChannelEnd::fixed, ChannelEnd::sealed, gamma, 0.0, 0.0, u0);
    const Eigen::VectorXd x = f.centres();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = analytic_profile(x[i], u0, g.length, gamma, D);
        worst = std::max(worst, std::abs(f.c[i] - a) / a);
    }

    g.cells = 100;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1e-9);
    ChannelField s = ChannelField::uniform(g, ChannelEnd::sealed, ChannelEnd::sealed, 0.0);
    for (Eigen::Index i = 0; i < s.c.size(); ++i) s.c[i] = u(rng);
    const double m0 = s.total_amount();
    ChannelStepper st(g, ChannelEnd::sealed, ChannelEnd::sealed, 0.0);
    for (int k = 0; k < 10000; ++k) st.step(s, 10.0);
    const double drift = std::abs(s.total_amount() - m0) / m0;

    const bool ok = worst <= 1e-3 && drift <= 1e-10;
    return {ok, fmt("cosh profile max rel error %.2e (need <= 1e-3); sealed mass drift over 1e4 steps %.2e "
                    "(need <= 1e-10)",
                    worst, drift)};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    struct Criterion {
        const char* name;
        Result (*run)();
    };
    const Criterion criteria[] = {
        {"1 two-compartment time course (ODE)", time_course_ode},
        {"2 channel model vs compartment model", time_course_channel},
        {"3 patterned region of the sweep", patterned_region},
        {"4 reduced-map slope vs Jacobian sign", slope_stability_concordance},
        {"5 quotient eigenvalue on the parallelogram", quotient_eigenvalue},
        {"6 isolated blocks vs static maps", map_ode_equivalence},
        {"7 analytic derivatives", derivative_suite},
        {"8 order preservation and contraction", monotonicity},
        {"9 channel solver verification", pde_verification},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("error: ") + e.what()};
        }
        if (!r.pass) ++failed;
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", c.name, r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return strict ? failed : 0;
}
