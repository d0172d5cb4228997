#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "latinhib/serialize.hpp"

namespace latinhib::cli {

namespace {

using nlohmann::json;

std::filesystem::path prepare(const CommandOptions& opt, const char* name) {
    std::filesystem::create_directories(opt.out_dir);
    return opt.out_dir / name;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << j.dump(2) << '\n';
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << std::scientific << v;
    return s.str();
}

// Prints the equitability diagnostic; returns the quotient data when equitable.
std::optional<LaplacianPair> require_equitable(const NetworkModel& m, std::ostream& err) {
    const EquitableResult r = check_equitable(m.laplacian(), m.count_a());
    if (const auto* bad = std::get_if<NotEquitable>(&r)) {
        err << "partition is not equitable: compartments '" << m.ids()[bad->vertex] << "' and '"
            << m.ids()[bad->other_vertex] << "' differ by " << sci(bad->discrepancy)
            << " (relative) in their cross-class weight\n";
        return std::nullopt;
    }
    if (!m.uniform_loss()) {
        err << "channel end losses differ within a class; the reduced maps do not apply\n";
        return std::nullopt;
    }
    return std::get<LaplacianPair>(r);
}

}  // namespace

std::size_t seed_compartment(std::uint64_t seed, std::size_t compartments) {
    if (compartments == 0) throw std::invalid_argument("seed_compartment: empty network");
    if (seed == 0) return 0;
    std::mt19937_64 rng(seed);
    return std::uniform_int_distribution<std::size_t>(0, compartments - 1)(rng);
}

int cmd_analyze(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const NetworkModel m = cfg.model();
    const auto lp = require_equitable(m, err);
    if (!lp) return exit_not_equitable;
    const ReducedMaps maps = reduced_maps(m);
    const FixedPointReport rep = find_fixed_points(maps, cfg.fixed_points);
    const Classification c = classify_patterning(rep);

    out << "network: " << m.count_a() << " A and " << m.count_b() << " B compartments, d_AB = " << sci(lp->d_ab())
        << " 1/s, d_BA = " << sci(lp->d_ba()) << " 1/s\n";
    out << "fixed points (" << rep.points.size() << "):\n";
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const FixedPoint& fp = rep.points[i];
        out << "  z_A = " << sci(fp.z_a) << " M  z_B = " << sci(fp.z_b) << " M  slope = " << std::setprecision(6)
            << fp.slope << "  " << to_string(fp.label);
        if (rep.near_homogeneous && *rep.near_homogeneous == i) out << "  (near-homogeneous)";
        out << '\n';
    }
    out << "classification: " << (c.patterned ? "patterned" : "homogeneous") << (c.marginal ? " (marginal)" : "")
        << '\n';

    json body = to_json(rep, c);
    body["d_AB_per_s"] = lp->d_ab();
    body["d_BA_per_s"] = lp->d_ba();
    body["parameters_A"] = to_json(m.params_a());
    body["parameters_B"] = to_json(m.params_b());
    write_json(prepare(opt, "analyze.json"), envelope("analyze", body));
    return exit_ok;
}

int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const NetworkModel m = cfg.model();
    const std::size_t seeded = seed_compartment(opt.seed, m.ids().size());
    const Eigen::VectorXd y0 = default_initial_state(m, seeded, cfg.simulate.seed_amount);
    Trajectory tr;
    try {
        tr = integrate(m, y0, cfg.simulate.t_end, cfg.simulate.controls);
    } catch (const StiffnessError& e) {
        err << "simulation failed: " << e.what() << '\n';
        return exit_not_converged;
    }
    {
        std::ofstream csv(prepare(opt, "trajectory.csv"));
        if (!csv) throw std::runtime_error("cannot write trajectory.csv");
        write_trajectory_csv(csv, tr);
    }

    const StateLayout& s = m.layout();
    const Eigen::VectorXd& y = tr.final_state();
    json finals = json::object();
    out << "seeded compartment: " << m.ids()[seeded] << '\n';
    for (Eigen::Index v = 0; v < s.n_a + s.n_b; ++v) {
        const bool a = v < s.n_a;
        const double pI = a ? y[s.cell_a(Species::p_I, v)] : y[s.cell_b(Species::p_I, v - s.n_a)];
        const double R = a ? y[s.r_a(v)] : y[s.r_b(v - s.n_a)];
        const std::string& id = m.ids()[static_cast<std::size_t>(v)];
        out << "  " << id << ": p_I = " << sci(pI) << " M, R = " << sci(R) << " M\n";
        finals[id] = {{"p_I_M", pI}, {"R_M", R}};
    }
    json body = {{"seed", opt.seed},
                 {"seeded_compartment", m.ids()[seeded]},
                 {"t_end_h", cfg.simulate.t_end / 3600.0},
                 {"steady", tr.steady},
                 {"final", finals},
                 {"final_derivative_norm_per_s", tr.derivative_norm.back()},
                 {"stats", to_json(tr.stats)}};
    int code = exit_ok;
    if (tr.steady) {
        const Eigen::Index obs = high_receiver_component(m, y);
        const double tau = estimate_time_constant(tr, obs);
        out << "converged; steady since " << std::setprecision(4) << tr.steady_since / 3600.0
            << " h; time constant of " << tr.names[static_cast<std::size_t>(obs)] << " = " << tau << " h\n";
        body["steady_since_h"] = tr.steady_since / 3600.0;
        body["time_constant_h"] = tau;
        body["observable"] = tr.names[static_cast<std::size_t>(obs)];
    } else {
        out << "not converged by t_end (scaled derivative " << sci(tr.derivative_norm.back()) << " 1/s)\n";
        code = exit_not_converged;
    }
    write_json(prepare(opt, "simulate.json"), envelope("simulate", body));
    return code;
}

int cmd_sweep(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream&) {
    SweepSpec spec = cfg.sweep;
    if (opt.threads) spec.threads = opt.threads;
    const SweepGrid grid = run_sweep(spec);
    {
        std::ofstream csv(prepare(opt, "sweep.csv"));
        if (!csv) throw std::runtime_error("cannot write sweep.csv");
        write_sweep_csv(csv, grid);
    }
    std::size_t counts[4] = {0, 0, 0, 0};  // failed, homogeneous, patterned, marginal
    for (const auto& c : grid.cells) ++counts[static_cast<int>(c.value) + 1];
    out << "sweep " << grid.lengths.size() << " x " << grid.p_Ri.size() << ": " << counts[2] << " patterned, "
        << counts[1] << " homogeneous, " << counts[3] << " marginal, " << counts[0] << " failed\n";
    json body = to_json(grid);
    body["width_factor"] = spec.width_factor;
    body["diffusivity_m2_s"] = spec.diffusivity;
    write_json(prepare(opt, "sweep.json"), envelope("sweep", body));
    return exit_ok;
}

int cmd_validate(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    const NetworkModel m = cfg.model();
    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool passed, const std::string& detail) {
        checks.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
        out << (passed ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << '\n';
        all = all && passed;
    };
    auto skip = [&](const std::string& name, const std::string& reason) {
        checks.push_back({{"name", name}, {"skipped", true}, {"reason", reason}});
        out << "SKIP " << name << ": " << reason << '\n';
    };

    {
        const ContractionReport ab = contraction_check(m.tx_ab(), m.tx_ab().zero_state());
        const ContractionReport ba = contraction_check(m.tx_ba(), m.tx_ba().zero_state());
        record("contraction_at_zero", ab.measure < 0 && ba.measure < 0,
               "mu1 = " + sci(ab.measure) + ", " + sci(ba.measure) + " 1/s");
    }

    std::ostringstream why;
    const auto lp = require_equitable(m, why);
    if (!lp) {
        std::string reason = why.str();
        if (!reason.empty() && reason.back() == '\n') reason.pop_back();
        for (const char* name : {"steady_state_consistency", "block_jacobian", "slope_stability_concordance",
                                 "contraction_at_fixed_points", "quotient_eigenvalue"}) {
            skip(name, reason);
        }
    } else {
        const ReducedMaps maps = reduced_maps(m);
        const FixedPointReport rep = find_fixed_points(maps, cfg.fixed_points);
        std::size_t concordant = 0;
        std::size_t judged = 0;
        double worst_eq = 0.0;
        double worst_jac = 0.0;
        double worst_mu = -std::numeric_limits<double>::infinity();
        for (const FixedPoint& fp : rep.points) {
            const NetworkState st = assemble_steady_state(m, fp);
            worst_eq = std::max(worst_eq, scaled_derivative_norm(st.values, network_rhs(m, st.values), 1e-15));
            const Eigen::MatrixXd J = full_jacobian(m, fp);
            const Eigen::MatrixXd Jd = network_jacobian(m, st.values);
            worst_jac = std::max(worst_jac, (J - Jd).cwiseAbs().maxCoeff() / Jd.cwiseAbs().maxCoeff());
            if (fp.label != Stability::marginal) {
                ++judged;
                const double abscissa = spectral_abscissa(J);
                if ((fp.slope > 1.0) == (abscissa > 0.0)) ++concordant;
            }
            const auto& s = m.layout();
            const auto ab = m.tx_ab().unpack(st.values.segment(s.tx_ab(), m.tx_ab().state_size()));
            const auto ba = m.tx_ba().unpack(st.values.segment(s.tx_ba(), m.tx_ba().state_size()));
            worst_mu = std::max({worst_mu, contraction_check(m.tx_ab(), ab).measure,
                                 contraction_check(m.tx_ba(), ba).measure});
        }
        record("steady_state_consistency", worst_eq < 1e-9,
               "max scaled derivative " + sci(worst_eq) + " 1/s at assembled fixed points");
        record("block_jacobian", worst_jac < cfg.validate.jacobian_tol,
               "max relative difference " + sci(worst_jac));
        record("slope_stability_concordance", concordant == judged,
               std::to_string(concordant) + "/" + std::to_string(judged) + " fixed points concordant");
        record("contraction_at_fixed_points", worst_mu < 0.0, "max mu1 = " + sci(worst_mu) + " 1/s");
        const FixedPoint& mid = rep.points[*rep.near_homogeneous];
        const QuotientEigenReport q = verify_quotient_eigenvalue(m, mid, cfg.validate.quotient_tol);
        record("quotient_eigenvalue", q.passed(),
               "q = " + sci(q.quotient_product) + ", spectral radius " + sci(q.spectral_radius) + ", residual " +
                   sci(q.residual));
    }

    const auto& g = cfg.graph;
    if (!cfg.validate.compare_pde) {
        skip("ode_vs_pde", "disabled in config");
    } else if (g.size() != 2 || g.channels().size() != 1) {
        skip("ode_vs_pde", "needs a two-compartment network");
    } else {
        const Channel& ch = g.channels().front();
        ComparisonOptions co;
        co.width_factor = ch.length / g.channel_width(ch);
        co.diffusivity = g.diffusivity();
        co.cells = cfg.validate.pde_cells;
        co.t_end = cfg.validate.pde_t_end;
        try {
            const ComparisonReport r = compare_models(cfg.params_a, cfg.b(), ch.length, co);
            record("ode_vs_pde_contrasting", r.pde.contrasting && r.ode_plain.contrasting,
                   std::string("pde ") + (r.pde.contrasting ? "contrasting" : "flat") + ", ode " +
                       (r.ode_plain.contrasting ? "contrasting" : "flat"));
            record("ode_vs_pde_time_constant", r.tau_ratio >= 0.6 && r.tau_ratio <= 1.2,
                   "ratio " + sci(r.tau_ratio));
            record("ode_vs_pde_steady_state", r.max_rel_two_port < 0.1,
                   "two-port corrected max relative difference " + sci(r.max_rel_two_port));
            checks.back()["comparison"] = to_json(r);
        } catch (const ConvergenceError& e) {
            record("ode_vs_pde", false, e.what());
        }
    }

    write_json(prepare(opt, "validate.json"), envelope("validate", {{"passed", all}, {"checks", checks}}));
    if (!all) err << "validation failed\n";
    return all ? exit_ok : exit_validation;
}

int run(const std::string& command, const std::filesystem::path& config, const CommandOptions& opt, std::ostream& out,
        std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
    try {
        if (command == "analyze") return cmd_analyze(cfg, opt, out, err);
        if (command == "simulate") return cmd_simulate(cfg, opt, out, err);
        if (command == "sweep") return cmd_sweep(cfg, opt, out, err);
        if (command == "validate") return cmd_validate(cfg, opt, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        err << "invalid model: " << e.what() << '\n';
        return exit_config;
    }
    err << "unknown command '" << command << "'\n";
    return exit_config;
}

}  // namespace latinhib::cli
