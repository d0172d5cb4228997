#include "latinhib/config.hpp"

#include <fstream>
#include <set>

namespace latinhib {

namespace {

using nlohmann::json;

void allow_only(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in '" + where + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
    return v.get<double>();
}

double positive(const json& obj, const char* key, const std::string& where, double fallback) {
    const double v = number(obj, key, where, fallback);
    if (!(v > 0.0)) throw ConfigError("'" + where + "." + key + "' must be positive");
    return v;
}

std::size_t count(const json& obj, const char* key, const std::string& where, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ConfigError("'" + where + "." + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ConfigError("'" + where + "." + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

ParameterSet parse_parameters(const json& obj, const std::string& where, ParameterSet p) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
        bool found = false;
        for (const auto& f : parameter_fields()) {
            if (f.name == k) {
                if (!v.is_number()) throw ConfigError("'" + where + "." + k + "' must be a number");
                p.*f.member = v.get<double>();
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown key '" + k + "' in '" + where + "'");
    }
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return p;
}

CorrectionMode parse_correction(const std::string& s) {
    if (s == "none") return CorrectionMode::none;
    if (s == "attenuation") return CorrectionMode::attenuation;
    if (s == "two_port") return CorrectionMode::attenuation_and_loss;
    throw ConfigError("graph.correction must be one of none, attenuation, two_port");
}

CompartmentGraph parse_graph(const json& g) {
    allow_only(g, "graph", {"vertices", "edges", "width_um", "width_factor", "diffusivity_m2_s", "correction"});
    const double width_factor = positive(g, "width_factor", "graph", 1.0);
    const double diffusivity = positive(g, "diffusivity_m2_s", "graph", 4.9e-10);
    std::optional<double> width;
    if (g.contains("width_um")) width = positive(g, "width_um", "graph", 0.0) * 1e-6;

    if (!g.contains("vertices") || !g.contains("edges")) {
        throw ConfigError("graph needs both 'vertices' and 'edges'");
    }
    if (!g.at("vertices").is_array() || !g.at("edges").is_array()) {
        throw ConfigError("graph.vertices and graph.edges must be arrays");
    }
    std::vector<Compartment> vs;
    for (const json& v : g.at("vertices")) {
        allow_only(v, "graph.vertices[]", {"id", "class"});
        const std::string id = text(v, "id", "graph.vertices[]", "");
        const std::string cls = text(v, "class", "graph.vertices[]", "");
        if (id.empty()) throw ConfigError("graph.vertices[] needs a non-empty 'id'");
        if (cls != "A" && cls != "B") throw ConfigError("vertex '" + id + "' class must be \"A\" or \"B\"");
        vs.push_back({id, cls == "A" ? CompartmentClass::A : CompartmentClass::B});
    }
    std::vector<CompartmentGraph::ChannelSpec> es;
    for (const json& e : g.at("edges")) {
        allow_only(e, "graph.edges[]", {"from", "to", "length_um", "width_um"});
        CompartmentGraph::ChannelSpec c;
        c.a = text(e, "from", "graph.edges[]", "");
        c.b = text(e, "to", "graph.edges[]", "");
        if (!e.contains("length_um")) throw ConfigError("graph.edges[] needs 'length_um'");
        c.length = positive(e, "length_um", "graph.edges[]", 0.0) * 1e-6;
        if (e.contains("width_um")) c.width = positive(e, "width_um", "graph.edges[]", 0.0) * 1e-6;
        es.push_back(c);
    }
    try {
        return CompartmentGraph::from_ids(std::move(vs), es, width, width_factor, diffusivity);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("graph: ") + ex.what());
    }
}

}  // namespace

NetworkModel ExperimentConfig::model() const { return corrected_network(graph, params_a, b(), correction); }

ExperimentConfig parse_config(const json& doc) {
    allow_only(doc, "<root>", {"graph", "parameters", "parameters_B", "analyze", "simulate", "sweep", "validate"});
    ExperimentConfig cfg;

    if (doc.contains("graph")) {
        const json& g = doc.at("graph");
        if (g.is_object() && !g.contains("vertices") && !g.contains("edges")) {
            // Geometry-only block: keep the default pair but apply the globals.
            allow_only(g, "graph", {"width_um", "width_factor", "diffusivity_m2_s", "correction"});
            json full = g;
            full["vertices"] = json::array({{{"id", "A1"}, {"class", "A"}}, {{"id", "B1"}, {"class", "B"}}});
            full["edges"] = json::array({{{"from", "A1"}, {"to", "B1"}, {"length_um", 500.0}}});
            cfg.graph = parse_graph(full);
        } else {
            cfg.graph = parse_graph(g);
        }
        cfg.correction = parse_correction(text(g, "correction", "graph", "none"));
    }
    if (doc.contains("parameters")) cfg.params_a = parse_parameters(doc.at("parameters"), "parameters", ParameterSet{});
    if (doc.contains("parameters_B")) {
        cfg.params_b = parse_parameters(doc.at("parameters_B"), "parameters_B", cfg.params_a);
    }

    if (doc.contains("analyze")) {
        const json& a = doc.at("analyze");
        allow_only(a, "analyze", {"grid_points", "grid_floor_M", "linear_fill", "dedupe_rel", "marginal_band"});
        auto& fp = cfg.fixed_points;
        fp.grid_points = static_cast<int>(count(a, "grid_points", "analyze", static_cast<std::size_t>(fp.grid_points)));
        if (fp.grid_points < 2) throw ConfigError("'analyze.grid_points' must be at least 2");
        fp.grid_floor = positive(a, "grid_floor_M", "analyze", fp.grid_floor);
        fp.linear_fill = static_cast<int>(count(a, "linear_fill", "analyze", static_cast<std::size_t>(fp.linear_fill)));
        fp.dedupe_rel = positive(a, "dedupe_rel", "analyze", fp.dedupe_rel);
        fp.marginal_band = positive(a, "marginal_band", "analyze", fp.marginal_band);
    }

    if (doc.contains("simulate")) {
        const json& s = doc.at("simulate");
        allow_only(s, "simulate",
                   {"t_end_h", "sample_interval_h", "rtol", "atol_M", "method", "seed_amount_M",
                    "steady_threshold_per_s", "steady_window_h"});
        auto& sim = cfg.simulate;
        auto& c = sim.controls;
        sim.t_end = positive(s, "t_end_h", "simulate", sim.t_end / 3600.0) * 3600.0;
        c.sample_interval = positive(s, "sample_interval_h", "simulate", c.sample_interval / 3600.0) * 3600.0;
        c.integrator.rtol = positive(s, "rtol", "simulate", c.integrator.rtol);
        c.integrator.atol = positive(s, "atol_M", "simulate", c.integrator.atol);
        sim.seed_amount = positive(s, "seed_amount_M", "simulate", sim.seed_amount);
        c.steady_threshold = positive(s, "steady_threshold_per_s", "simulate", c.steady_threshold);
        c.steady_window = positive(s, "steady_window_h", "simulate", c.steady_window / 3600.0) * 3600.0;
        const std::string method = text(s, "method", "simulate", "rosenbrock");
        if (method == "rosenbrock") c.integrator.method = IntegratorMethod::rosenbrock;
        else if (method == "dopri5") c.integrator.method = IntegratorMethod::dopri5;
        else throw ConfigError("simulate.method must be rosenbrock or dopri5");
    }

    cfg.sweep.base = cfg.params_a;
    cfg.sweep.width_factor = cfg.graph.width_factor();
    cfg.sweep.diffusivity = cfg.graph.diffusivity();
    cfg.sweep.fixed_points = cfg.fixed_points;
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        allow_only(s, "sweep",
                   {"p_Ri_min_M", "p_Ri_max_M", "p_Ri_points", "length_min_um", "length_max_um", "length_points",
                    "length_spacing"});
        const std::string spacing = text(s, "length_spacing", "sweep", "linear");
        if (spacing != "linear" && spacing != "log") throw ConfigError("sweep.length_spacing must be linear or log");
        try {
            cfg.sweep.p_Ri = make_axis(positive(s, "p_Ri_min_M", "sweep", 1e-10), positive(s, "p_Ri_max_M", "sweep", 1e-4),
                                       count(s, "p_Ri_points", "sweep", 64), AxisSpacing::log);
            cfg.sweep.lengths = make_axis(positive(s, "length_min_um", "sweep", 100.0) * 1e-6,
                                          positive(s, "length_max_um", "sweep", 6000.0) * 1e-6,
                                          count(s, "length_points", "sweep", 64),
                                          spacing == "log" ? AxisSpacing::log : AxisSpacing::linear);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("sweep: ") + e.what());
        }
    }

    if (doc.contains("validate")) {
        const json& v = doc.at("validate");
        allow_only(v, "validate", {"compare_pde", "pde_cells", "pde_t_end_h", "quotient_tol", "jacobian_tol"});
        auto& val = cfg.validate;
        if (v.contains("compare_pde")) {
            if (!v.at("compare_pde").is_boolean()) throw ConfigError("'validate.compare_pde' must be a boolean");
            val.compare_pde = v.at("compare_pde").get<bool>();
        }
        val.pde_cells = count(v, "pde_cells", "validate", val.pde_cells);
        if (val.pde_cells < 50) throw ConfigError("'validate.pde_cells' must be at least 50");
        val.pde_t_end = positive(v, "pde_t_end_h", "validate", val.pde_t_end / 3600.0) * 3600.0;
        val.quotient_tol = positive(v, "quotient_tol", "validate", val.quotient_tol);
        val.jacobian_tol = positive(v, "jacobian_tol", "validate", val.jacobian_tol);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    return parse_config(doc);
}

}  // namespace latinhib
