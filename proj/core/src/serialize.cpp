#include "latinhib/serialize.hpp"

#include <string>

namespace latinhib {

using nlohmann::json;

json to_json(const ParameterSet& p) {
    json j = json::object();
    for (const auto& f : parameter_fields()) j[std::string(f.name)] = p.*f.member;
    return j;
}

json to_json(const FixedPoint& fp) {
    return {{"z_A_M", fp.z_a}, {"z_B_M", fp.z_b}, {"slope", fp.slope}, {"label", to_string(fp.label)}};
}

json to_json(const FixedPointReport& r, const Classification& c) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back(to_json(p));
    json j = {{"points", pts},
              {"bracket_M", {r.bracket_lo, r.bracket_hi}},
              {"is_patterned", r.is_patterned},
              {"classification", c.patterned ? "patterned" : "homogeneous"},
              {"marginal", c.marginal}};
    j["near_homogeneous"] = r.near_homogeneous ? json(*r.near_homogeneous) : json(nullptr);
    return j;
}

json to_json(const SweepCell& c) {
    json j = {{"p_Ri_M", c.p_Ri},
              {"length_um", c.length * 1e6},
              {"value", static_cast<int>(c.value)},
              {"fixed_points", c.fixed_points},
              {"middle_slope", c.middle_slope}};
    if (!c.error.empty()) j["error"] = c.error;
    return j;
}

json to_json(const SweepGrid& g) {
    json cells = json::array();
    for (const auto& c : g.cells) cells.push_back(to_json(c));
    json lengths = json::array();
    for (double l : g.lengths) lengths.push_back(l * 1e6);
    return {{"p_Ri_M", g.p_Ri}, {"length_um", lengths}, {"cells", cells}};
}

json to_json(const QuotientEigenReport& r) {
    return {{"quotient_product", r.quotient_product},
            {"residual", r.residual},
            {"spectral_radius", r.spectral_radius},
            {"largest_real_eigenvalue", r.largest_real_eigenvalue},
            {"eigenvector_ok", r.eigenvector_ok},
            {"is_largest", r.is_largest},
            {"positive", r.positive},
            {"passed", r.passed()},
            {"message", r.message}};
}

json to_json(const Observables& o) {
    return {{"p_I_A_M", o.p_I_a}, {"p_I_B_M", o.p_I_b},          {"R_A_M", o.R_a},
            {"R_B_M", o.R_b},     {"tau_h", o.tau_hours},        {"steady", o.steady},
            {"contrasting", o.contrasting}};
}

json to_json(const ComparisonReport& r) {
    return {{"length_um", r.length * 1e6},
            {"width_um", r.width * 1e6},
            {"cells", r.cells},
            {"correction_factor", r.factor},
            {"pde", to_json(r.pde)},
            {"ode_plain", to_json(r.ode_plain)},
            {"ode_attenuation", to_json(r.ode_corrected)},
            {"ode_two_port", to_json(r.ode_two_port)},
            {"max_rel_plain", r.max_rel_plain},
            {"max_rel_attenuation", r.max_rel_corrected},
            {"max_rel_two_port", r.max_rel_two_port},
            {"tau_ratio_pde_over_ode", r.tau_ratio}};
}

json to_json(const IntegrationStats& s) {
    return {{"accepted", s.accepted},
            {"rejected", s.rejected},
            {"projections", s.projections},
            {"projected_mass_M", s.projected_mass},
            {"max_projection_M", s.max_projection}};
}

json envelope(const char* kind, json body) {
    json j = {{"schema_version", schema_version}, {"kind", kind}};
    for (auto& [k, v] : body.items()) j[k] = std::move(v);
    return j;
}

}  // namespace latinhib
