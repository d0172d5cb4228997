#include <doctest.h>

#include <nlohmann/json.hpp>

#include "latinhib/config.hpp"
#include "latinhib/serialize.hpp"

using namespace latinhib;
using nlohmann::json;

TEST_CASE("empty document gives the reference pair") {
    const ExperimentConfig c = parse_config(json::object());
    CHECK(c.graph.size() == 2);
    CHECK(c.params_a.p_Ri == 5e-7);
    CHECK(c.correction == CorrectionMode::none);
    CHECK(c.simulate.t_end == 200 * 3600.0);
    CHECK(c.b().p_Ri == c.params_a.p_Ri);
}

TEST_CASE("units are converted on read") {
    const ExperimentConfig c = parse_config(json::parse(R"({
        "graph": {"vertices": [{"id": "a", "class": "A"}, {"id": "b", "class": "B"}],
                  "edges": [{"from": "a", "to": "b", "length_um": 800}], "width_factor": 2},
        "parameters": {"p_Ri": 1e-6},
        "parameters_B": {"nu": 0.02},
        "simulate": {"t_end_h": 10, "rtol": 1e-9, "method": "dopri5"},
        "sweep": {"p_Ri_points": 3, "length_points": 4}
    })"));
    CHECK(c.graph.channels()[0].length == doctest::Approx(800e-6));
    CHECK(c.graph.channel_width(c.graph.channels()[0]) == doctest::Approx(400e-6));
    CHECK(c.params_a.p_Ri == 1e-6);
    REQUIRE(c.params_b.has_value());
    CHECK(c.params_b->nu == 0.02);
    // B overrides layer on top of the A set
    CHECK(c.params_b->p_Ri == 1e-6);
    CHECK(c.simulate.t_end == doctest::Approx(36000.0));
    CHECK(c.simulate.controls.integrator.method == IntegratorMethod::dopri5);
    CHECK(c.sweep.p_Ri.size() == 3);
    CHECK(c.sweep.lengths.size() == 4);
}

TEST_CASE("bad documents are rejected") {
    CHECK_THROWS_AS(parse_config(json::parse(R"({"foo": 1})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"parameters": {"p_Ri": -1}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"parameters": {"bogus": 1}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"simulate": {"method": "euler"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"graph": {"vertices": [{"id": "a", "class": "C"}]}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"graph": {"correction": "magic"}})")), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("serialized documents carry the schema version") {
    const json p = to_json(ParameterSet{});
    CHECK(p.at("p_Ri").get<double>() == 5e-7);
    const json e = envelope("analyze", {{"x", 1}});
    CHECK(e.at("schema_version") == schema_version);
    CHECK(e.at("kind") == "analyze");
    CHECK(e.at("x") == 1);

    // parameters survive a round trip through the config reader
    const ExperimentConfig c = parse_config(json{{"parameters", p}});
    CHECK(c.params_a.K_T == ParameterSet{}.K_T);
}
