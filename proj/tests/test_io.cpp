#include <doctest.h>

#include <cmath>

#include "sims/errors.hpp"
#include "sims/io.hpp"

using namespace sims;

namespace {

json base() { return json::parse(R"({"a": 1, "phi": 0, "lambda": [0, -1], "potential": "-x^4"})"); }

}  // namespace

TEST_CASE("parse_spec: minimal spec") {
    ProblemSpec ps = parse_spec(base());
    CHECK(ps.problem.a == 1);
    CHECK(ps.problem.phi == 0);
    CHECK(ps.problem.lambda == cplx(0, -1));
    CHECK(ps.config.horizon == ClassifyConfig{}.horizon);
}

TEST_CASE("parse_spec: unknown and missing keys") {
    json j = base();
    j["colour"] = "red";
    CHECK_THROWS_AS(parse_spec(j), SpecError);
    for (const char* k : {"a", "phi", "lambda", "potential"}) {
        json m = base();
        m.erase(k);
        INFO(k);
        CHECK_THROWS_AS(parse_spec(m), SpecError);
    }
    json c = base();
    c["config"] = {{"hrizon", 10}};
    CHECK_THROWS_AS(parse_spec(c), SpecError);
}

TEST_CASE("parse_spec: malformed values") {
    json l = base();
    l["lambda"] = json::array({1});
    CHECK_THROWS_AS(parse_spec(l), SpecError);
    json s = base();
    s["potential"] = 3;
    CHECK_THROWS_AS(parse_spec(s), SpecError);
    json r = base();
    r["config"] = {{"rho", 0.5}};
    CHECK_THROWS_AS(parse_spec(r), SpecError);
    json o = base();
    o["config"] = {{"use_oracle", 1}};
    CHECK_THROWS_AS(parse_spec(o), SpecError);
    json n = base();
    n["config"] = {{"N_max", 2.5}};
    CHECK_THROWS_AS(parse_spec(n), SpecError);
}

TEST_CASE("parse_spec: grammar errors surface as ParseError") {
    json j = base();
    j["potential"] = "x^^2";
    CHECK_THROWS_AS(parse_spec(j), ParseError);
}

TEST_CASE("apply_config: keys map onto the config") {
    ClassifyConfig c;
    apply_config(json::parse(R"j({"rho": 2, "N_max": 3, "horizon": 500, "use_oracle": false,
        "oracle_xmax": 100, "tol_ode": 1e-9, "psi": "x^(-2)", "schedule": {"X0": 5, "factor": 3, "max_steps": 6}})j"),
                 c);
    CHECK(c.rho == 2);
    CHECK(c.N_max == 3);
    CHECK(c.horizon == 500);
    CHECK_FALSE(c.use_oracle);
    CHECK(c.oracle_xmax == 100);
    CHECK(c.tol_ode == 1e-9);
    CHECK(c.psi_text == "x^(-2)");
    CHECK(c.schedule.X0 == 5);
    CHECK(c.schedule.factor == 3);
    CHECK(c.schedule.max_steps == 6);
}

TEST_CASE("load_spec: missing file is an IoError") {
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), IoError);
}

TEST_CASE("fmt17 round-trips doubles") {
    for (double v : {0.1, M_PI, 1e-300, -2.5e17}) CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("to_json: report fields and determinism") {
    ClassifyConfig c;
    c.use_oracle = false;
    RayProblem p = make_problem(1, 0, 0.0, "-(i*x)^3");
    ClassificationReport r = classify(p, c);
    json j = to_json(r, p);
    CHECK(j["verdict"] == "LimitPointI");
    CHECK(j["failure"] == "None");
    CHECK(j["primary_criterion"] == "delta");
    CHECK(j["criteria"].size() == 5);
    CHECK(j["M"].is_number());
    CHECK(j["envelope"].is_number());
    CHECK(j["admissible"].is_object());
    CHECK(j["problem"]["potential"].is_string());
    CHECK(to_json(classify(p, c), p).dump() == j.dump());
}

TEST_CASE("to_json: non-finite values become null") {
    TailVerdict v;
    v.kind = TailKind::Diverges;
    v.rate_hint = INFINITY;
    json j = to_json(v);
    CHECK(j["rate_hint"].is_null());
}
