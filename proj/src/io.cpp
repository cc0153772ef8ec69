#include "sims/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sims/errors.hpp"

namespace sims {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw SpecError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw SpecError(where + ": unknown key \"" + k + "\"");
}

double get_num(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw SpecError(where + "." + key + ": expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw SpecError(where + "." + key + ": not finite");
    return d;
}

int get_int(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw SpecError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

template <class T>
void opt_num(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    if constexpr (std::is_integral_v<T>)
        out = get_int(j, key, where);
    else
        out = get_num(j, key, where);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json scaled(const Scaled& s) {
    json j;
    j["log_abs"] = num(s.log_abs());
    j["sign"] = s.m > 0 ? 1 : (s.m < 0 ? -1 : 0);
    return j;
}

json member(const MemberSummary& m) {
    json j;
    j["name"] = m.name;
    j["l2_increment"] = num(m.l2_increment);
    j["l2_saturates"] = m.l2_saturates;
    j["log_l2"] = num(m.log_l2);
    j["log_abs_end"] = num(m.log_abs_end);
    j["steps"] = m.steps;
    if (m.has_energy) {
        const EnergyBreakdown& e = m.energy;
        json en;
        en["E1"] = e.E1.empty() ? json(nullptr) : scaled(e.E1.back());
        en["E2"] = e.E2.empty() ? json(nullptr) : scaled(e.E2.back());
        en["E3"] = e.E3.empty() ? json(nullptr) : scaled(e.E3.back());
        en["increments"] = json::array({num(e.inc1), num(e.inc2), num(e.inc3)});
        en["stable"] = json::array({e.stable1, e.stable2, e.stable3});
        en["max_abs_E1_panel"] = num(e.max_abs_E1_panel);
        en["max_abs_E2_panel"] = num(e.max_abs_E2_panel);
        en["min_E2_panel_rel"] = num(e.min_E2_panel_rel);
        en["stabilizes"] = e.stabilizes();
        j["energy"] = en;
    }
    return j;
}

json criterion(const CriterionResult& c) {
    json j;
    j["id"] = c.id;
    j["outcome"] = to_string(c.outcome);
    if (c.id == "delta") j["N"] = c.N;
    if (c.integral) j["integral"] = to_json(*c.integral);
    if (c.tail) j["tail"] = to_json(*c.tail);
    if (c.grid_max) j["grid_max"] = num(*c.grid_max);
    j["detail"] = c.detail;
    return j;
}

}  // namespace

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void apply_config(const json& j, ClassifyConfig& c) {
    const std::string w = "config";
    reject_unknown(j,
                   {"rho", "N_max", "eps0", "horizon", "liminf_pos_tol", "psi", "window_fraction", "tail_samples",
                    "trend_slack", "conv_tol", "delta_div", "tol_quad", "schedule", "assumption_points",
                    "geometry_xmax", "n_x", "n_r", "r_max", "use_oracle", "oracle_xmax", "tol_ode", "saturation"},
                   w);
    opt_num(j, "rho", c.rho, w);
    opt_num(j, "N_max", c.N_max, w);
    opt_num(j, "eps0", c.eps0, w);
    opt_num(j, "horizon", c.horizon, w);
    opt_num(j, "liminf_pos_tol", c.liminf_pos_tol, w);
    opt_num(j, "window_fraction", c.window_fraction, w);
    opt_num(j, "tail_samples", c.tail_samples, w);
    opt_num(j, "trend_slack", c.trend_slack, w);
    opt_num(j, "conv_tol", c.improper.tol, w);
    opt_num(j, "delta_div", c.improper.delta_div, w);
    opt_num(j, "tol_quad", c.improper.quad_tol, w);
    opt_num(j, "assumption_points", c.assumption_points, w);
    opt_num(j, "geometry_xmax", c.geometry_xmax, w);
    opt_num(j, "n_x", c.n_x, w);
    opt_num(j, "n_r", c.n_r, w);
    opt_num(j, "r_max", c.r_max, w);
    opt_num(j, "oracle_xmax", c.oracle_xmax, w);
    opt_num(j, "tol_ode", c.tol_ode, w);
    opt_num(j, "saturation", c.saturation, w);
    if (j.contains("use_oracle")) {
        if (!j["use_oracle"].is_boolean()) throw SpecError("config.use_oracle: expected a boolean");
        c.use_oracle = j["use_oracle"].get<bool>();
    }
    if (j.contains("psi")) {
        if (!j["psi"].is_string()) throw SpecError("config.psi: expected a string");
        c.psi_text = j["psi"].get<std::string>();
        c.psi = parse(c.psi_text);
    }
    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        reject_unknown(s, {"X0", "factor", "max_steps"}, "config.schedule");
        opt_num(s, "X0", c.schedule.X0, "config.schedule");
        opt_num(s, "factor", c.schedule.factor, "config.schedule");
        opt_num(s, "max_steps", c.schedule.max_steps, "config.schedule");
        if (!(c.schedule.factor > 1) || c.schedule.max_steps < 3 || c.schedule.X0 < 0)
            throw SpecError("config.schedule: need factor > 1, max_steps >= 3, X0 >= 0");
    }
    try {
        c.validate();
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw SpecError(e.what());
    }
}

ProblemSpec parse_spec(const json& j) {
    const std::string w = "spec";
    reject_unknown(j, {"a", "phi", "lambda", "potential", "config"}, w);
    for (const char* k : {"a", "phi", "lambda", "potential"})
        if (!j.contains(k)) throw SpecError(std::string("spec: missing key \"") + k + "\"");
    const json& l = j["lambda"];
    if (!l.is_array() || l.size() != 2 || !l[0].is_number() || !l[1].is_number())
        throw SpecError("spec.lambda: expected [re, im]");
    if (!j["potential"].is_string()) throw SpecError("spec.potential: expected a string");
    ProblemSpec ps;
    const double a = get_num(j, "a", w), phi = get_num(j, "phi", w);
    const cplx lambda(l[0].get<double>(), l[1].get<double>());
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) throw SpecError("spec.lambda: not finite");
    // ParseError propagates unchanged so callers can report the offset.
    ps.problem = make_problem(a, phi, lambda, j["potential"].get<std::string>());
    if (j.contains("config")) apply_config(j["config"], ps.config);
    return ps;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

ProblemSpec load_spec(const std::string& path) { return parse_spec(read_json_file(path)); }

json to_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json to_json(const TailVerdict& v) {
    json j;
    j["kind"] = to_string(v.kind);
    if (v.kind == TailKind::Converges) {
        j["value"] = to_json(v.value);
        j["err"] = num(v.err);
    }
    if (v.kind == TailKind::Diverges) j["rate_hint"] = num(v.rate_hint);
    j["nonnegative"] = v.nonnegative;
    json ev = json::array();
    for (const auto& [X, I] : v.evidence) ev.push_back(json::array({num(X), num(I.real()), num(I.imag())}));
    j["evidence"] = ev;
    return j;
}

json to_json(const TailEstimate& t) {
    json j;
    j["liminf_est"] = num(t.liminf_est);
    j["limsup_est"] = num(t.limsup_est);
    j["prev_liminf"] = num(t.prev_liminf);
    j["prev_limsup"] = num(t.prev_limsup);
    j["window"] = json::array({num(t.X_lo), num(t.X_hi)});
    j["samples"] = t.samples;
    return j;
}

json to_json(const AdmissiblePair& p) {
    json j;
    j["theta"] = num(p.theta);
    j["K"] = to_json(p.K);
    j["margin"] = num(p.margin);
    j["lambda_gap"] = num(p.lambda_gap);
    j["recession"] = num(p.recession);
    j["foot_on_edge"] = p.foot_on_edge;
    return j;
}

json to_json(const OracleReport& r) {
    json j;
    j["class"] = to_string(r.cls);
    j["X_max"] = num(r.X_max);
    j["tol"] = num(r.tol);
    j["threshold"] = num(r.threshold);
    j["wronskian_drift"] = num(r.wronskian_drift);
    j["members"] = json::array({member(r.recessive), member(r.basis1), member(r.basis2)});
    j["notes"] = r.notes;
    return j;
}

json to_json(const ClassificationReport& r, const RayProblem& problem) {
    json j;
    j["verdict"] = r.verdict ? json(to_string(*r.verdict)) : json(nullptr);
    j["failure"] = to_string(r.failure);
    if (r.failure != FailureKind::None) j["failure_message"] = r.failure_message;
    j["route"] = r.route;
    j["primary_criterion"] = r.primary_criterion;
    json pr;
    pr["a"] = problem.a;
    pr["phi"] = problem.phi;
    pr["lambda"] = to_json(problem.lambda);
    pr["potential"] = problem.potential;
    j["problem"] = pr;
    json cr = json::array();
    for (const auto& c : r.criteria) cr.push_back(criterion(c));
    j["criteria"] = cr;
    j["admissible"] = r.admissible ? to_json(*r.admissible) : json(nullptr);
    j["admissible_distance"] = num(r.admissible_distance);
    j["hull"] = {{"diameter", num(r.hull_diameter)}, {"vertices", r.hull_vertices}};
    j["M"] = r.budget ? num(r.budget->M) : json(nullptr);
    j["envelope"] = r.budget ? num(r.budget->envelope) : json(nullptr);
    if (r.budget) j["budget"] = {{"integral", to_json(r.budget->verdict)}};
    if (r.assumptions) {
        const AssumptionReport& a = *r.assumptions;
        json aj;
        aj["points"] = a.points;
        aj["min_abs_s"] = num(a.min_abs_s);
        aj["min_cut_gap"] = num(a.min_cut_gap);
        aj["x_at_min_gap"] = num(a.x_at_min_gap);
        aj["violations"] = a.violations;
        json fv = json::array();
        for (const auto& [x, why] : a.first_violations) fv.push_back({{"x", num(x)}, {"reason", why}});
        aj["first_violations"] = fv;
        j["assumptions"] = aj;
    }
    if (r.limit_circle) {
        const LimitCircleResult& l = *r.limit_circle;
        json lj;
        lj["A"] = to_string(l.A);
        lj["log_tail"] = to_json(l.log_tail);
        lj["B"] = l.B;
        lj["l1u"] = {{"verdict", to_string(l.l1u.verdict)}, {"sup", num(l.l1u.sup)}, {"last", num(l.l1u.last)}};
        lj["oracle_evaluated"] = l.oracle_evaluated;
        lj["oracle"] = l.oracle ? to_json(*l.oracle) : json(nullptr);
        lj["energy_stabilizes"] = l.energy_stabilizes;
        lj["detail"] = l.detail;
        j["limit_circle"] = lj;
    }
    if (r.comparison) {
        json cj;
        cj["branch"] = to_string(r.comparison->branch);
        cj["psi_integral"] = to_json(r.comparison->psi_integral);
        cj["log_tail"] = to_json(r.comparison->log_tail);
        j["comparison"] = cj;
    }
    json fam;
    fam["matched"] = r.family.matched;
    if (r.family.matched) {
        fam["f"] = r.family.f_text;
        if (r.family.f_inv_sqrt) fam["f_inv_sqrt"] = to_json(*r.family.f_inv_sqrt);
    }
    j["family"] = fam;
    j["notes"] = r.notes;
    j["horizon"] = num(r.horizon);
    return j;
}

json geometry_json(const HullSample& hull, const Admissibility& adm) {
    json j;
    j["admissible"] = adm.pair.has_value();
    if (adm.pair) {
        j["theta"] = num(adm.pair->theta);
        j["K"] = to_json(adm.pair->K);
        j["margin"] = num(adm.pair->margin);
        j["lambda_gap"] = num(adm.pair->lambda_gap);
        j["recession"] = num(adm.pair->recession);
        j["foot_on_edge"] = adm.pair->foot_on_edge;
    } else {
        j["reason"] = adm.reason;
    }
    j["distance"] = num(adm.distance);
    j["diameter"] = num(hull.diameter);
    j["vertices"] = static_cast<int>(hull.hull.size());
    j["x_max"] = num(hull.x_max);
    j["r_max"] = num(hull.r_max);
    j["n_x"] = hull.n_x;
    j["n_r"] = hull.n_r;
    return j;
}

}  // namespace sims
