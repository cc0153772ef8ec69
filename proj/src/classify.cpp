#include "sims/classify.hpp"

#include <cmath>
#include <cstdio>

#include "sims/errors.hpp"

namespace sims {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Fired: return "Fired";
        case Outcome::NotFired: return "NotFired";
        case Outcome::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(ComparisonBranch b) {
    switch (b) {
        case ComparisonBranch::YhatInL2: return "YhatInL2";
        case ComparisonBranch::YhatNotInL2: return "YhatNotInL2";
        case ComparisonBranch::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::LimitPointI: return "LimitPointI";
        case Verdict::AllSolutionsL2: return "AllSolutionsL2";
        case Verdict::LimitCircle: return "LimitCircle";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(FailureKind f) {
    switch (f) {
        case FailureKind::None: return "None";
        case FailureKind::NotAdmissible: return "NotAdmissible";
        case FailureKind::AssumptionViolated: return "AssumptionViolated";
        case FailureKind::BudgetDiverges: return "BudgetDiverges";
    }
    return "?";
}

void ClassifyConfig::validate() const {
    if (!(rho > 1)) throw Error("config: rho must exceed 1");
    if (!(eps0 > 0 && eps0 < M_PI)) throw Error("config: eps0 must lie in (0, pi)");
    if (N_max < 1) throw Error("config: N_max must be positive");
    if (!(horizon > 0)) throw Error("config: horizon must be positive");
    if (!(window_fraction > 0 && window_fraction < 1)) throw Error("config: window_fraction must lie in (0,1)");
    if (tail_samples < 200) throw Error("config: tail_samples must be at least 200");
    if (n_x < 64 || n_r < 64) throw Error("config: geometry grids need at least 64 points");
    if (!(tol_ode >= 1e-12 && tol_ode <= 1e-4)) throw Error("config: tol_ode must lie in [1e-12, 1e-4]");
    if (!(liminf_pos_tol >= 0)) throw Error("config: liminf_pos_tol must be non-negative");
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Literal e^{i phi} sqrt(q - lambda), principal root.
cplx literal_root(const SField& f, double x) {
    const RayProblem& p = f.problem();
    return std::polar(1.0, p.phi) * principal_root(f.q(x) - p.lambda, 2);
}

bool non_decreasing(double last, double prev, double slack) {
    return last >= prev - slack * std::fabs(prev);
}

bool non_increasing(double last, double prev, double slack) {
    return last <= prev + slack * std::fabs(prev);
}

std::string sign_mismatch_note(const SField& f, const ClassifyConfig& c) {
    const RayProblem& p = f.problem();
    double first = NAN, last = NAN;
    int count = 0;
    for (double x : shifted_geometric_grid(p.a, c.horizon, 1024)) {
        cplx lit = literal_root(f, x);
        cplx pr = principal_root(f.s(x), 2);
        if (std::abs(lit - pr) > 1e-8 * std::abs(pr)) {
            if (count == 0) first = x;
            last = x;
            ++count;
        }
    }
    if (count == 0) return {};
    return "literal e^{i phi} sqrt(q-lambda) differs in sign from the principal sqrt(s) on " +
           std::to_string(count) + " of 1024 grid points in [" + fmt(first) + ", " + fmt(last) + "]";
}

CriterionResult alpha(const SField& f, const ClassifyConfig& c) {
    CriterionResult r;
    r.id = "alpha";
    const RayProblem& p = f.problem();
    r.integral = improper_integral(
        [&](double x) { return cplx(std::pow(std::abs(f.q(x) - p.lambda), -0.5), 0.0); }, p.a, c.schedule,
        c.improper);
    r.outcome = r.integral->kind == TailKind::Diverges    ? Outcome::Fired
                : r.integral->kind == TailKind::Converges ? Outcome::NotFired
                                                          : Outcome::Undetermined;
    r.detail = "integral of |q-lambda|^{-1/2}: " + std::string(to_string(r.integral->kind));
    return r;
}

CriterionResult beta(const SField& f, const ClassifyConfig& c) {
    CriterionResult r;
    r.id = "beta";
    r.tail = tail_estimate([&](double x) { return std::abs(f.q(x)); }, c.horizon, c.window_fraction,
                           c.tail_samples);
    const bool bounded = std::isfinite(r.tail->limsup_est) &&
                         non_increasing(r.tail->limsup_est, r.tail->prev_limsup, c.trend_slack);
    r.outcome = bounded ? Outcome::Fired : Outcome::NotFired;
    r.detail = "max |q| last window " + fmt(r.tail->limsup_est) + ", previous " + fmt(r.tail->prev_limsup);
    return r;
}

CriterionResult gamma(const SField& f, const ClassifyConfig& c) {
    CriterionResult r;
    r.id = "gamma";
    const RayProblem& p = f.problem();
    r.integral = improper_integral([&](double x) { return cplx(literal_root(f, x).real(), 0.0); }, p.a,
                                   c.schedule, c.improper);
    r.tail = tail_estimate(
        [&](double x) {
            cplx lit = literal_root(f, x);
            return lit.real() / std::abs(lit);
        },
        c.horizon, c.window_fraction, c.tail_samples);
    const bool conv = r.integral->kind == TailKind::Converges;
    const bool pos = r.tail->liminf_est > c.liminf_pos_tol &&
                     non_decreasing(r.tail->liminf_est, r.tail->prev_liminf, c.trend_slack);
    if (conv && pos)
        r.outcome = Outcome::Fired;
    else if (r.integral->kind == TailKind::Undetermined && pos)
        r.outcome = Outcome::Undetermined;
    else
        r.outcome = Outcome::NotFired;
    r.detail = "integral of Re e^{i phi} sqrt(q-lambda): " + std::string(to_string(r.integral->kind)) +
               "; liminf ratio " + fmt(r.tail->liminf_est);
    return r;
}

CriterionResult delta(const SField& f, const ClassifyConfig& c) {
    CriterionResult r;
    r.id = "delta";
    const RayProblem& p = f.problem();
    r.integral = improper_integral([&](double x) { return cplx(literal_root(f, x).real(), 0.0); }, p.a,
                                   c.schedule, c.improper);
    if (r.integral->kind != TailKind::Diverges) {
        r.outcome = r.integral->kind == TailKind::Converges ? Outcome::NotFired : Outcome::Undetermined;
        r.detail = "integral of Re e^{i phi} sqrt(q-lambda): " + std::string(to_string(r.integral->kind));
        return r;
    }
    r.outcome = Outcome::NotFired;
    for (int N = 1; N <= c.N_max; ++N) {
        TailEstimate t = tail_estimate(
            [&](double x) {
                cplx lit = literal_root(f, x);
                return std::pow(lit.real(), N) / std::abs(lit);
            },
            c.horizon, c.window_fraction, c.tail_samples);
        if (!r.tail) r.tail = t;
        if (t.liminf_est > c.liminf_pos_tol && non_decreasing(t.liminf_est, t.prev_liminf, c.trend_slack)) {
            r.outcome = Outcome::Fired;
            r.N = N;
            r.tail = t;
            break;
        }
    }
    r.detail = "integral diverges; " + (r.N ? "liminf positive with N=" + std::to_string(r.N)
                                            : "no N <= " + std::to_string(c.N_max) + " with positive liminf");
    return r;
}

CriterionResult epsilon(const SField& f, const ClassifyConfig& c) {
    CriterionResult r;
    r.id = "epsilon";
    const RayProblem& p = f.problem();
    auto absarg = [&](double x) { return std::fabs(principal_arg(f.s(x))); };
    r.tail = tail_estimate(absarg, c.horizon, c.window_fraction, c.tail_samples);
    double mx = std::max(r.tail->limsup_est, r.tail->prev_limsup);
    for (double x : shifted_geometric_grid(p.a, c.horizon, c.tail_samples)) mx = std::max(mx, absarg(x));
    r.grid_max = mx;
    const bool ok = mx <= M_PI - c.eps0 && non_increasing(r.tail->limsup_est, r.tail->prev_limsup, c.trend_slack);
    r.outcome = ok ? Outcome::Fired : Outcome::NotFired;
    r.detail = "max |arg s| on [a, horizon] = " + fmt(mx) + ", bound pi - eps0 = " + fmt(M_PI - c.eps0);
    return r;
}

CriterionResult guarded(CriterionResult (*fn)(const SField&, const ClassifyConfig&), const char* id,
                        const SField& f, const ClassifyConfig& c) {
    try {
        return fn(f, c);
    } catch (const AssumptionViolated&) {
        throw;
    } catch (const Error& e) {
        CriterionResult r;
        r.id = id;
        r.outcome = Outcome::Undetermined;
        r.detail = std::string("numerical failure: ") + e.what();
        return r;
    }
}

double log_growth(const SField& f, const WkbEvaluator& w, double x) {
    return 2.0 * w.phase(x).real() - 0.5 * std::log(std::abs(f.s_checked(x)));
}

LimitCircleResult lc_test(const SField& f, const ClassifyConfig& c, const AdmissiblePair* pair) {
    LimitCircleResult r;
    const RayProblem& p = f.problem();
    WkbEvaluator w(f, 0.0, c.horizon);
    r.log_tail = tail_estimate([&](double x) { return c.rho * std::log(x) + log_growth(f, w, x); }, c.horizon,
                               c.window_fraction, c.tail_samples);
    // Windows are compared on the log scale: a relative slack s becomes log(1+s).
    const double lslack = std::log1p(c.trend_slack);
    if (!std::isfinite(r.log_tail.limsup_est))
        r.A = Outcome::Undetermined;
    else if (r.log_tail.limsup_est <= r.log_tail.prev_limsup + lslack)
        r.A = Outcome::Fired;
    else
        r.A = Outcome::NotFired;
    r.detail = "log limsup of x^rho e^{2 int Re sqrt s}/|s|^{1/2}: last window " + fmt(r.log_tail.limsup_est) +
               ", previous " + fmt(r.log_tail.prev_limsup);
    if (r.A != Outcome::Fired) return r;

    r.l1u = is_L1u([&](double x) { return std::abs(f.q(x)); }, p.a, c.horizon);
    r.B = r.l1u.verdict == L1uVerdict::Holds;
    if (!r.B && pair && c.use_oracle) {
        r.oracle_evaluated = true;
        r.oracle = empirical_class(p, *pair, c.oracle_xmax, c.tol_ode, c.saturation);
        r.energy_stabilizes = r.oracle->cls == EmpiricalClass::AllSolutionsL2_EnergyFinite;
    }
    return r;
}

}  // namespace

CriterionResult criterion_alpha(const RayProblem& p, const ClassifyConfig& c) { return alpha(SField(p), c); }
CriterionResult criterion_beta(const RayProblem& p, const ClassifyConfig& c) { return beta(SField(p), c); }
CriterionResult criterion_gamma(const RayProblem& p, const ClassifyConfig& c) { return gamma(SField(p), c); }
CriterionResult criterion_delta(const RayProblem& p, const ClassifyConfig& c) { return delta(SField(p), c); }
CriterionResult criterion_epsilon(const RayProblem& p, const ClassifyConfig& c) { return epsilon(SField(p), c); }

LimitCircleResult limit_circle_test(const RayProblem& p, const ClassifyConfig& c, const AdmissiblePair* pair) {
    return lc_test(SField(p), c, pair);
}

ComparisonResult comparison_test(const RayProblem& p, const Expr& psi, const ClassifyConfig& c) {
    ComparisonResult r;
    SField f(p);
    auto psi_at = [&](double x) {
        cplx v = evaluate(psi, x);
        if (v.imag() != 0.0 || v.real() < 0.0) throw NegativePsiSample(x);
        return v.real();
    };
    for (double x : shifted_geometric_grid(p.a, c.horizon, 1024)) psi_at(x);
    r.psi_integral = improper_integral([&](double x) { return cplx(psi_at(x), 0.0); }, p.a, c.schedule, c.improper);
    WkbEvaluator w(f, 0.0, c.horizon);
    r.log_tail = tail_estimate([&](double x) { return -std::log(psi_at(x)) + log_growth(f, w, x); }, c.horizon,
                               c.window_fraction, c.tail_samples);
    const double lslack = std::log1p(c.trend_slack);
    const bool bounded = std::isfinite(r.log_tail.limsup_est) &&
                         r.log_tail.limsup_est <= r.log_tail.prev_limsup + lslack;
    const bool positive = std::isfinite(r.log_tail.liminf_est) &&
                          r.log_tail.liminf_est > std::log(std::max(c.liminf_pos_tol, 1e-300)) &&
                          r.log_tail.liminf_est >= r.log_tail.prev_liminf - lslack;
    if (r.psi_integral.kind == TailKind::Converges && bounded)
        r.branch = ComparisonBranch::YhatInL2;
    else if (r.psi_integral.kind == TailKind::Diverges && positive)
        r.branch = ComparisonBranch::YhatNotInL2;
    return r;
}

FamilyMatch match_example_family(const RayProblem& p, const ClassifyConfig& c) {
    FamilyMatch m;
    if (p.phi != 0.0 || p.lambda != cplx(0.0, 0.0)) return m;
    Expr fx = match_minus_f_plus_i(p.q);
    if (!fx || !depends_on_x(fx)) return m;
    try {
        for (double x : shifted_geometric_grid(p.a, c.horizon, 1024)) {
            cplx v = evaluate(fx, x);
            if (v.imag() != 0.0 || !(v.real() > 0.0)) return m;
        }
        TailEstimate t = tail_estimate([&](double x) { return evaluate(fx, x).real(); }, c.horizon,
                                       c.window_fraction, c.tail_samples);
        // f -> infinity: the last window sits above the previous one.
        if (!(t.liminf_est >= t.prev_limsup && t.limsup_est > t.prev_limsup)) return m;
        m.matched = true;
        m.f_text = to_string(fx);
        m.f_inv_sqrt = improper_integral([&](double x) { return cplx(std::pow(evaluate(fx, x).real(), -0.5), 0.0); },
                                         p.a, c.schedule, c.improper);
    } catch (const Error&) {
        m.matched = false;
    }
    return m;
}

ClassificationReport classify(const RayProblem& problem, const ClassifyConfig& c) {
    c.validate();
    problem.validate();
    ClassificationReport rep;
    rep.horizon = c.horizon;
    rep.notes.push_back("numerical evidence at horizon X=" + fmt(c.horizon) +
                        "; asymptotic hypotheses are decided on finite windows, not proved");

    // (1) admissibility
    const double gx = c.geometry_xmax > 0 ? c.geometry_xmax : c.horizon;
    HullSample hull = sample_Q(problem, gx, c.n_x, c.r_max, c.n_r);
    rep.hull_diameter = hull.diameter;
    rep.hull_vertices = static_cast<int>(hull.hull.size());
    Admissibility adm = admissible_pair(hull, problem.lambda);
    rep.admissible_distance = adm.distance;
    if (!adm.pair) {
        rep.failure = FailureKind::NotAdmissible;
        rep.failure_message = adm.reason;
        return rep;
    }
    rep.admissible = adm.pair;
    rep.notes.push_back("admissible pair from the sampled hull (x <= " + fmt(gx) + ", r <= " + fmt(hull.r_max) +
                        "); recession direction checked analytically");

    // (2) assumptions and error budget
    SField field(problem);
    rep.assumptions = validate_assumptions(field, problem.a, c.horizon, c.assumption_points, false);
    if (!rep.assumptions->clean()) {
        rep.failure = FailureKind::AssumptionViolated;
        const auto& v = rep.assumptions->first_violations.front();
        rep.failure_message = v.second + " at x=" + fmt(v.first);
        return rep;
    }
    if (rep.assumptions->min_cut_gap < 1e-6)
        rep.notes.push_back("arg s approaches pi (min gap " + fmt(rep.assumptions->min_cut_gap) + " at x=" +
                            fmt(rep.assumptions->x_at_min_gap) + ") without reaching the cut");
    try {
        rep.budget = error_budget(field, problem.a, c.schedule, c.improper);
        rep.notes.push_back("envelope reported as 2e^{2M}-2, the loosest of the stated bounds");
    } catch (const BudgetDiverges& e) {
        rep.failure = FailureKind::BudgetDiverges;
        rep.failure_message = e.what();
    } catch (const AssumptionViolated& e) {
        rep.failure = FailureKind::AssumptionViolated;
        rep.failure_message = e.what();
        return rep;
    }

    // (3) criteria, all evaluated so the fired set does not depend on order
    try {
        rep.criteria.push_back(guarded(alpha, "alpha", field, c));
        rep.criteria.push_back(guarded(beta, "beta", field, c));
        rep.criteria.push_back(guarded(gamma, "gamma", field, c));
        rep.criteria.push_back(guarded(delta, "delta", field, c));
        rep.criteria.push_back(guarded(epsilon, "epsilon", field, c));
    } catch (const AssumptionViolated& e) {
        rep.failure = FailureKind::AssumptionViolated;
        rep.failure_message = e.what();
        return rep;
    }
    if (std::string n = sign_mismatch_note(field, c); !n.empty()) rep.notes.push_back(n);

    rep.family = match_example_family(problem, c);
    if (c.psi) {
        try {
            rep.comparison = comparison_test(problem, c.psi, c);
        } catch (const Error& e) {
            rep.notes.push_back(std::string("comparison test not evaluated: ") + e.what());
        }
    }
    if (rep.failure != FailureKind::None) {
        rep.notes.push_back("criteria evaluated as diagnostics only: the asymptotic theory does not apply");
        return rep;
    }

    for (const auto& cr : rep.criteria) {
        if (cr.outcome == Outcome::Fired) {
            rep.verdict = Verdict::LimitPointI;
            rep.primary_criterion = cr.id;
            rep.route = "criterion-" + cr.id;
            break;
        }
    }
    if (rep.family.matched) {
        rep.notes.push_back("problem matches the family q=-f+i with f>0, f->infinity: the WKB pair gives all solutions "
                            "in L2 iff f^{-1/2} is integrable; the reversed equivalence is not used");
        if (rep.verdict && rep.family.f_inv_sqrt && rep.family.f_inv_sqrt->kind == TailKind::Converges)
            rep.notes.push_back("family conflict: criterion " + rep.primary_criterion +
                                " fired although f^{-1/2} is integrable; verdict follows the criterion, see oracle");
    }
    if (rep.verdict) return rep;

    // (4) limit-circle test
    try {
        rep.limit_circle = lc_test(field, c, &*rep.admissible);
    } catch (const AssumptionViolated& e) {
        rep.failure = FailureKind::AssumptionViolated;
        rep.failure_message = e.what();
        return rep;
    } catch (const Error& e) {
        rep.notes.push_back(std::string("limit-circle test failed numerically: ") + e.what());
    }
    if (rep.limit_circle && rep.limit_circle->A == Outcome::Fired) {
        rep.notes.push_back(
            "the q in L1_u hypothesis together with the limsup condition is very restrictive as printed; "
            "the oracle energy form is the practical limit-circle route");
        if (rep.limit_circle->B) {
            rep.verdict = Verdict::LimitCircle;
            rep.route = "weighted-limsup+L1u";
        } else if (rep.limit_circle->energy_stabilizes) {
            rep.verdict = Verdict::LimitCircle;
            rep.route = "numerical-energy-form";
        } else {
            rep.verdict = Verdict::AllSolutionsL2;
            rep.route = "weighted-limsup";
        }
        return rep;
    }

    // (5) special family rule
    if (rep.family.matched && rep.family.f_inv_sqrt) {
        if (rep.family.f_inv_sqrt->kind == TailKind::Converges) {
            rep.verdict = Verdict::AllSolutionsL2;
            rep.route = "example-family";
            return rep;
        }
        if (rep.family.f_inv_sqrt->kind == TailKind::Diverges) {
            rep.verdict = Verdict::LimitPointI;
            rep.route = "example-family";
            return rep;
        }
    }

    // (6)
    rep.verdict = Verdict::Inconclusive;
    rep.route = "none";
    return rep;
}

}  // namespace sims
