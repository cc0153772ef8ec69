#include "sims/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "sims/errors.hpp"

namespace sims {

SField::SField(const RayProblem& problem)
    : problem_(problem), rot2_(std::polar(1.0, 2 * problem.phi)), q_(problem.q) {
    problem_.validate();
    dq_ = differentiate(q_);
    ddq_ = differentiate(dq_);
}

cplx SField::s_checked(double x) const {
    cplx v = s(x);
    if (v == cplx(0.0, 0.0)) throw AssumptionViolated(x, "s=0");
    if (v.imag() == 0.0 && v.real() < 0.0) throw AssumptionViolated(x, "arg s=pi");
    return v;
}

SField build_s(const RayProblem& problem) { return SField(problem); }

double budget_integrand(const SField& field, double x) {
    cplx s = field.s_checked(x);
    cplx r = principal_root(s, 2);
    cplx ds = field.ds(x), dds = field.dds(x);
    return std::abs(5.0 * ds * ds / (16.0 * s * s * r) - dds / (4.0 * s * r));
}

AssumptionReport validate_assumptions(const SField& field, double a, double horizon, int points,
                                      bool check_budget) {
    AssumptionReport rep;
    rep.points = points;
    rep.min_abs_s = INFINITY;
    rep.min_cut_gap = INFINITY;
    for (double x : shifted_geometric_grid(a, horizon, points)) {
        cplx s = field.s(x);
        double mag = std::abs(s);
        rep.min_abs_s = std::min(rep.min_abs_s, mag);
        const char* why = nullptr;
        if (mag == 0.0)
            why = "s=0";
        else if (s.imag() == 0.0 && s.real() < 0.0)
            why = "arg s=pi";
        if (why) {
            ++rep.violations;
            if (rep.first_violations.size() < 10) rep.first_violations.emplace_back(x, why);
            continue;
        }
        double gap = M_PI - std::fabs(principal_arg(s));
        if (gap < rep.min_cut_gap) {
            rep.min_cut_gap = gap;
            rep.x_at_min_gap = x;
        }
    }
    if (rep.violations == 0 && check_budget) {
        rep.budget_checked = true;
        try {
            TailVerdict tv = improper_integral(
                [&](double x) { return cplx(budget_integrand(field, x), 0.0); }, a);
            rep.budget_kind = tv.kind;
        } catch (const Error&) {
            rep.budget_kind = TailKind::Undetermined;
        }
    }
    return rep;
}

double envelope_of(double M) { return 2.0 * std::exp(2.0 * M) - 2.0; }

ErrorBudget error_budget(const SField& field, double a, const Schedule& sched,
                         const ImproperOptions& opt) {
    ErrorBudget eb;
    eb.verdict = improper_integral([&](double x) { return cplx(budget_integrand(field, x), 0.0); }, a,
                                   sched, opt);
    if (eb.verdict.kind != TailKind::Converges)
        throw BudgetDiverges(std::string("error budget integral: ") + to_string(eb.verdict.kind) +
                             " (s^{-1/4}(s^{-1/4})'' not integrable on the horizon schedule)");
    eb.M = std::max(0.0, eb.verdict.value.real());
    eb.envelope = envelope_of(eb.M);
    for (const auto& [X, I] : eb.verdict.evidence) eb.tail_profile.emplace_back(X, std::max(0.0, eb.M - I.real()));
    return eb;
}

WkbEvaluator::WkbEvaluator(const SField& field, double envelope, double horizon, int nodes,
                           double quad_tol)
    : field_(field), a_(field.problem().a), envelope_(envelope), quad_tol_(quad_tol) {
    nodes_ = shifted_geometric_grid(a_, std::max(horizon, a_ + 1), nodes);
    prefix_.assign(nodes_.size(), 0.0);
    QuadOptions opt;
    opt.initial_panels = 2;
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        prefix_[j] = prefix_[j - 1] +
                     integrate([&](double t) { return field_.sqrt_s(t); }, nodes_[j - 1], nodes_[j], quad_tol_, opt)
                         .value;
}

cplx WkbEvaluator::phase(double x) const {
    if (x <= a_) return 0.0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (nodes_[j] == x) return prefix_[j];
    QuadOptions opt;
    opt.initial_panels = 2;
    return prefix_[j] +
           integrate([&](double t) { return field_.sqrt_s(t); }, nodes_[j], x, quad_tol_, opt).value;
}

WkbSnapshot WkbEvaluator::eval(double x) const {
    WkbSnapshot w;
    w.x = x;
    cplx s = field_.s_checked(x);
    cplx r4 = principal_root(s, 4);
    w.phase = phase(x);
    w.y_lead = std::exp(-w.phase) / r4;
    w.yhat_lead = std::exp(w.phase) / r4;
    double ls = 0.25 * std::log(std::abs(s));
    w.log_abs_y = -w.phase.real() - ls;
    w.log_abs_yhat = w.phase.real() - ls;
    w.envelope = envelope_;
    return w;
}

}  // namespace sims
