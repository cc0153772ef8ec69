#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sims/numerics.hpp"
#include "sims/problem.hpp"

namespace sims {

// s = e^{2i phi}(q - lambda) together with its symbolic derivatives.
class SField {
public:
    explicit SField(const RayProblem& problem);

    const RayProblem& problem() const { return problem_; }
    cplx rot2() const { return rot2_; }

    cplx q(double x) const { return evaluate(q_, x); }
    cplx s(double x) const { return rot2_ * (evaluate(q_, x) - problem_.lambda); }
    cplx ds(double x) const { return rot2_ * evaluate(dq_, x); }
    cplx dds(double x) const { return rot2_ * evaluate(ddq_, x); }

    // Branch-checked accessors: throw AssumptionViolated on s = 0 or arg s = pi.
    cplx s_checked(double x) const;
    cplx sqrt_s(double x) const { return principal_root(s_checked(x), 2); }
    cplx u(double x) const { return 1.0 / principal_root(s_checked(x), 4); }

    const Expr& q_expr() const { return q_; }
    const Expr& dq_expr() const { return dq_; }
    const Expr& ddq_expr() const { return ddq_; }

private:
    RayProblem problem_;
    cplx rot2_;
    Expr q_, dq_, ddq_;
};

SField build_s(const RayProblem& problem);

struct AssumptionReport {
    int points = 0;
    double min_abs_s = 0;
    double min_cut_gap = 0;  // min of pi - |arg s| over the grid
    double x_at_min_gap = 0;
    int violations = 0;
    std::vector<std::pair<double, std::string>> first_violations;
    bool budget_checked = false;
    TailKind budget_kind = TailKind::Undetermined;
    bool clean() const { return violations == 0; }
};

AssumptionReport validate_assumptions(const SField& field, double a, double horizon,
                                      int points = 1024, bool check_budget = true);

// |5 s'^2 / (16 s^{5/2}) - s'' / (4 s^{3/2})|
double budget_integrand(const SField& field, double x);

struct ErrorBudget {
    double M = 0;
    double envelope = 0;  // 2 e^{2M} - 2
    TailVerdict verdict;
    std::vector<std::pair<double, double>> tail_profile;  // (X, remaining M beyond X)
};

// Throws BudgetDiverges unless the integral converges.
ErrorBudget error_budget(const SField& field, double a, const Schedule& sched = {},
                         const ImproperOptions& opt = {});

double envelope_of(double M);

struct WkbSnapshot {
    double x = 0;
    cplx y_lead, yhat_lead;
    cplx phase;
    double log_abs_y = 0, log_abs_yhat = 0;
    double envelope = 0;
};

// Leading-order pair with cached prefix phase integrals on a geometric grid.
class WkbEvaluator {
public:
    WkbEvaluator(const SField& field, double envelope, double horizon, int nodes = 513,
                 double quad_tol = 1e-12);

    cplx phase(double x) const;  // integral of principal sqrt(s) from a to x
    WkbSnapshot eval(double x) const;
    double a() const { return a_; }

private:
    const SField& field_;
    double a_;
    double envelope_;
    double quad_tol_;
    std::vector<double> nodes_;
    std::vector<cplx> prefix_;
};

}  // namespace sims
