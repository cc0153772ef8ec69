#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sims/asymptotics.hpp"
#include "sims/geometry.hpp"
#include "sims/oracle.hpp"

namespace sims {

struct ClassifyConfig {
    double horizon = 1e4;
    double rho = 1.5;
    int N_max = 4;
    double eps0 = 0.05;
    double liminf_pos_tol = 1e-6;
    Expr psi;  // optional comparison weight
    std::string psi_text;

    double window_fraction = 0.5;
    int tail_samples = 2048;
    double trend_slack = 1e-2;  // relative slack between successive windows
    Schedule schedule;
    ImproperOptions improper;
    int assumption_points = 1024;

    double geometry_xmax = 0;  // 0 selects horizon
    int n_x = 256, n_r = 256;
    double r_max = 0;  // 0 selects 1e3 (1 + |lambda|)

    bool use_oracle = true;
    double oracle_xmax = 2048;
    double tol_ode = 1e-8;
    double saturation = 1e-3;

    void validate() const;  // throws Error
};

enum class Outcome { Fired, NotFired, Undetermined };
const char* to_string(Outcome o);

struct CriterionResult {
    std::string id;
    Outcome outcome = Outcome::Undetermined;
    std::optional<TailVerdict> integral;
    std::optional<TailEstimate> tail;
    std::optional<double> grid_max;  // epsilon: max |arg s| on [a, horizon]
    int N = 0;                       // delta: smallest N that fired
    std::string detail;
};

CriterionResult criterion_alpha(const RayProblem& problem, const ClassifyConfig& config);
CriterionResult criterion_beta(const RayProblem& problem, const ClassifyConfig& config);
CriterionResult criterion_gamma(const RayProblem& problem, const ClassifyConfig& config);
CriterionResult criterion_delta(const RayProblem& problem, const ClassifyConfig& config);
CriterionResult criterion_epsilon(const RayProblem& problem, const ClassifyConfig& config);

struct LimitCircleResult {
    Outcome A = Outcome::Undetermined;
    TailEstimate log_tail;  // of log(x^rho e^{2 int Re sqrt s} / |s|^{1/2})
    bool B = false;         // A and q in L1_u
    L1uResult l1u;
    bool oracle_evaluated = false;
    std::optional<OracleReport> oracle;
    bool energy_stabilizes = false;
    std::string detail;
};

// Sub-verdict A and the L1_u route; the oracle step is run only when
// `pair` is given and A fired without B.
LimitCircleResult limit_circle_test(const RayProblem& problem, const ClassifyConfig& config,
                                    const AdmissiblePair* pair = nullptr);

enum class ComparisonBranch { YhatInL2, YhatNotInL2, Undetermined };
const char* to_string(ComparisonBranch b);

struct ComparisonResult {
    ComparisonBranch branch = ComparisonBranch::Undetermined;
    TailVerdict psi_integral;
    TailEstimate log_tail;  // of log((1/psi) e^{2 int Re sqrt s} / |s|^{1/2})
};

ComparisonResult comparison_test(const RayProblem& problem, const Expr& psi, const ClassifyConfig& config);

enum class Verdict { LimitPointI, AllSolutionsL2, LimitCircle, Inconclusive };
const char* to_string(Verdict v);

enum class FailureKind { None, NotAdmissible, AssumptionViolated, BudgetDiverges };
const char* to_string(FailureKind f);

struct FamilyMatch {
    bool matched = false;
    std::string f_text;
    std::optional<TailVerdict> f_inv_sqrt;  // integral of f^{-1/2}
};

struct ClassificationReport {
    std::optional<Verdict> verdict;
    FailureKind failure = FailureKind::None;
    std::string failure_message;
    std::string primary_criterion;
    std::string route;
    std::vector<CriterionResult> criteria;
    std::optional<AdmissiblePair> admissible;
    double admissible_distance = 0;
    double hull_diameter = 0;
    int hull_vertices = 0;
    std::optional<AssumptionReport> assumptions;
    std::optional<ErrorBudget> budget;
    std::optional<LimitCircleResult> limit_circle;
    std::optional<ComparisonResult> comparison;  // only when config.psi is set
    FamilyMatch family;
    std::vector<std::string> notes;
    double horizon = 0;
};

FamilyMatch match_example_family(const RayProblem& problem, const ClassifyConfig& config);

ClassificationReport classify(const RayProblem& problem, const ClassifyConfig& config = {});

}  // namespace sims
