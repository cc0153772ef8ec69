#include <doctest.h>

#include <cmath>

#include "sims/classify.hpp"
#include "sims/errors.hpp"

using namespace sims;

namespace {

const cplx I(0.0, 1.0);

ClassifyConfig quick() {
    ClassifyConfig c;
    c.use_oracle = false;
    return c;
}

bool has_note(const ClassificationReport& r, const std::string& needle) {
    for (const auto& n : r.notes)
        if (n.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("config validation") {
    ClassifyConfig c;
    CHECK_NOTHROW(c.validate());
    c.rho = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = ClassifyConfig{};
    c.eps0 = M_PI;
    CHECK_THROWS_AS(c.validate(), Error);
    c = ClassifyConfig{};
    c.N_max = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("criterion alpha") {
    ClassifyConfig c = quick();
    CHECK(criterion_alpha(make_problem(1, 0, -I, "i"), c).outcome == Outcome::Fired);
    CHECK(criterion_alpha(make_problem(1, 0, -I, "-x^4"), c).outcome == Outcome::NotFired);
    CriterionResult r = criterion_alpha(make_problem(1, 0, 0.0, "-x+i"), c);
    CHECK(r.outcome == Outcome::Fired);
    REQUIRE(r.integral);
    CHECK(r.integral->kind == TailKind::Diverges);
}

TEST_CASE("criterion beta") {
    ClassifyConfig c = quick();
    CHECK(criterion_beta(make_problem(1, 0, 0.0, "-(2+sin(x))+i"), c).outcome == Outcome::Fired);
    CHECK(criterion_beta(make_problem(1, 0, -I, "-x^4"), c).outcome == Outcome::NotFired);
    CHECK(criterion_beta(make_problem(1, 0, 0.0, "-(i*x)^3"), c).outcome == Outcome::NotFired);
}

TEST_CASE("criterion gamma") {
    ClassifyConfig c = quick();
    CriterionResult lc = criterion_gamma(make_problem(1, 0, -I, "-x^4"), c);
    REQUIRE(lc.integral);
    CHECK(lc.integral->kind == TailKind::Converges);
    CHECK(lc.outcome == Outcome::NotFired);
    CHECK(criterion_gamma(make_problem(1, 0, -I, "i"), c).outcome == Outcome::NotFired);
    CriterionResult fam = criterion_gamma(make_problem(1, 0, 0.0, "-x^4+i"), c);
    CHECK(fam.outcome == Outcome::NotFired);
    CHECK(criterion_alpha(make_problem(1, 0, 0.0, "-x^4+i"), c).outcome == Outcome::NotFired);
}

TEST_CASE("criterion delta") {
    ClassifyConfig c = quick();
    CriterionResult pt = criterion_delta(make_problem(1, 0, 0.0, "-(i*x)^3"), c);
    CHECK(pt.outcome == Outcome::Fired);
    CHECK(pt.N >= 1);
    CHECK(pt.N <= 2);
    CriterionResult k = criterion_delta(make_problem(1, 0, -I, "i"), c);
    CHECK(k.outcome == Outcome::Fired);
    CHECK(k.N == 1);
    REQUIRE(k.tail);
    CHECK(k.tail->liminf_est == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(criterion_delta(make_problem(1, 0, -I, "-x^4"), c).outcome == Outcome::NotFired);
}

TEST_CASE("criterion delta: N search reaches the cap") {
    // Re sqrt(q) = 1/(2x) with |sqrt q| ~ x: every N gives liminf -> 0
    ClassifyConfig c = quick();
    CriterionResult r = criterion_delta(make_problem(1, 0, 0.0, "-x^2+i"), c);
    CHECK(r.outcome == Outcome::NotFired);
    CHECK(r.N == 0);
}

TEST_CASE("criterion epsilon") {
    ClassifyConfig c = quick();
    CriterionResult pt = criterion_epsilon(make_problem(1, 0, 0.0, "-(i*x)^3"), c);
    CHECK(pt.outcome == Outcome::Fired);
    REQUIRE(pt.grid_max);
    CHECK(*pt.grid_max == doctest::Approx(M_PI / 2));
    CHECK(criterion_epsilon(make_problem(1, 0, -I, "-x^4"), c).outcome == Outcome::NotFired);
    CHECK(criterion_epsilon(make_problem(1, 0, -I, "i"), c).outcome == Outcome::Fired);
}

TEST_CASE("limit_circle_test: examples") {
    ClassifyConfig c = quick();
    LimitCircleResult lc = limit_circle_test(make_problem(1, 0, -I, "-x^4"), c);
    CHECK(lc.A == Outcome::Fired);
    CHECK(lc.l1u.verdict == L1uVerdict::Fails);
    CHECK_FALSE(lc.B);
    CHECK_FALSE(lc.oracle_evaluated);
    CHECK(limit_circle_test(make_problem(1, 0, -I, "i"), c).A == Outcome::NotFired);
    CHECK(limit_circle_test(make_problem(1, 0, 0.0, "-(i*x)^3"), c).A == Outcome::NotFired);
}

TEST_CASE("comparison_test: examples") {
    ClassifyConfig c = quick();
    CHECK(comparison_test(make_problem(1, 0, 0.0, "-x^4+i"), parse("x^(-1.5)"), c).branch ==
          ComparisonBranch::YhatInL2);
    CHECK(comparison_test(make_problem(1, 0, -I, "i"), parse("1+0*x"), c).branch == ComparisonBranch::YhatNotInL2);
    CHECK(comparison_test(make_problem(1, 0, -I, "i"), parse("x^(-2)"), c).branch == ComparisonBranch::Undetermined);
    CHECK_THROWS_AS(comparison_test(make_problem(1, 0, -I, "i"), parse("sin(x)"), c), NegativePsiSample);
}

TEST_CASE("classify: PT N=1 is limit point I via delta") {
    ClassificationReport r = classify(make_problem(1, 0, 0.0, "-(i*x)^3"));
    REQUIRE(r.verdict);
    CHECK(*r.verdict == Verdict::LimitPointI);
    CHECK(r.primary_criterion == "delta");
    CHECK(r.failure == FailureKind::None);
    REQUIRE(r.admissible);
    CHECK(r.admissible->lambda_gap > 0);
    REQUIRE(r.budget);
    CHECK(r.budget->envelope == 2 * std::exp(2 * r.budget->M) - 2);
    CHECK(has_note(r, "numerical evidence at horizon"));
    CHECK(has_note(r, "2e^{2M}-2"));
}

TEST_CASE("classify: limit-circle problem through the energy form") {
    ClassificationReport r = classify(make_problem(1, 0, -I, "-x^4"));
    REQUIRE(r.verdict);
    CHECK(*r.verdict == Verdict::LimitCircle);
    CHECK(r.route == "numerical-energy-form");
    REQUIRE(r.limit_circle);
    CHECK(r.limit_circle->A == Outcome::Fired);
    CHECK(r.limit_circle->oracle_evaluated);
    CHECK(r.primary_criterion.empty());
    for (const auto& c : r.criteria) CHECK(c.outcome != Outcome::Fired);
    CHECK(has_note(r, "L1_u"));
}

TEST_CASE("classify: without the oracle the limit-circle problem is AllSolutionsL2") {
    ClassificationReport r = classify(make_problem(1, 0, -I, "-x^4"), quick());
    REQUIRE(r.verdict);
    CHECK(*r.verdict == Verdict::AllSolutionsL2);
}

TEST_CASE("classify: failure kinds") {
    ClassificationReport ex = classify(make_problem(1, M_PI / 10, 0.0, "-(i*x*exp(i*pi/10))^3"), quick());
    CHECK(ex.failure == FailureKind::NotAdmissible);
    CHECK_FALSE(ex.verdict);

    ClassificationReport bd = classify(make_problem(1, 0, 0.0, "-(2+sin(x))+i"), quick());
    CHECK(bd.failure == FailureKind::BudgetDiverges);
    CHECK_FALSE(bd.verdict);
    CHECK(bd.criteria.size() == 5);

    // s = 3 - x is on the negative real axis beyond x = 3, outside the sampled geometry window
    ClassifyConfig c = quick();
    c.geometry_xmax = 2;
    ClassificationReport av = classify(make_problem(1, 0, -I, "3-x-i"), c);
    CHECK(av.failure == FailureKind::AssumptionViolated);
    CHECK_FALSE(av.verdict);
}

TEST_CASE("classify: special family") {
    ClassificationReport x4 = classify(make_problem(1, 0, 0.0, "-x^4+i"), quick());
    CHECK(x4.family.matched);
    REQUIRE(x4.family.f_inv_sqrt);
    CHECK(x4.family.f_inv_sqrt->kind == TailKind::Converges);
    ClassificationReport x1 = classify(make_problem(1, 0, 0.0, "-x+i"), quick());
    CHECK(x1.family.matched);
    CHECK(x1.family.f_inv_sqrt->kind == TailKind::Diverges);
    CHECK_FALSE(classify(make_problem(1, 0, 0.0, "-(2+sin(x))+i"), quick()).family.matched);
    CHECK_FALSE(classify(make_problem(1, 0, -I, "-x^4"), quick()).family.matched);
}

TEST_CASE("property: criteria are order independent") {
    ClassifyConfig c = quick();
    for (const char* q : {"-(i*x)^3", "-(2+sin(x))+i", "i", "-x+i"}) {
        INFO(q);
        RayProblem p = make_problem(1, 0, 0.0, q);
        ClassificationReport r = classify(p, c);
        REQUIRE(r.criteria.size() == 5);
        // reverse order, each evaluated standalone
        CHECK(criterion_epsilon(p, c).outcome == r.criteria[4].outcome);
        CHECK(criterion_delta(p, c).outcome == r.criteria[3].outcome);
        CHECK(criterion_gamma(p, c).outcome == r.criteria[2].outcome);
        CHECK(criterion_beta(p, c).outcome == r.criteria[1].outcome);
        CHECK(criterion_alpha(p, c).outcome == r.criteria[0].outcome);
    }
}

TEST_CASE("property: lambda robustness for PT N=1") {
    for (cplx lambda : {cplx(0, 0), cplx(-1, 0), cplx(0, -1), cplx(-1, -1)}) {
        INFO(lambda);
        ClassificationReport r = classify(make_problem(1, 0, lambda, "-(i*x)^3"), quick());
        REQUIRE(r.verdict);
        CHECK(*r.verdict == Verdict::LimitPointI);
    }
}

TEST_CASE("property: exclusivity of decisive evidence") {
    for (const char* q : {"-(i*x)^3", "-x^4", "i", "-x+i", "-x^4+i"}) {
        INFO(q);
        ClassificationReport r = classify(make_problem(1, 0, -I, q));
        if (!r.verdict) continue;
        const bool any_fired = std::any_of(r.criteria.begin(), r.criteria.end(),
                                           [](const CriterionResult& c) { return c.outcome == Outcome::Fired; });
        if (*r.verdict == Verdict::LimitPointI) {
            CHECK((any_fired || r.route == "example-family"));
            CHECK_FALSE(r.limit_circle);
        }
        if (*r.verdict == Verdict::LimitCircle) {
            CHECK_FALSE(any_fired);
            REQUIRE(r.limit_circle);
            CHECK(r.limit_circle->A == Outcome::Fired);
            CHECK((r.limit_circle->B || r.limit_circle->oracle_evaluated));
        }
    }
}

TEST_CASE("property: epsilon is invariant under q, lambda -> c q, c lambda") {
    ClassifyConfig cfg = quick();
    for (const char* q : {"-(i*x)^3", "-x^4", "i", "x^2*exp(0.5*i)"}) {
        for (double c : {0.1, 3.0, 1e3}) {
            INFO(q, " c=", c);
            RayProblem p = make_problem(1, 0.1, cplx(-1, -1), q);
            RayProblem s = make_problem(1, 0.1, c * cplx(-1, -1), std::to_string(c) + "*(" + q + ")");
            CHECK(criterion_epsilon(p, cfg).outcome == criterion_epsilon(s, cfg).outcome);
        }
    }
}

TEST_CASE("classify: literal root sign mismatch is flagged") {
    // phi = 0.6, q - lambda = -x^2 e^{-1.1 i}: arg/2 + phi leaves (-pi/2, pi/2]
    ClassificationReport r = classify(make_problem(1, 0.6, 0.0, "-x^2*exp(-1.1*i)"), quick());
    CHECK(has_note(r, "differs in sign"));
}
