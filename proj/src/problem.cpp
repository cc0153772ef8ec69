#include "sims/problem.hpp"

#include <cmath>

#include "sims/errors.hpp"

namespace sims {

void RayProblem::validate() const {
    if (!q) throw Error("potential missing");
    if (!(a >= 0) || !std::isfinite(a)) throw Error("endpoint a must be finite and >= 0");
    if (!(std::fabs(phi) < M_PI / 2)) throw Error("phi must lie strictly inside (-pi/2, pi/2)");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) throw Error("lambda must be finite");
}

RayProblem make_problem(double a, double phi, cplx lambda, const std::string& potential) {
    RayProblem p;
    p.a = a;
    p.phi = phi;
    p.lambda = lambda;
    p.potential = potential;
    p.q = parse(potential);
    p.validate();
    return p;
}

}  // namespace sims
