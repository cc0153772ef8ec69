#pragma once

#include <complex>
#include <string>

#include "sims/expr.hpp"

namespace sims {

// -e^{-2i phi} v'' + q v = lambda v on [a, inf).
struct RayProblem {
    double a = 1;
    double phi = 0;
    cplx lambda = 0;
    Expr q;
    std::string potential;  // source text of q

    cplx p() const { return std::polar(1.0, -2 * phi); }
    // Throws Error when phi or a violate the ray-problem invariants.
    void validate() const;
};

RayProblem make_problem(double a, double phi, cplx lambda, const std::string& potential);

}  // namespace sims
