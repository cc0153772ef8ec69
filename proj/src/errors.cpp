#include "sims/errors.hpp"

#include <cstdio>

namespace sims {

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string num(std::complex<double> z) {
    return "(" + num(z.real()) + "," + num(z.imag()) + ")";
}
}  // namespace

DivisionByZero::DivisionByZero(std::complex<double> at)
    : Error("division by zero at x=" + num(at)), x(at) {}

DomainError::DomainError(std::complex<double> at, const std::string& what)
    : Error(what + " at x=" + num(at)), x(at) {}

ToleranceNotMet::ToleranceNotMet(double lo, double hi, double e)
    : Error("quadrature tolerance not met on [" + num(lo) + "," + num(hi) + "], err=" + num(e)),
      a(lo), b(hi), err(e) {}

NonFiniteSample::NonFiniteSample(double at)
    : Error("non-finite sample at x=" + num(at)), x(at) {}

AssumptionViolated::AssumptionViolated(double at, std::string why)
    : Error("assumption violated at x=" + num(at) + ": " + why), x(at), reason(std::move(why)) {}

StepSizeUnderflow::StepSizeUnderflow(double at)
    : Error("step size underflow at x=" + num(at)), x(at) {}

NonFiniteState::NonFiniteState(double at)
    : Error("non-finite state at x=" + num(at)), x(at) {}

NegativePsiSample::NegativePsiSample(double at)
    : Error("negative psi sample at x=" + num(at)), x(at) {}

}  // namespace sims
