#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sims {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    std::size_t offset;
    std::string expected;
    ParseError(std::size_t off, std::string exp)
        : Error("syntax error at offset " + std::to_string(off) + ": expected " + exp),
          offset(off), expected(std::move(exp)) {}
};

struct DivisionByZero : Error {
    std::complex<double> x;
    explicit DivisionByZero(std::complex<double> at);
};

struct DomainError : Error {
    std::complex<double> x;
    DomainError(std::complex<double> at, const std::string& what);
};

struct ToleranceNotMet : Error {
    double a, b, err;
    ToleranceNotMet(double lo, double hi, double e);
};

struct NonFiniteSample : Error {
    double x;
    explicit NonFiniteSample(double at);
};

struct AssumptionViolated : Error {
    double x;
    std::string reason;
    AssumptionViolated(double at, std::string why);
};

struct BudgetDiverges : Error {
    using Error::Error;
};

struct StepSizeUnderflow : Error {
    double x;
    explicit StepSizeUnderflow(double at);
};

struct NonFiniteState : Error {
    double x;
    explicit NonFiniteState(double at);
};

struct NegativePsiSample : Error {
    double x;
    explicit NegativePsiSample(double at);
};

// Malformed or invalid problem spec / config.
struct SpecError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace sims
