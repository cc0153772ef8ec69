#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sims/asymptotics.hpp"
#include "sims/geometry.hpp"

namespace sims {

// Real value m * exp(e), for integrals that overflow double.
struct Scaled {
    double m = 0;
    double e = 0;
    double value() const;
    double log_abs() const;  // -inf for zero
};
Scaled operator+(Scaled a, Scaled b);
Scaled operator-(Scaled a, Scaled b);
Scaled operator*(double c, Scaled a);

struct ScaledC {
    cplx m;
    double e = 0;
};
ScaledC operator+(ScaledC a, ScaledC b);

struct IvpOptions {
    int checkpoints = 512;
    long max_steps = 20000000;
    double re_z_cap = 10;  // bound on |Re(k h)| per step
};

struct Trajectory {
    std::vector<double> grid;        // ascending, grid[0] = lower end
    std::vector<cplx> v, dv;         // mantissas
    std::vector<double> log_offset;  // state = mantissa * exp(log_offset)
    // Integrals over [grid[j], grid[j+1]] of |v|^2, |v'|^2 and q|v|^2.
    std::vector<Scaled> l2, dl2;
    std::vector<ScaledC> ql2;
    long accepted = 0, rejected = 0;
    double max_local_err = 0;
    double tol = 0;
    bool backward = false;

    double log_abs_v(std::size_t j) const;
};

// Integrates v'' = s v from x0 (where ic = (v, v') holds) to x1; x1 < x0 runs backward.
Trajectory integrate_ivp(const SField& field, double x0, double x1, std::pair<cplx, cplx> ic, double tol,
                         const IvpOptions& opt = {});

struct L2Point {
    double X;
    Scaled value;
};
std::vector<L2Point> truncated_l2(const Trajectory& t);

// Relative increment of a cumulative integral over the last doubling of X;
// 0 when the integral vanishes identically.
double last_doubling_increment(const std::vector<double>& grid, const std::vector<Scaled>& cumulative);

struct EnergyBreakdown {
    std::vector<double> grid;
    std::vector<Scaled> E1, E2, E3;  // cumulative from grid[0]
    double max_abs_E1_panel = 0, max_abs_E2_panel = 0;  // log-free, may overflow to inf
    double min_E2_panel_rel = 0;  // min of panel / scale, >= -1e-12 expected
    double inc1 = 0, inc2 = 0, inc3 = 0;  // last-doubling relative increments
    bool stable1 = false, stable2 = false, stable3 = false;
    bool stabilizes() const { return stable1 && stable2 && stable3; }
};

EnergyBreakdown energy_form(const Trajectory& t, const AdmissiblePair& pair, const RayProblem& problem,
                            double threshold = 1e-3);

struct WronskianSample {
    double X;
    cplx mantissa;
    double log_scale;
};
struct WronskianResult {
    std::vector<WronskianSample> samples;
    double drift = 0;  // max |W(x)/W(a) - 1|; |W| absolute when W(a) = 0
    double max_abs = 0;
};
WronskianResult wronskian(const Trajectory& t1, const Trajectory& t2);

enum class EmpiricalClass { OneSolutionL2, AllSolutionsL2_EnergyFinite, AllSolutionsL2_EnergyInfinite, Undetermined };
const char* to_string(EmpiricalClass c);

struct MemberSummary {
    std::string name;
    double l2_increment = 0;
    bool l2_saturates = false;
    double log_l2 = 0;
    double log_abs_end = 0;
    long steps = 0;
    bool has_energy = false;
    EnergyBreakdown energy;
};

struct OracleReport {
    EmpiricalClass cls = EmpiricalClass::Undetermined;
    double X_max = 0, tol = 0;
    MemberSummary recessive, basis1, basis2;
    double wronskian_drift = 0;
    double threshold = 1e-3;
    std::vector<std::string> notes;
};

OracleReport empirical_class(const RayProblem& problem, const AdmissiblePair& pair, double X_max, double tol,
                             double threshold = 1e-3, const IvpOptions& opt = {});

}  // namespace sims
