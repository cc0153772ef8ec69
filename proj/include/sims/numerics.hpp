#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace sims {

using cplx = std::complex<double>;
using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(double)>;

// Maps a -0 imaginary part to +0 so that the negative real axis has arg = pi.
inline cplx canon(cplx z) {
    return z.imag() == 0.0 ? cplx(z.real(), 0.0) : z;
}

inline double principal_arg(cplx z) { return std::arg(canon(z)); }

cplx principal_root(cplx z, int n);
cplx principal_log(cplx z);

struct QuadOptions {
    int initial_panels = 16;
    int max_panels = 200000;
    double abs_floor = 1e-14;
};

struct QuadResult {
    cplx value;
    double err = 0;
    int panels = 0;
};

QuadResult integrate(const ComplexFn& f, double a, double X, double tol,
                     const QuadOptions& opt = {});

struct Schedule {
    double X0 = 0;  // 0 selects 4*max(1,a)
    double factor = 2;
    int max_steps = 12;
};

enum class TailKind { Converges, Diverges, Undetermined };
const char* to_string(TailKind k);

struct TailVerdict {
    TailKind kind = TailKind::Undetermined;
    cplx value;        // Converges: extrapolated integral
    double err = 0;    // Converges: error estimate
    double rate_hint = 0;  // Diverges: ratio of the last two increments
    bool nonnegative = false;  // every sample real and >= 0
    std::vector<std::pair<double, cplx>> evidence;
};

struct ImproperOptions {
    double tol = 1e-2;        // final increment < tol*max(1,|I|)
    double delta_div = 1e-3;  // minimum increment for Diverges
    double quad_tol = 1e-10;
    QuadOptions quad;
};

TailVerdict improper_integral(const ComplexFn& f, double a, const Schedule& sched = {},
                              const ImproperOptions& opt = {});

struct TailEstimate {
    double liminf_est = 0, limsup_est = 0;
    double prev_liminf = 0, prev_limsup = 0;
    double X_lo = 0, X_hi = 0;
    int samples = 0;
};

// Min/max of g on a geometric grid over [horizon*wf, horizon], and over the
// preceding window [horizon*wf^2, horizon*wf].
TailEstimate tail_estimate(const RealFn& g, double horizon, double window_fraction = 0.5,
                           int samples = 2048);

enum class L1uVerdict { Holds, Fails, Undetermined };
const char* to_string(L1uVerdict v);

struct L1uResult {
    L1uVerdict verdict = L1uVerdict::Undetermined;
    double sup = 0;
    double last = 0;
};

L1uResult is_L1u(const RealFn& q_abs, double a, double horizon, double quad_tol = 1e-8);

// x_j = a - 1 + (X - a + 1)^(j/(n-1)), j = 0..n-1; geometric in distance from a-1.
std::vector<double> shifted_geometric_grid(double a, double X, int n);

}  // namespace sims
