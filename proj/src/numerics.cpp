#include "sims/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sims/errors.hpp"

namespace sims {

cplx principal_root(cplx z, int n) {
    if (z == cplx(0.0, 0.0)) return 0.0;
    z = canon(z);
    switch (n) {
        case 1: return z;
        case 2: return std::sqrt(z);
        case 4: return std::sqrt(std::sqrt(z));
        default: return std::polar(std::pow(std::abs(z), 1.0 / n), std::arg(z) / n);
    }
}

cplx principal_log(cplx z) { return std::log(canon(z)); }

const char* to_string(TailKind k) {
    switch (k) {
        case TailKind::Converges: return "Converges";
        case TailKind::Diverges: return "Diverges";
        case TailKind::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(L1uVerdict v) {
    switch (v) {
        case L1uVerdict::Holds: return "Holds";
        case L1uVerdict::Fails: return "Fails";
        case L1uVerdict::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK qk15).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cplx val;
    double err;
};

Panel gk15(const ComplexFn& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fv[15];
    auto sample = [&](double x) {
        cplx y = f(x);
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) throw NonFiniteSample(x);
        return y;
    };
    fv[7] = sample(c);
    for (int j = 0; j < 7; ++j) {
        fv[j] = sample(c - h * xgk[j]);
        fv[14 - j] = sample(c + h * xgk[j]);
    }
    cplx rk = wgk[7] * fv[7];
    cplx rg = wg[3] * fv[7];
    double resabs = wgk[7] * std::abs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        cplx pair = fv[j] + fv[14 - j];
        rk += wgk[j] * pair;
        resabs += wgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) rg += wg[j / 2] * pair;
    }
    cplx mean = 0.5 * rk;
    double resasc = wgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    const double ah = std::fabs(h);
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((rk - rg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
    return {a, b, rk * h, err};
}

}  // namespace

QuadResult integrate(const ComplexFn& f, double a, double X, double tol, const QuadOptions& opt) {
    if (!(a < X)) {
        if (a == X) return {};
        QuadResult r = integrate(f, X, a, tol, opt);
        r.value = -r.value;
        return r;
    }
    std::vector<Panel> panels;
    const int n0 = std::max(1, opt.initial_panels);
    panels.reserve(n0 * 4);
    cplx total = 0.0;
    double total_err = 0.0;
    for (int k = 0; k < n0; ++k) {
        double lo = a + (X - a) * k / n0;
        double hi = k + 1 == n0 ? X : a + (X - a) * (k + 1) / n0;
        panels.push_back(gk15(f, lo, hi));
        total += panels.back().val;
        total_err += panels.back().err;
    }
    auto worse = [&](int i, int j) {
        if (panels[i].err != panels[j].err) return panels[i].err < panels[j].err;
        return i > j;
    };
    std::priority_queue<int, std::vector<int>, decltype(worse)> heap(worse);
    for (int k = 0; k < n0; ++k) heap.push(k);

    auto done = [&] { return total_err <= std::max(tol * std::max(1.0, std::abs(total)), opt.abs_floor); };
    while (!done()) {
        if (static_cast<int>(panels.size()) >= opt.max_panels) throw ToleranceNotMet(a, X, total_err);
        int i = heap.top();
        heap.pop();
        Panel p = panels[i];
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) throw ToleranceNotMet(a, X, total_err);
        Panel l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
        total += l.val + r.val - p.val;
        total_err += l.err + r.err - p.err;
        panels[i] = l;
        panels.push_back(r);
        heap.push(i);
        heap.push(static_cast<int>(panels.size()) - 1);
    }
    // Final sum in left-to-right order.
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    QuadResult res;
    for (const Panel& p : panels) {
        res.value += p.val;
        res.err += p.err;
    }
    res.panels = static_cast<int>(panels.size());
    return res;
}

TailVerdict improper_integral(const ComplexFn& f, double a, const Schedule& sched,
                              const ImproperOptions& opt) {
    TailVerdict tv;
    bool nonneg = true;
    ComplexFn g = [&](double x) {
        cplx y = f(x);
        if (y.imag() != 0.0 || !(y.real() >= 0.0)) nonneg = false;
        return y;
    };
    double X = sched.X0 > 0 ? sched.X0 : 4.0 * std::max(1.0, a);
    if (!(X > a)) X = a + 4.0 * std::max(1.0, std::fabs(a));
    QuadResult q = integrate(g, a, X, opt.quad_tol, opt.quad);
    cplx I = q.value;
    double qerr = q.err;
    tv.evidence.emplace_back(X, I);
    std::vector<cplx> inc;
    for (int k = 0; k < sched.max_steps; ++k) {
        double Xn = X * sched.factor;
        QuadResult d = integrate(g, X, Xn, opt.quad_tol, opt.quad);
        I += d.value;
        qerr += d.err;
        inc.push_back(d.value);
        X = Xn;
        tv.evidence.emplace_back(X, I);
    }
    tv.nonnegative = nonneg;
    const std::size_t n = inc.size();
    if (n < 3) return tv;
    const double d1 = std::abs(inc[n - 3]), d2 = std::abs(inc[n - 2]), d3 = std::abs(inc[n - 1]);
    if (d1 >= d2 && d2 >= d3 && d3 < opt.tol * std::max(1.0, std::abs(I))) {
        tv.kind = TailKind::Converges;
        double rho = d2 > 0 ? d3 / d2 : 0.0;
        cplx tail = rho < 1 ? inc[n - 1] * (rho / (1 - rho)) : cplx(0.0);
        tv.value = I + tail;
        tv.err = std::abs(tail) + qerr;
        return tv;
    }
    const double slack = 1 - 1e-9;
    if (nonneg && d1 >= opt.delta_div && d2 >= opt.delta_div && d3 >= opt.delta_div &&
        d2 >= d1 * slack && d3 >= d2 * slack) {
        tv.kind = TailKind::Diverges;
        tv.rate_hint = d3 / d2;
        return tv;
    }
    return tv;
}

TailEstimate tail_estimate(const RealFn& g, double horizon, double window_fraction, int samples) {
    TailEstimate t;
    t.X_hi = horizon;
    t.X_lo = horizon * window_fraction;
    t.samples = samples;
    auto window = [&](double lo, double hi, double& mn, double& mx) {
        mn = std::numeric_limits<double>::infinity();
        mx = -mn;
        const double ratio = std::log(hi / lo);
        for (int j = 0; j < samples; ++j) {
            double x = j + 1 == samples ? hi : lo * std::exp(ratio * j / (samples - 1));
            double y = g(x);
            if (!std::isfinite(y)) throw NonFiniteSample(x);
            mn = std::min(mn, y);
            mx = std::max(mx, y);
        }
    };
    window(t.X_lo, t.X_hi, t.liminf_est, t.limsup_est);
    window(t.X_lo * window_fraction, t.X_lo, t.prev_liminf, t.prev_limsup);
    return t;
}

L1uResult is_L1u(const RealFn& q_abs, double a, double horizon, double quad_tol) {
    L1uResult res;
    ComplexFn f = [&](double x) { return cplx(q_abs(x), 0.0); };
    QuadOptions opt;
    opt.initial_panels = 1;
    std::vector<double> u;
    for (double n = std::ceil(a); n + 1 <= horizon; n += 1)
        u.push_back(integrate(f, n, n + 1, quad_tol, opt).value.real());
    if (u.size() < 8) return res;
    std::vector<double> run(u.size());
    double m = 0;
    for (std::size_t k = 0; k < u.size(); ++k) run[k] = m = std::max(m, u[k]);
    const std::size_t q3 = u.size() * 3 / 4;
    res.sup = run.back();
    res.last = u.back();
    if (run.back() <= 1.01 * run[q3]) {
        res.verdict = L1uVerdict::Holds;
        return res;
    }
    bool monotone = true;
    for (std::size_t k = q3 + 1; k < u.size(); ++k)
        if (u[k] < u[k - 1]) monotone = false;
    if (monotone && u.back() >= 1.1 * u[q3]) res.verdict = L1uVerdict::Fails;
    return res;
}

std::vector<double> shifted_geometric_grid(double a, double X, int n) {
    std::vector<double> g(n);
    const double span = X - a + 1;
    for (int j = 0; j < n; ++j) g[j] = a - 1 + std::pow(span, static_cast<double>(j) / (n - 1));
    g[0] = a;
    g[n - 1] = X;
    return g;
}

}  // namespace sims
