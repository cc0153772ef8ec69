#include <doctest.h>

#include <cmath>
#include <random>

#include "sims/errors.hpp"
#include "sims/numerics.hpp"

using namespace sims;

namespace {

const cplx I(0.0, 1.0);

// Composite trapezoid with n uniform panels.
cplx trapezoid(const ComplexFn& f, double a, double b, long n) {
    const double h = (b - a) / n;
    cplx s = 0.5 * (f(a) + f(b));
    for (long k = 1; k < n; ++k) s += f(a + k * h);
    return s * h;
}

cplx ipow(cplx z, int n) {
    cplx r = 1;
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

}  // namespace

TEST_CASE("principal_root: examples") {
    CHECK(principal_root(4.0, 2) == cplx(2.0, 0.0));
    cplx r = principal_root(-1.0, 2);
    CHECK(std::abs(r - I) < 1e-16);
    cplx c = principal_root(cplx(0.0, -8.0), 3);
    CHECK(std::abs(c - cplx(std::sqrt(3.0), -1.0)) < 1e-14);
    CHECK(std::abs(ipow(c, 3) - cplx(0.0, -8.0)) < 1e-12);
    CHECK(principal_root(0.0, 5) == cplx(0.0, 0.0));
    // -0 imaginary part is on the negative real axis with arg = pi
    CHECK(principal_root(cplx(-1.0, -0.0), 2).imag() > 0);
}

TEST_CASE("property: principal_root^n = z and arg in (-pi/n, pi/n]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int k = 0; k < 500; ++k) {
        cplx z(u(rng), k % 7 == 0 ? 0.0 : u(rng));
        for (int n = 1; n <= 6; ++n) {
            cplx r = principal_root(z, n);
            CHECK(std::abs(ipow(r, n) - z) <= 1e-12 * std::abs(z));
            double ar = principal_arg(r);
            CHECK(ar > -M_PI / n - 1e-15);
            CHECK(ar <= M_PI / n + 1e-15);
        }
    }
}

TEST_CASE("integrate: closed forms") {
    QuadResult r = integrate([](double t) { return cplx(t, 0); }, 0, 2, 1e-12);
    CHECK(std::abs(r.value - 2.0) < 1e-14);
    QuadResult e = integrate([](double t) { return std::exp(I * t); }, 0, M_PI, 1e-12);
    CHECK(std::abs(e.value - 2.0 * I) < 1e-13);
    CHECK(e.err <= 1e-12 * std::max(1.0, std::abs(e.value)));
}

TEST_CASE("integrate: |-t^4+i|^{-1/2} on [1,50] against a 1e6-panel trapezoid") {
    auto f = [](double t) { return cplx(std::pow(std::abs(cplx(-t * t * t * t, 1.0)), -0.5), 0.0); };
    QuadResult r = integrate(f, 1, 50, 1e-12);
    cplx ref = trapezoid(f, 1, 50, 1000000);
    CHECK(std::abs(r.value - ref) <= 1e-8 * std::abs(ref));
}

TEST_CASE("integrate: errors") {
    CHECK_THROWS_AS(integrate([](double t) { return cplx(1.0 / (t - 1.0), 0); }, 0.5, 2, 1e-10), NonFiniteSample);
    QuadOptions tiny;
    tiny.max_panels = 20;
    CHECK_THROWS_AS(integrate([](double t) { return cplx(std::sin(1.0 / t), 0); }, 1e-6, 1, 1e-12, tiny),
                    ToleranceNotMet);
}

TEST_CASE("property: integrate is additive") {
    auto f = [](double t) { return std::exp(I * t * t) / (1.0 + t); };
    const double a = 0.3, b = 2.1, c = 5.7;
    QuadResult ac = integrate(f, a, c, 1e-10), ab = integrate(f, a, b, 1e-10), bc = integrate(f, b, c, 1e-10);
    CHECK(std::abs(ac.value - ab.value - bc.value) <= ac.err + ab.err + bc.err + 1e-15);
}

TEST_CASE("integrate: deterministic") {
    auto f = [](double t) { return std::exp(-t) * std::cos(3 * t) + I * std::sqrt(t); };
    QuadResult a = integrate(f, 0, 7, 1e-11), b = integrate(f, 0, 7, 1e-11);
    CHECK(a.value == b.value);
    CHECK(a.err == b.err);
}

TEST_CASE("improper_integral: examples") {
    TailVerdict v = improper_integral([](double t) { return cplx(1.0 / (t * t), 0); }, 1);
    REQUIRE(v.kind == TailKind::Converges);
    CHECK(std::abs(v.value - 1.0) < 1e-6);
    CHECK(improper_integral([](double t) { return cplx(1.0 / std::sqrt(t), 0); }, 1).kind == TailKind::Diverges);
    TailVerdict g = improper_integral([](double t) { return cplx(principal_root(cplx(-t * t * t * t, 1), 2).real(), 0); }, 1);
    CHECK(g.kind == TailKind::Converges);
    // dense-quadrature oracle on [1, 1e4] plus the tail of 1/(2t^2)
    auto h = [](double u) {
        double t = std::exp(u);
        return cplx(principal_root(cplx(-t * t * t * t, 1), 2).real() * t, 0);
    };
    cplx ref = trapezoid(h, 0, std::log(1e4), 1000000) + 0.5e-4;
    CHECK(std::abs(g.value - ref) < 1e-6);
}

TEST_CASE("improper_integral: evidence horizons increase geometrically") {
    TailVerdict v = improper_integral([](double t) { return cplx(std::exp(-t), 0); }, 2);
    REQUIRE(v.evidence.size() >= 3);
    CHECK(v.evidence.front().first == doctest::Approx(8.0));
    for (std::size_t k = 1; k < v.evidence.size(); ++k)
        CHECK(v.evidence[k].first == doctest::Approx(2 * v.evidence[k - 1].first));
}

TEST_CASE("improper_integral: signed oscillation is never Diverges") {
    TailVerdict v = improper_integral([](double t) { return cplx(std::sin(t), 0); }, 1);
    CHECK(v.kind != TailKind::Diverges);
    CHECK_FALSE(v.nonnegative);
}

TEST_CASE("property: p-integrals classify by p") {
    for (double p : {0.5, 1.0, 1.5, 2.0}) {
        TailVerdict v = improper_integral([p](double t) { return cplx(std::pow(t, -p), 0); }, 1);
        INFO("p = ", p);
        if (p > 1)
            CHECK(v.kind == TailKind::Converges);
        else
            CHECK(v.kind == TailKind::Diverges);
    }
}

TEST_CASE("tail_estimate: examples") {
    TailEstimate t = tail_estimate([](double x) { return 2 + 1 / x; }, 1e4);
    CHECK(t.liminf_est >= 2);
    CHECK(t.liminf_est <= 2.001);
    CHECK(t.X_hi == 1e4);
    CHECK(t.X_lo == doctest::Approx(5e3));
    CHECK(t.samples >= 200);
    TailEstimate s = tail_estimate([](double x) { return std::sin(x) * std::sin(x); }, 1e4);
    CHECK(s.liminf_est < 1e-3);
    CHECK(s.limsup_est > 0.999);
}

TEST_CASE("tail_estimate: PT ratio grows like horizon^{3/2}") {
    // s = i x^3, principal sqrt has arg pi/4
    auto g = [](double x) {
        cplx r = principal_root(cplx(0, x * x * x), 2);
        return r.real() * r.real() / std::abs(r);
    };
    TailEstimate t = tail_estimate(g, 1e4);
    CHECK(t.liminf_est > 0);
    CHECK(t.liminf_est > t.prev_liminf);
    const double lo = t.X_lo;
    CHECK(t.liminf_est == doctest::Approx(0.5 * std::pow(lo, 1.5)).epsilon(1e-9));
}

TEST_CASE("tail_estimate: non-finite samples throw") {
    CHECK_THROWS_AS(tail_estimate([](double x) { return x > 7000 ? NAN : 1.0; }, 1e4), NonFiniteSample);
}

TEST_CASE("property: tail_estimate is monotone under domination") {
    auto g = [](double x) { return std::sin(x) / (1 + x); };
    auto h = [](double x) { return std::sin(x) / (1 + x) + 1e-3 * std::cos(x) * std::cos(x); };
    TailEstimate tg = tail_estimate(g, 3e3), th = tail_estimate(h, 3e3);
    CHECK(tg.liminf_est <= th.liminf_est);
    CHECK(tg.limsup_est <= th.limsup_est);
    CHECK(tg.liminf_est <= tg.limsup_est);
}

TEST_CASE("is_L1u: examples") {
    L1uResult one = is_L1u([](double) { return 1.0; }, 1, 1e3);
    CHECK(one.verdict == L1uVerdict::Holds);
    CHECK(one.sup == doctest::Approx(1.0));
    CHECK(is_L1u([](double x) { return x * x * x * x; }, 1, 1e3).verdict == L1uVerdict::Fails);
    auto bounded = [](double x) { return std::abs(cplx(-(2 + std::sin(x)), 1.0)); };
    CHECK(is_L1u(bounded, 1, 1e3).verdict == L1uVerdict::Holds);
}

TEST_CASE("shifted_geometric_grid") {
    auto g = shifted_geometric_grid(1, 1e4, 513);
    REQUIRE(g.size() == 513);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == doctest::Approx(1e4));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
}
