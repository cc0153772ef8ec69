#include "sims/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sims/errors.hpp"
#include "sims/numerics.hpp"

namespace sims {

namespace {

double cross(cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

}  // namespace

std::vector<cplx> convex_hull(std::vector<cplx> pts) {
    auto less = [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    std::sort(pts.begin(), pts.end(), less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<cplx> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

HullSample sample_Q(const RayProblem& problem, double x_max, int n_x, double r_max, int n_r) {
    if (!(x_max > problem.a)) throw Error("sample_Q: x_max must exceed a");
    if (n_x < 2 || n_r < 3) throw Error("sample_Q: grids too small");
    HullSample hs;
    hs.x_max = x_max;
    hs.n_x = n_x;
    hs.n_r = n_r;
    hs.r_max = r_max > 0 ? r_max : 1e3 * (1 + std::abs(problem.lambda));
    hs.recession = problem.p();

    std::vector<double> xs = shifted_geometric_grid(problem.a, x_max, n_x);
    std::vector<double> rs(n_r);
    rs[0] = 0;
    for (int k = 1; k < n_r; ++k) rs[k] = hs.r_max * std::pow(10.0, -6.0 * (n_r - 1 - k) / (n_r - 2));
    rs[n_r - 1] = hs.r_max;

    hs.points.reserve(static_cast<std::size_t>(n_x) * n_r);
    for (double x : xs) {
        cplx qx = evaluate(problem.q, x);
        if (!std::isfinite(qx.real()) || !std::isfinite(qx.imag())) throw NonFiniteSample(x);
        for (double r : rs) hs.points.push_back(qx + r * hs.recession);
    }
    hs.hull = convex_hull(hs.points);
    for (std::size_t i = 0; i < hs.hull.size(); ++i)
        for (std::size_t j = i + 1; j < hs.hull.size(); ++j)
            hs.diameter = std::max(hs.diameter, std::abs(hs.hull[i] - hs.hull[j]));
    return hs;
}

Admissibility admissible_pair(const HullSample& hs, cplx lambda) {
    Admissibility res;
    const auto& h = hs.hull;
    if (h.empty()) throw Error("admissible_pair: empty hull");
    const std::size_t n = h.size();

    if (n >= 3) {
        bool inside = true;
        for (std::size_t i = 0; i < n && inside; ++i)
            if (cross(h[i], h[(i + 1) % n], lambda) < 0) inside = false;
        if (inside) {
            res.distance = 0;
            res.reason = "lambda lies inside the sampled hull of Q";
            return res;
        }
    }

    // Nearest point over vertices and edges.
    double best = std::numeric_limits<double>::infinity();
    cplx K = h[0];
    bool on_edge = false;
    cplx P{}, Q{};
    const std::size_t edges = n == 1 ? 0 : (n == 2 ? 1 : n);
    if (n == 1) best = std::abs(lambda - h[0]);
    for (std::size_t i = 0; i < edges; ++i) {
        cplx a = h[i], b = h[(i + 1) % n], d = b - a;
        double len2 = std::norm(d);
        double t = len2 > 0 ? dot(lambda - a, d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        cplx foot = t == 0 ? a : (t == 1 ? b : a + t * d);
        double dist = std::abs(lambda - foot);
        if (dist < best) {
            best = dist;
            K = foot;
            on_edge = t > 1e-12 && t < 1 - 1e-12;
            P = a;
            Q = b;
        }
    }

    cplx rot;
    if (on_edge) {
        // Unit normal of the supporting edge pointing toward lambda; the foot
        // point is recomputed from it to avoid cancellation along the edge.
        cplx d = Q - P;
        cplx nrm = cplx(d.imag(), -d.real()) / std::abs(d);
        double side = dot(lambda - P, nrm);
        if (side < 0) {
            nrm = -nrm;
            side = -side;
        }
        K = lambda - side * nrm;
        rot = -std::conj(nrm);
        best = side;
    } else if (best > 0) {
        rot = -std::conj(lambda - K) / std::abs(lambda - K);
    }
    res.distance = best;
    const double eps_geom = 1e-6 * (1 + std::abs(lambda) + std::abs(K));
    if (best < eps_geom) {
        res.reason = "distance from lambda to the sampled hull is below eps_geom";
        return res;
    }

    AdmissiblePair ap;
    ap.rotation = rot;
    ap.theta = principal_arg(rot);
    ap.K = K;
    ap.foot_on_edge = on_edge;
    ap.margin = std::numeric_limits<double>::infinity();
    for (cplx z : hs.points) ap.margin = std::min(ap.margin, (rot * (z - K)).real());
    ap.lambda_gap = -(rot * (lambda - K)).real();
    ap.recession = (rot * hs.recession).real();
    if (ap.recession < -1e-12) {
        res.reason = "recession direction e^{-2i phi} leaves the supporting half-plane";
        return res;
    }
    res.pair = ap;
    return res;
}

}  // namespace sims
