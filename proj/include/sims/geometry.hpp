#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sims/problem.hpp"

namespace sims {

struct HullSample {
    std::vector<cplx> points;
    std::vector<cplx> hull;  // counterclockwise, collinear points dropped
    double x_max = 0, r_max = 0;
    int n_x = 0, n_r = 0;
    cplx recession;  // direction e^{-2i phi} of the unbounded part
    double diameter = 0;
};

struct AdmissiblePair {
    double theta = 0;
    cplx rotation;  // e^{i theta}, kept exact where possible
    cplx K;
    double margin = 0;
    double lambda_gap = 0;
    double recession = 0;  // Re[e^{i theta} e^{-2i phi}]
    bool foot_on_edge = false;
};

struct Admissibility {
    std::optional<AdmissiblePair> pair;
    double distance = 0;
    std::string reason;  // set when not admissible
};

HullSample sample_Q(const RayProblem& problem, double x_max, int n_x = 256, double r_max = 0,
                    int n_r = 256);

std::vector<cplx> convex_hull(std::vector<cplx> pts);

Admissibility admissible_pair(const HullSample& hull, cplx lambda);

}  // namespace sims
