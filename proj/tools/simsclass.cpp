// simsclass: command-line front end for the classification library.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sims/classify.hpp"
#include "sims/errors.hpp"
#include "sims/io.hpp"

using namespace sims;

namespace {

constexpr int kOk = 0, kInternal = 1, kNotAdmissible = 2, kAssumption = 3, kInput = 4;

struct Common {
    std::string config_path;
};

ProblemSpec load(const std::string& path, const Common& common) {
    ProblemSpec spec = load_spec(path);
    std::string cfg = common.config_path;
    if (cfg.empty())
        if (const char* env = std::getenv("SIMSCLASS_CONFIG")) cfg = env;
    if (!cfg.empty()) apply_config(read_json_file(cfg), spec.config);
    return spec;
}

int exit_code(const ClassificationReport& r) {
    switch (r.failure) {
        case FailureKind::None: return kOk;
        case FailureKind::NotAdmissible: return kNotAdmissible;
        case FailureKind::AssumptionViolated:
        case FailureKind::BudgetDiverges: return kAssumption;
    }
    return kInternal;
}

// Runs fn and maps library exceptions onto the exit-code contract.
template <class Fn>
int guarded(Fn&& fn, std::string& err) {
    try {
        return fn();
    } catch (const ParseError& e) {
        err = std::string("potential: ") + e.what();
        return kInput;
    } catch (const SpecError& e) {
        err = e.what();
        return kInput;
    } catch (const IoError& e) {
        err = e.what();
        return kInput;
    } catch (const AssumptionViolated& e) {
        err = e.what();
        return kAssumption;
    } catch (const BudgetDiverges& e) {
        err = e.what();
        return kAssumption;
    } catch (const std::exception& e) {
        err = e.what();
        return kInternal;
    }
}

struct Job {
    std::string path;
    std::string out;
    std::string err;
    int code = kInternal;
};

int cmd_classify(const std::vector<std::string>& paths, const Common& common, int jobs) {
    std::vector<Job> work(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) work[i].path = paths[i];
    auto run = [&](Job& j) {
        j.code = guarded(
            [&] {
                ProblemSpec spec = load(j.path, common);
                ClassificationReport rep = classify(spec.problem, spec.config);
                j.out = to_json(rep, spec.problem).dump(2);
                return exit_code(rep);
            },
            j.err);
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    if (n == 1) {
        for (auto& j : work) run(j);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < work.size(); i += n) run(work[i]);
            });
        for (auto& th : pool) th.join();
    }
    // Output in input order so results do not depend on --jobs.
    int worst = kOk;
    const bool batch = work.size() > 1;
    if (batch) std::cout << "[\n";
    bool first = true;
    for (const auto& j : work) {
        if (!j.err.empty()) std::cerr << j.path << ": " << j.err << "\n";
        worst = std::max(worst, j.code);
        if (j.out.empty()) continue;
        if (batch && !first) std::cout << ",\n";
        std::cout << j.out;
        first = false;
    }
    if (batch)
        std::cout << "\n]\n";
    else if (!first)
        std::cout << "\n";
    return worst;
}

int cmd_solve(const std::string& path, const Common& common, std::optional<double> xmax, int points) {
    std::string err;
    int code = guarded(
        [&] {
            ProblemSpec spec = load(path, common);
            const RayProblem& p = spec.problem;
            const double X = xmax.value_or(p.a + 20.0);
            if (!(X > p.a)) throw SpecError("--xmax must exceed a");
            if (points < 2) throw SpecError("--points must be at least 2");
            SField field(p);
            AssumptionReport ar = validate_assumptions(field, p.a, X, spec.config.assumption_points, false);
            if (!ar.clean())
                throw AssumptionViolated(ar.first_violations.front().first, ar.first_violations.front().second);
            ErrorBudget eb = error_budget(field, p.a, spec.config.schedule, spec.config.improper);
            WkbEvaluator w(field, eb.envelope, X);
            std::printf("x,re_y_lead,im_y_lead,re_yhat_lead,im_yhat_lead,re_phase,im_phase,envelope\n");
            for (double x : shifted_geometric_grid(p.a, X, points)) {
                WkbSnapshot s = w.eval(x);
                std::printf("%s,%s,%s,%s,%s,%s,%s,%s\n", fmt17(x).c_str(), fmt17(s.y_lead.real()).c_str(),
                            fmt17(s.y_lead.imag()).c_str(), fmt17(s.yhat_lead.real()).c_str(),
                            fmt17(s.yhat_lead.imag()).c_str(), fmt17(s.phase.real()).c_str(),
                            fmt17(s.phase.imag()).c_str(), fmt17(s.envelope).c_str());
            }
            return kOk;
        },
        err);
    if (!err.empty()) std::cerr << path << ": " << err << "\n";
    return code;
}

void dump_trajectory(const Trajectory& t, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "x,re_v,im_v,re_dv,im_dv,log_offset\n";
    for (std::size_t j = 0; j < t.grid.size(); ++j)
        out << fmt17(t.grid[j]) << ',' << fmt17(t.v[j].real()) << ',' << fmt17(t.v[j].imag()) << ','
            << fmt17(t.dv[j].real()) << ',' << fmt17(t.dv[j].imag()) << ',' << fmt17(t.log_offset[j]) << '\n';
}

int cmd_oracle(const std::string& path, const Common& common, std::optional<double> xmax, std::optional<double> tol,
               const std::string& dump, const std::string& member) {
    std::string err;
    int code = guarded(
        [&] {
            ProblemSpec spec = load(path, common);
            const RayProblem& p = spec.problem;
            const double X = xmax.value_or(spec.config.oracle_xmax);
            const double t = tol.value_or(spec.config.tol_ode);
            if (!(X > p.a)) throw SpecError("--xmax must exceed a");
            if (!(t >= 1e-12 && t <= 1e-4)) throw SpecError("--tol must lie in [1e-12, 1e-4]");
            const double gx = spec.config.geometry_xmax > 0 ? spec.config.geometry_xmax : spec.config.horizon;
            HullSample hull = sample_Q(p, gx, spec.config.n_x, spec.config.r_max, spec.config.n_r);
            Admissibility adm = admissible_pair(hull, p.lambda);
            if (!adm.pair) {
                std::cerr << path << ": NotAdmissible: " << adm.reason << "\n";
                return kNotAdmissible;
            }
            OracleReport rep = empirical_class(p, *adm.pair, X, t, spec.config.saturation);
            json j = to_json(rep);
            j["admissible"] = to_json(*adm.pair);
            std::cout << j.dump(2) << "\n";
            if (!dump.empty()) {
                SField field(p);
                Trajectory tr = member == "recessive" ? integrate_ivp(field, X, p.a, {0.0, 1.0}, t)
                                : member == "basis2"  ? integrate_ivp(field, p.a, X, {0.0, 1.0}, t)
                                                      : integrate_ivp(field, p.a, X, {1.0, 0.0}, t);
                dump_trajectory(tr, dump);
            }
            return kOk;
        },
        err);
    if (!err.empty()) std::cerr << path << ": " << err << "\n";
    return code;
}

int cmd_geometry(const std::string& path, const Common& common, const std::string& dump) {
    std::string err;
    int code = guarded(
        [&] {
            ProblemSpec spec = load(path, common);
            const RayProblem& p = spec.problem;
            const double gx = spec.config.geometry_xmax > 0 ? spec.config.geometry_xmax : spec.config.horizon;
            HullSample hull = sample_Q(p, gx, spec.config.n_x, spec.config.r_max, spec.config.n_r);
            Admissibility adm = admissible_pair(hull, p.lambda);
            std::cout << geometry_json(hull, adm).dump(2) << "\n";
            if (!dump.empty()) {
                std::ofstream out(dump);
                if (!out) throw IoError("cannot write " + dump);
                out << "re,im\n";
                for (cplx z : hull.hull) out << fmt17(z.real()) << ',' << fmt17(z.imag()) << '\n';
            }
            return adm.pair ? kOk : kNotAdmissible;
        },
        err);
    if (!err.empty()) std::cerr << path << ": " << err << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify complex Sturm-Liouville problems on a ray into limit point I / II / limit circle"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path,
                   "JSON config overriding spec config (default: $SIMSCLASS_CONFIG if set)");

    std::vector<std::string> cls_specs;
    int jobs = 1;
    auto* cls = app.add_subcommand("classify", "classify one or more problem specs, JSON report on stdout");
    cls->add_option("spec", cls_specs, "problem spec file(s)")->required();
    cls->add_option("--jobs,-j", jobs, "parallel workers for batch classification")->check(CLI::PositiveNumber);

    std::string spec_path;
    std::optional<double> xmax, tol;
    int points = 201;
    auto* solve = app.add_subcommand("solve", "CSV of the leading-order WKB pair");
    solve->add_option("spec", spec_path)->required();
    solve->add_option("--xmax", xmax, "right end of the sample grid (default a+20)");
    solve->add_option("--points", points, "number of samples");

    std::string dump, member = "basis1";
    auto* orc = app.add_subcommand("oracle", "direct integration and empirical class, JSON on stdout");
    orc->add_option("spec", spec_path)->required();
    orc->add_option("--xmax", xmax, "integration end (default config.oracle_xmax)");
    orc->add_option("--tol", tol, "ODE tolerance (default config.tol_ode)");
    orc->add_option("--dump", dump, "write a trajectory CSV");
    orc->add_option("--member", member, "trajectory to dump")
        ->check(CLI::IsMember({"basis1", "basis2", "recessive"}));

    auto* geo = app.add_subcommand("geometry", "admissible pair for lambda, JSON on stdout");
    geo->add_option("spec", spec_path)->required();
    geo->add_option("--dump", dump, "write hull vertices as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kInput;
    }

    if (*cls) return cmd_classify(cls_specs, common, jobs);
    if (*solve) return cmd_solve(spec_path, common, xmax, points);
    if (*orc) return cmd_oracle(spec_path, common, xmax, tol, dump, member);
    if (*geo) return cmd_geometry(spec_path, common, dump);
    return kInternal;
}
