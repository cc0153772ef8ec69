#pragma once

#include <string>

#include <json.hpp>

#include "sims/classify.hpp"

namespace sims {

using json = nlohmann::ordered_json;

struct ProblemSpec {
    RayProblem problem;
    ClassifyConfig config;
};

// Both throw SpecError on unknown keys, wrong types or invalid values.
ProblemSpec parse_spec(const json& j);
void apply_config(const json& j, ClassifyConfig& config);

// Throws IoError when the file cannot be read or is not JSON.
json read_json_file(const std::string& path);
ProblemSpec load_spec(const std::string& path);

json to_json(cplx z);
json to_json(const TailVerdict& v);
json to_json(const TailEstimate& t);
json to_json(const AdmissiblePair& p);
json to_json(const OracleReport& r);
json to_json(const ClassificationReport& r, const RayProblem& problem);
json geometry_json(const HullSample& hull, const Admissibility& adm);

// %.17g
std::string fmt17(double v);

}  // namespace sims
