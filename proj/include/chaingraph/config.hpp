#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaingraph/boxmap.hpp"
#include "chaingraph/geometry.hpp"
#include "chaingraph/oracle.hpp"
#include "chaingraph/systems.hpp"

namespace chaingraph {

using ordered_json = nlohmann::ordered_json;

struct RegionSpec {
    enum class Kind { box, ball };
    Kind kind = Kind::box;
    Box box;                       // analysis window (bounding box for balls)
    std::vector<bool> periodic;    // per dimension
    std::vector<double> center;    // ball only
    double radius = 0;             // ball only
};

struct OracleConfig {
    bool enabled = false;
    int pairs = 200;
    std::vector<double> eps_schedule = {0.1, 0.05, 0.025, 0.0125};
    double spacing_ratio = 5.0;
};

struct RunConfig {
    int schema_version = 1;
    std::string name = "run";
    std::uint64_t seed = 1;
    SystemSpec system;
    RegionSpec region;
    int initial_depth = 8;
    int max_depth = 8;
    int refinement_rounds = 0;
    SamplingConfig sampling;
    OracleConfig oracle;
    bool classify_edges = false;
    ClassifyBudget classify_budget;
    std::optional<double> compare_time_t;  // second T for the time-T graph comparison
    std::vector<std::string> outputs = {"json"};

    void validate() const;  // throws ConfigError with a JSON pointer
};

struct ConfigError : std::runtime_error {
    std::string pointer;
    ConfigError(std::string ptr, const std::string& what)
        : std::runtime_error(what + " (at " + ptr + ")"), pointer(std::move(ptr)) {}
};

ordered_json to_json(const RunConfig& c);
RunConfig config_from_json(const ordered_json& j);

RunConfig parse_config_file(const std::string& path);

/// Built-in presets with the reference parameter values baked in.
RunConfig make_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace chaingraph
