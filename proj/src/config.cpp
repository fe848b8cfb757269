#include "chaingraph/config.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace chaingraph {

namespace {

const double pi = 3.14159265358979323846;

const std::map<std::string, SystemKind>& kind_names() {
    static const std::map<std::string, SystemKind> m = {
        {"identity", SystemKind::identity_map},
        {"logistic", SystemKind::logistic_map},
        {"polynomial-flow", SystemKind::polynomial_flow},
        {"lorenz", SystemKind::lorenz_flow},
        {"pendulum", SystemKind::pendulum_poincare},
        {"circle-rotation", SystemKind::circle_rotation_flow},
        {"sin-pi-over-x", SystemKind::sin_pi_over_x_flow},
        {"chafee-infante", SystemKind::chafee_infante_galerkin},
    };
    return m;
}

const std::map<std::string, StepMode>& mode_names() {
    static const std::map<std::string, StepMode> m = {
        {"map", StepMode::discrete_map},
        {"time-t", StepMode::time_t_map},
        {"poincare", StepMode::poincare_return},
    };
    return m;
}

template <typename T>
T get_or(const ordered_json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

}  // namespace

void RunConfig::validate() const {
    if (outputs.empty()) throw ConfigError("/outputs", "outputs must be nonempty");
    for (const auto& o : outputs)
        if (o != "json" && o != "dot" && o != "boxlist")
            throw ConfigError("/outputs", "unknown output kind '" + o + "'");
    if (initial_depth < 0 || initial_depth > 30)
        throw ConfigError("/initial_depth", "initial_depth out of range");
    if (initial_depth > max_depth) throw ConfigError("/initial_depth", "initial_depth must be <= max_depth");
    if (refinement_rounds < 0) throw ConfigError("/refinement_rounds", "refinement_rounds must be >= 0");
    if (region.box.dim() != system.phase_dim())
        throw ConfigError("/region/box", "region dimension does not match the system phase dimension");
    if (!region.periodic.empty() &&
        static_cast<int>(region.periodic.size()) != region.box.dim())
        throw ConfigError("/region/periodic", "periodic flags dimension mismatch");
    if (region.kind == RegionSpec::Kind::ball) {
        if (static_cast<int>(region.center.size()) != region.box.dim())
            throw ConfigError("/region/center", "ball center dimension mismatch");
        if (!(region.radius > 0)) throw ConfigError("/region/radius", "ball radius must be positive");
    }
    if (!(sampling.bloat_factor >= 0)) throw ConfigError("/sampling/bloat_factor", "bloat_factor must be >= 0");
    if (oracle.enabled) {
        if (oracle.eps_schedule.empty())
            throw ConfigError("/oracle/eps_schedule", "epsilon schedule must be nonempty");
        for (std::size_t i = 1; i < oracle.eps_schedule.size(); ++i)
            if (!(oracle.eps_schedule[i] < oracle.eps_schedule[i - 1]))
                throw ConfigError("/oracle/eps_schedule", "epsilon schedule must be strictly decreasing");
    }
    if (compare_time_t && !(*compare_time_t > 0))
        throw ConfigError("/compare_time_t", "comparison T must be positive");
    try {
        system.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/system", e.what());
    }
}

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["seed"] = c.seed;

    ordered_json sys;
    for (const auto& [name, kind] : kind_names())
        if (kind == c.system.kind) sys["kind"] = name;
    for (const auto& [name, mode] : mode_names())
        if (mode == c.system.mode) sys["mode"] = name;
    sys["time_step"] = c.system.time_step;
    ordered_json params;
    switch (c.system.kind) {
        case SystemKind::identity_map: params["dim"] = c.system.dim; break;
        case SystemKind::logistic_map: params["a"] = c.system.a; break;
        case SystemKind::polynomial_flow: break;
        case SystemKind::lorenz_flow:
            params["sigma"] = c.system.sigma;
            params["b"] = c.system.b;
            params["r"] = c.system.r;
            break;
        case SystemKind::pendulum_poincare:
            params["gamma"] = c.system.gamma;
            params["rho"] = c.system.rho;
            break;
        case SystemKind::chafee_infante_galerkin:
            params["lambda"] = c.system.lambda;
            params["modes"] = c.system.modes;
            params["grid_modes"] = c.system.grid_modes;
            break;
        default: break;
    }
    sys["params"] = params;
    if (c.system.kind == SystemKind::polynomial_flow) sys["poly_coeffs"] = c.system.poly_coeffs;
    if (c.system.mode == StepMode::poincare_return && c.system.kind == SystemKind::lorenz_flow) {
        sys["section"] = {{"axis", c.system.section.axis},
                          {"value", c.system.section.value},
                          {"direction", c.system.section.direction},
                          {"max_time", c.system.section.max_time}};
    }
    sys["integrator"] = {{"dt", c.system.integrator.dt}};
    sys["escape_radius"] = c.system.escape_radius;
    j["system"] = sys;

    ordered_json reg;
    reg["kind"] = c.region.kind == RegionSpec::Kind::ball ? "ball" : "box";
    reg["box"] = {{"lo", c.region.box.lo}, {"hi", c.region.box.hi}};
    reg["periodic"] = c.region.periodic.empty() ? std::vector<bool>(c.region.box.dim(), false)
                                                : c.region.periodic;
    if (c.region.kind == RegionSpec::Kind::ball) {
        reg["center"] = c.region.center;
        reg["radius"] = c.region.radius;
    }
    j["region"] = reg;

    j["initial_depth"] = c.initial_depth;
    j["max_depth"] = c.max_depth;
    j["refinement_rounds"] = c.refinement_rounds;
    j["sampling"] = {{"corners", c.sampling.corners},
                     {"center", c.sampling.center},
                     {"face_midpoints", c.sampling.face_midpoints},
                     {"extra_random", c.sampling.extra_random},
                     {"bloat_factor", c.sampling.bloat_factor},
                     {"max_hull_cells", c.sampling.max_hull_cells}};
    j["oracle"] = {{"enabled", c.oracle.enabled},
                   {"pairs", c.oracle.pairs},
                   {"eps_schedule", c.oracle.eps_schedule},
                   {"spacing_ratio", c.oracle.spacing_ratio}};
    j["classify_edges"] = c.classify_edges;
    j["classify_budget"] = {{"seeds", c.classify_budget.seeds},
                            {"iterations", c.classify_budget.iterations}};
    if (c.compare_time_t)
        j["compare_time_t"] = *c.compare_time_t;
    else
        j["compare_time_t"] = nullptr;
    j["outputs"] = c.outputs;
    return j;
}

RunConfig config_from_json(const ordered_json& j) {
    RunConfig c;
    try {
        c.schema_version = get_or(j, "schema_version", 1);
        c.name = get_or<std::string>(j, "name", "run");
        c.seed = get_or<std::uint64_t>(j, "seed", 1);

        const auto& sys = j.at("system");
        std::string kind = sys.at("kind").get<std::string>();
        auto kit = kind_names().find(kind);
        if (kit == kind_names().end()) throw ConfigError("/system/kind", "unknown system kind '" + kind + "'");
        c.system.kind = kit->second;
        std::string mode = get_or<std::string>(sys, "mode", "map");
        auto mit = mode_names().find(mode);
        if (mit == mode_names().end()) throw ConfigError("/system/mode", "unknown step mode '" + mode + "'");
        c.system.mode = mit->second;
        c.system.time_step = get_or(sys, "time_step", 1.0);
        if (sys.contains("params")) {
            const auto& p = sys["params"];
            c.system.a = get_or(p, "a", c.system.a);
            c.system.sigma = get_or(p, "sigma", c.system.sigma);
            c.system.b = get_or(p, "b", c.system.b);
            c.system.r = get_or(p, "r", c.system.r);
            c.system.gamma = get_or(p, "gamma", c.system.gamma);
            c.system.rho = get_or(p, "rho", c.system.rho);
            c.system.lambda = get_or(p, "lambda", c.system.lambda);
            c.system.modes = get_or(p, "modes", c.system.modes);
            c.system.grid_modes = get_or(p, "grid_modes", c.system.grid_modes);
            c.system.dim = get_or(p, "dim", c.system.dim);
        }
        if (sys.contains("poly_coeffs")) c.system.poly_coeffs = sys["poly_coeffs"].get<std::vector<double>>();
        if (sys.contains("section")) {
            const auto& s = sys["section"];
            c.system.section.axis = get_or(s, "axis", 2);
            c.system.section.value = get_or(s, "value", 16.5);
            c.system.section.direction = get_or(s, "direction", -1);
            c.system.section.max_time = get_or(s, "max_time", 400.0);
        }
        if (sys.contains("integrator")) c.system.integrator.dt = get_or(sys["integrator"], "dt", 0.005);
        c.system.escape_radius = get_or(sys, "escape_radius", 1e6);

        const auto& reg = j.at("region");
        std::string rkind = get_or<std::string>(reg, "kind", "box");
        c.region.kind = rkind == "ball" ? RegionSpec::Kind::ball : RegionSpec::Kind::box;
        c.region.box = Box(reg.at("box").at("lo").get<std::vector<double>>(),
                           reg.at("box").at("hi").get<std::vector<double>>());
        if (reg.contains("periodic")) c.region.periodic = reg["periodic"].get<std::vector<bool>>();
        if (c.region.kind == RegionSpec::Kind::ball) {
            c.region.center = reg.at("center").get<std::vector<double>>();
            c.region.radius = reg.at("radius").get<double>();
        }

        c.initial_depth = get_or(j, "initial_depth", 8);
        c.max_depth = get_or(j, "max_depth", c.initial_depth + get_or(j, "refinement_rounds", 0));
        c.refinement_rounds = get_or(j, "refinement_rounds", 0);
        if (j.contains("sampling")) {
            const auto& s = j["sampling"];
            c.sampling.corners = get_or(s, "corners", true);
            c.sampling.center = get_or(s, "center", true);
            c.sampling.face_midpoints = get_or(s, "face_midpoints", true);
            c.sampling.extra_random = get_or(s, "extra_random", 0);
            c.sampling.bloat_factor = get_or(s, "bloat_factor", 1.0);
            c.sampling.max_hull_cells = get_or<std::size_t>(s, "max_hull_cells", 32768);
        }
        c.sampling.seed = c.seed;
        if (j.contains("oracle")) {
            const auto& o = j["oracle"];
            c.oracle.enabled = get_or(o, "enabled", false);
            c.oracle.pairs = get_or(o, "pairs", 200);
            if (o.contains("eps_schedule"))
                c.oracle.eps_schedule = o["eps_schedule"].get<std::vector<double>>();
            c.oracle.spacing_ratio = get_or(o, "spacing_ratio", 5.0);
        }
        c.classify_edges = get_or(j, "classify_edges", false);
        if (j.contains("classify_budget")) {
            c.classify_budget.seeds = get_or(j["classify_budget"], "seeds", 100);
            c.classify_budget.iterations = get_or(j["classify_budget"], "iterations", 1000);
        }
        if (j.contains("compare_time_t") && !j["compare_time_t"].is_null())
            c.compare_time_t = j["compare_time_t"].get<double>();
        if (j.contains("outputs")) c.outputs = j["outputs"].get<std::vector<std::string>>();
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("/", std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

RunConfig make_preset(const std::string& name) {
    RunConfig c;
    c.name = name;
    if (name == "identity") {
        c.system.kind = SystemKind::identity_map;
        c.system.mode = StepMode::discrete_map;
        c.system.dim = 2;
        c.region.box = Box({0.0, 0.0}, {1.0, 1.0});
        c.initial_depth = c.max_depth = 5;
    } else if (name == "logistic") {
        c.system.kind = SystemKind::logistic_map;
        c.system.mode = StepMode::discrete_map;
        c.system.a = 3.2;
        c.system.escape_radius = 100.0;
        c.region.box = Box({0.0}, {1.0});
        c.initial_depth = c.max_depth = 12;
        c.oracle.enabled = true;
    } else if (name == "cubic-ode") {
        c.system.kind = SystemKind::polynomial_flow;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.poly_coeffs = {0.0, 1.0, 0.0, -1.0};
        c.system.integrator.dt = 0.01;
        c.system.escape_radius = 100.0;
        c.region.box = Box({-2.0}, {2.0});
        c.initial_depth = c.max_depth = 12;
        c.oracle.enabled = true;
        c.classify_edges = true;
    } else if (name == "quintic-ode") {
        // x' = x (x-1)^2 (x-2)^2
        c.system.kind = SystemKind::polynomial_flow;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.poly_coeffs = {0.0, 4.0, -12.0, 13.0, -6.0, 1.0};
        c.system.integrator.dt = 0.01;
        c.system.escape_radius = 100.0;
        c.region.box = Box({-0.5}, {2.5});
        c.initial_depth = c.max_depth = 13;
        c.oracle.enabled = true;
        c.classify_edges = true;
        c.classify_budget = {10000, 1000};
    } else if (name == "lorenz") {
        c.system.kind = SystemKind::lorenz_flow;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.r = 28.0;
        c.system.integrator.dt = 0.005;
        c.system.escape_radius = 200.0;
        c.region.kind = RegionSpec::Kind::ball;
        c.region.center = {0.0, 0.0, 27.0};
        c.region.radius = 80.0;
        c.region.box = Box({-80.0, -80.0, -53.0}, {80.0, 80.0, 107.0});
        c.initial_depth = 8;
        c.refinement_rounds = 2;
        c.max_depth = 10;
    } else if (name == "lorenz-poincare") {
        c.system.kind = SystemKind::lorenz_flow;
        c.system.mode = StepMode::poincare_return;
        c.system.r = 17.5;
        c.system.section = {2, 16.5, -1, 400.0};
        c.system.integrator.dt = 0.005;
        c.system.escape_radius = 200.0;
        // window on the section plane; tuned so the interesting set stays inside
        c.region.box = Box({-19.0, -26.0}, {19.0, 26.0});
        c.initial_depth = c.max_depth = 14;
    } else if (name == "pendulum") {
        c.system.kind = SystemKind::pendulum_poincare;
        c.system.mode = StepMode::poincare_return;
        c.system.gamma = 0.2;
        c.system.rho = 2.0;
        c.system.integrator.dt = 0.005;
        c.system.escape_radius = 20.0;
        c.region.box = Box({-pi, -16.0}, {pi, 16.0});
        c.region.periodic = {true, false};
        c.initial_depth = c.max_depth = 12;
    } else if (name == "circle-rotation") {
        c.system.kind = SystemKind::circle_rotation_flow;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.integrator.dt = 0.005;
        c.region.box = Box({-pi}, {pi});
        c.region.periodic = {true};
        c.initial_depth = c.max_depth = 8;
    } else if (name == "sin-pi-over-x") {
        c.system.kind = SystemKind::sin_pi_over_x_flow;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.integrator.dt = 0.002;
        c.system.escape_radius = 10.0;
        c.region.box = Box({0.0}, {1.0});
        c.initial_depth = c.max_depth = 10;
    } else if (name == "chafee") {
        // 2-mode projection of the Galerkin system
        c.system.kind = SystemKind::chafee_infante_galerkin;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.lambda = 0.5;
        c.system.modes = 4;
        c.system.grid_modes = 2;
        c.system.integrator.dt = 0.01;
        c.system.escape_radius = 50.0;
        c.region.box = Box({-2.0, -1.5}, {2.0, 1.5});
        c.initial_depth = c.max_depth = 6;
    } else if (name == "chafee-constant") {
        // constant-mode restriction (exactly invariant)
        c.system.kind = SystemKind::chafee_infante_galerkin;
        c.system.mode = StepMode::time_t_map;
        c.system.time_step = 1.0;
        c.system.lambda = 0.5;
        c.system.modes = 8;
        c.system.grid_modes = 1;
        c.system.integrator.dt = 0.01;
        c.system.escape_radius = 50.0;
        c.region.box = Box({-2.0}, {2.0});
        c.initial_depth = c.max_depth = 12;
    } else {
        throw ConfigError("/preset", "unknown preset '" + name + "'");
    }
    if (c.region.periodic.empty()) c.region.periodic.assign(c.region.box.dim(), false);
    c.validate();
    return c;
}

std::vector<std::string> preset_names() {
    return {"identity",        "logistic",  "cubic-ode",       "quintic-ode",
            "lorenz",          "lorenz-poincare", "pendulum",  "circle-rotation",
            "sin-pi-over-x",   "chafee",    "chafee-constant"};
}

}  // namespace chaingraph
