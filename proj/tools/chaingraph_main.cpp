// Command-line front end: run chain-graph analyses from JSON configs or
// built-in presets, export DOT/box-list artifacts, re-run oracle validation.
//
// Exit codes: 0 success, 2 config error, 3 trapping failed, 4 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "chaingraph/oracle.hpp"
#include "chaingraph/report.hpp"

using namespace chaingraph;

namespace {

int write_outputs(const PipelineResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);
    const std::string base = res.config.name;
    for (const std::string& kind : res.config.outputs) {
        fs::path p;
        std::string payload;
        if (kind == "json") {
            p = dir / (base + ".report.json");
            payload = export_report(res);
        } else if (kind == "dot") {
            p = dir / (base + ".dot");
            payload = export_dot(res.graph, true);
        } else if (kind == "boxlist") {
            p = dir / (base + ".boxes.txt");
            payload = export_boxlist(res.attractor.boxes, res.grid);
        }
        std::ofstream f(p);
        if (!f) {
            std::cerr << "cannot write " << p << "\n";
            return 4;
        }
        f << payload;
        std::cout << "wrote " << p.string() << "\n";
    }
    return 0;
}

void print_summary(const PipelineResult& res) {
    std::cout << res.config.name << ": " << res.graph.nodes.size() << " nodes, "
              << res.graph.edges.size() << " edges ("
              << res.graph.reduced_edges.size() << " reduced), "
              << (res.graph.connectedness.connected ? "connected" : "DISCONNECTED") << ", trapping "
              << (res.trapping.forward_invariant ? "verified" : "FAILED") << ", attractor "
              << res.attractor.boxes.size() << " boxes"
              << (res.attractor_certified ? "" : " (uncertified)") << ", "
              << static_cast<long>(res.total_ms) << " ms\n";
}

int run_and_emit(const RunConfig& config, const std::string& out_dir) {
    PipelineResult res = run_pipeline(config);
    print_summary(res);
    int rc = write_outputs(res, out_dir);
    if (rc != 0) return rc;
    return res.trapping.forward_invariant ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chain graphs of dynamical systems via set-oriented box analysis"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "run an analysis from a JSON config");
    std::string config_path, out_dir;
    analyze->add_option("--config", config_path, "config file")->required();
    analyze->add_option("--out", out_dir, "output directory");

    auto* preset = app.add_subcommand("preset", "run a built-in preset");
    std::string preset_name;
    preset->add_option("name", preset_name, "preset name")->required();
    double opt_a = -1, opt_r = -1, opt_lambda = -1, opt_compare_t = -1;
    int opt_depth = -1, opt_rounds = -1, opt_max_depth = -1, opt_modes = -1;
    std::uint64_t opt_seed = 0;
    std::string opt_map, preset_out;
    bool opt_classify = false, opt_oracle = false;
    preset->add_option("--a", opt_a, "logistic parameter a");
    preset->add_option("--r", opt_r, "lorenz parameter r");
    preset->add_option("--lambda", opt_lambda, "chafee-infante lambda");
    preset->add_option("--modes", opt_modes, "chafee-infante Fourier modes");
    preset->add_option("--depth", opt_depth, "per-dimension subdivision depth");
    preset->add_option("--rounds", opt_rounds, "extra refinement rounds");
    preset->add_option("--max-depth", opt_max_depth, "depth cap");
    preset->add_option("--seed", opt_seed, "rng seed");
    preset->add_option("--map", opt_map, "step mode override: time-1 | poincare");
    preset->add_option("--compare-time-t", opt_compare_t, "second T for the time-T graph comparison");
    preset->add_flag("--classify", opt_classify, "classify edge strengths");
    preset->add_flag("--oracle", opt_oracle, "run oracle cross-validation");
    preset->add_option("--out", preset_out, "output directory");

    auto* exp = app.add_subcommand("export", "re-export artifacts from a report");
    std::string report_path, export_out;
    bool want_dot = false, reduced = false;
    exp->add_option("--report", report_path, "report JSON")->required();
    exp->add_flag("--dot", want_dot, "export the chain graph as DOT");
    exp->add_flag("--reduced", reduced, "draw only the covering relation");
    exp->add_option("--out", export_out, "output directory");

    auto* validate = app.add_subcommand("validate", "re-run oracle checks for a report's config");
    std::string validate_path;
    validate->add_option("--report", validate_path, "report JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            return run_and_emit(parse_config_file(config_path), out_dir);
        }
        if (*preset) {
            RunConfig c = make_preset(preset_name);
            if (opt_a > 0) c.system.a = opt_a;
            if (opt_r > 0) c.system.r = opt_r;
            if (opt_lambda > 0) c.system.lambda = opt_lambda;
            if (opt_modes > 0) c.system.modes = opt_modes;
            if (opt_depth >= 0) {
                c.initial_depth = opt_depth;
                c.max_depth = std::max(opt_depth + std::max(opt_rounds, 0), opt_depth);
            }
            if (opt_rounds >= 0) {
                c.refinement_rounds = opt_rounds;
                c.max_depth = std::max(c.max_depth, c.initial_depth + opt_rounds);
            }
            if (opt_max_depth > 0) c.max_depth = opt_max_depth;
            if (opt_seed) c.seed = opt_seed;
            if (!opt_map.empty()) {
                if (opt_map == "time-1") {
                    c.system.mode = StepMode::time_t_map;
                    c.system.time_step = 1.0;
                } else if (opt_map == "poincare") {
                    c.system.mode = StepMode::poincare_return;
                } else {
                    std::cerr << "unknown --map value '" << opt_map << "'\n";
                    return 2;
                }
            }
            if (opt_compare_t > 0) c.compare_time_t = opt_compare_t;
            if (opt_classify) c.classify_edges = true;
            if (opt_oracle) c.oracle.enabled = true;
            c.sampling.seed = c.seed;
            if (c.region.kind == RegionSpec::Kind::ball && c.system.kind == SystemKind::lorenz_flow) {
                // keep the ball centered on the attractor when r changes
                c.region.center = {0.0, 0.0, c.system.r - 1.0};
                c.region.box = Box({-c.region.radius, -c.region.radius, c.system.r - 1.0 - c.region.radius},
                                   {c.region.radius, c.region.radius, c.system.r - 1.0 + c.region.radius});
            }
            c.validate();
            return run_and_emit(c, preset_out);
        }
        if (*exp) {
            std::ifstream in(report_path);
            if (!in) {
                std::cerr << "cannot open report " << report_path << "\n";
                return 2;
            }
            ordered_json rep;
            in >> rep;
            RunConfig c = config_from_report(rep);
            // rebuild the graph from the config to export
            PipelineResult res = run_pipeline(c);
            if (want_dot) {
                namespace fs = std::filesystem;
                fs::path dir = export_out.empty() ? fs::path(".") : fs::path(export_out);
                fs::create_directories(dir);
                fs::path p = dir / (c.name + ".dot");
                std::ofstream f(p);
                f << export_dot(res.graph, reduced);
                std::cout << "wrote " << p.string() << "\n";
            }
            return 0;
        }
        if (*validate) {
            std::ifstream in(validate_path);
            if (!in) {
                std::cerr << "cannot open report " << validate_path << "\n";
                return 2;
            }
            ordered_json rep;
            in >> rep;
            RunConfig c = config_from_report(rep);
            c.oracle.enabled = true;
            c.classify_edges = true;
            PipelineResult res = run_pipeline(c);
            // the validate command runs the checks even when trapping failed
            if (res.halted_after_attractor) {
                SystemEvaluator sys(c.system);
                if (!res.attractor.boxes.empty()) {
                    for (Edge& e : res.graph.edges) {
                        auto r = classify_edge(res.map, res.attractor.boxes, res.graph.nodes[e.from],
                                               res.graph.nodes[e.to], res.graph.nodes, sys,
                                               c.classify_budget, mix64(c.seed ^ 0x9177));
                        e.strength = r.label;
                    }
                }
            }
            std::cout << "oracle agreement: "
                      << (res.validation.ran ? std::to_string(res.validation.agreement_rate)
                                             : std::string("not run"))
                      << "\n";
            for (const Edge& e : res.graph.edges)
                std::cout << "edge " << e.from << " -> " << e.to << ": "
                          << (e.strength == EdgeStrength::strong          ? "strong"
                              : e.strength == EdgeStrength::weak_candidate ? "weak-candidate"
                                                                            : "unclassified")
                          << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
