#include "chaingraph/report.hpp"

#include <algorithm>
#include <sstream>

namespace chaingraph {

namespace {

const char* annotation_name(NodeAnnotation a) {
    switch (a) {
        case NodeAnnotation::top: return "top";
        case NodeAnnotation::bottom: return "bottom";
        case NodeAnnotation::saddle: return "saddle";
        case NodeAnnotation::isolated: return "isolated";
    }
    return "?";
}

const char* strength_name(EdgeStrength s) {
    switch (s) {
        case EdgeStrength::strong: return "strong";
        case EdgeStrength::weak_candidate: return "weak_candidate";
        case EdgeStrength::unclassified: return "unclassified";
    }
    return "?";
}

}  // namespace

ordered_json build_report(const PipelineResult& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = to_json(r.config);

    j["grid"] = {{"bounds", {{"lo", r.grid.bounds().lo}, {"hi", r.grid.bounds().hi}}},
                 {"depth", r.grid.depth()},
                 {"periodic", r.grid.periodic()}};

    j["trapping"] = {{"forward_invariant", r.trapping.forward_invariant},
                     {"margin", r.trapping.margin},
                     {"escaped_count", r.trapping.escaped_count},
                     {"outside_successors", r.trapping.outside_successors},
                     {"region_boxes", r.trapping.region.size()},
                     {"region_connected", r.region_connected},
                     {"verified_at_depth", r.trapping_depth}};

    ordered_json rounds = ordered_json::array();
    for (const RoundStats& rs : r.rounds)
        rounds.push_back({{"depth", rs.depth},
                          {"active_boxes", rs.active_boxes},
                          {"escaped", rs.escaped},
                          {"nodes", rs.nodes}});
    j["rounds"] = rounds;

    double attractor_diameter = 0;
    if (!r.attractor.boxes.empty()) attractor_diameter = bounding_box(r.attractor.boxes, r.grid).diameter();
    j["attractor"] = {{"certified", r.attractor_certified},
                      {"box_count", r.attractor.boxes.size()},
                      {"diameter", attractor_diameter},
                      {"connected", !r.attractor.boxes.empty() &&
                                        connectedness_of_attractor(r.attractor.boxes, r.grid)},
                      {"iterations", r.attractor.iterations},
                      {"converged", r.attractor.converged},
                      {"depth", r.attractor.depth}};

    ordered_json nodes = ordered_json::array();
    for (const Node& n : r.graph.nodes) {
        Box bb = bounding_box(n.boxes, r.grid);
        ordered_json jn;
        jn["id"] = n.id;
        jn["box_count"] = n.boxes.size();
        jn["annotation"] = annotation_name(n.annotation);
        jn["diameter"] = n.diameter;
        jn["bbox"] = {{"lo", bb.lo}, {"hi", bb.hi}};
        jn["representative_points"] = n.representative_points;
        ordered_json dist;
        for (const Node& m : r.graph.nodes)
            if (m.id != n.id)
                dist[std::to_string(m.id)] = set_distance(n.boxes, m.boxes, r.grid);
        jn["min_distance_to"] = dist;
        nodes.push_back(jn);
    }
    ordered_json edges = ordered_json::array();
    for (const Edge& e : r.graph.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"strength", strength_name(e.strength)}});
    ordered_json reduced = ordered_json::array();
    for (auto& [a, b] : r.graph.reduced_edges) reduced.push_back({a, b});

    j["graph"] = {{"nodes", nodes},
                  {"edges", edges},
                  {"reduced_edges", reduced},
                  {"connected", r.graph.connectedness.connected}};
    if (!r.graph.connectedness.connected) {
        j["graph"]["disconnected_witness"] = {{"component_a", r.graph.connectedness.component_a},
                                              {"component_b", r.graph.connectedness.component_b},
                                              {"min_gap", r.graph.connectedness.min_gap}};
    }

    ordered_json checks;
    checks["theorem1_connected"] = r.graph.connectedness.connected;
    checks["prop2_containment"] = r.prop2_containment;
    if (r.prop4.ran) {
        checks["prop4"] = {{"time_t_1", r.prop4.time_t_1},
                           {"time_t_2", r.prop4.time_t_2},
                           {"nodes_match", r.prop4.comparison.nodes_match},
                           {"edges_match", r.prop4.comparison.edges_match},
                           {"max_boxset_gap", r.prop4.comparison.max_boxset_gap},
                           {"equal", r.prop4.comparison.equal}};
    } else {
        checks["prop4"] = nullptr;
    }
    j["theorem_checks"] = checks;

    if (r.validation.ran) {
        j["validation"] = {{"oracle_pairs", r.validation.pairs},
                           {"agreements", r.validation.agreements},
                           {"agreement_rate", r.validation.agreement_rate}};
    } else {
        j["validation"] = nullptr;
    }
    j["halted_after_attractor"] = r.halted_after_attractor;
    j["timings"] = {{"total_ms", r.total_ms}};
    return j;
}

std::string export_report(const PipelineResult& r) { return build_report(r).dump(2) + "\n"; }

RunConfig config_from_report(const ordered_json& report) {
    return config_from_json(report.at("config"));
}

std::string export_dot(const ChainGraph& graph, bool reduced) {
    std::ostringstream os;
    os << "digraph chain_graph {\n";
    if (!graph.connectedness.connected)
        os << "  // warning: chain graph is disconnected at this resolution\n";
    os << "  rankdir=TB;\n";
    for (const Node& n : graph.nodes) {
        const char* shape = "circle";
        switch (n.annotation) {
            case NodeAnnotation::top: shape = "circle"; break;
            case NodeAnnotation::bottom: shape = "square"; break;
            case NodeAnnotation::saddle: shape = "diamond"; break;
            case NodeAnnotation::isolated: shape = "doublecircle"; break;
        }
        os << "  n" << n.id << " [shape=" << shape << ", label=\"N" << n.id << "\"];\n";
    }
    auto style_of = [&](int from, int to) {
        for (const Edge& e : graph.edges)
            if (e.from == from && e.to == to)
                return e.strength == EdgeStrength::weak_candidate ? "dashed" : "solid";
        return "solid";
    };
    if (reduced) {
        for (auto& [a, b] : graph.reduced_edges)
            os << "  n" << a << " -> n" << b << " [style=" << style_of(a, b) << "];\n";
    } else {
        for (const Edge& e : graph.edges)
            os << "  n" << e.from << " -> n" << e.to
               << " [style=" << (e.strength == EdgeStrength::weak_candidate ? "dashed" : "solid")
               << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_boxlist(const std::vector<box_index>& boxes, const Grid& grid) {
    std::ostringstream os;
    os.precision(17);
    for (box_index b : boxes) {
        Box cell = grid.cell_bounds(b);
        for (int d = 0; d < grid.dim(); ++d) {
            if (d) os << ' ';
            os << cell.lo[d] << ' ' << cell.hi[d];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace chaingraph
