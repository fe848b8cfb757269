#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chaingraph/attractor.hpp"

using namespace chaingraph;

namespace {

SystemSpec logistic_spec(double a) {
    SystemSpec s;
    s.kind = SystemKind::logistic_map;
    s.a = a;
    return s;
}

SystemSpec cubic_spec(double T = 1.0) {
    SystemSpec s;
    s.kind = SystemKind::polynomial_flow;
    s.mode = StepMode::time_t_map;
    s.time_step = T;
    s.poly_coeffs = {0.0, 1.0, 0.0, -1.0};
    s.integrator.dt = 0.01;
    s.escape_radius = 100.0;
    return s;
}

std::vector<box_index> all_boxes(const Grid& g) {
    std::vector<box_index> out(g.box_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

}  // namespace

TEST_CASE("trapping verified on the logistic interval Q_a") {
    auto q = logistic_trapping_interval(3.3);
    SystemEvaluator sys(logistic_spec(3.3));
    Grid g(q.interval, {10});
    BoxMap m = build_box_map(sys, g, SamplingConfig{});
    auto v = verify_trapping(m, all_boxes(g));
    CHECK(v.forward_invariant);
    CHECK(v.escaped_count == 0);
}

TEST_CASE("trapping fails on an interval without its attractor") {
    SystemEvaluator sys(cubic_spec());
    Grid g(Box({0.5}, {0.6}), {6});
    BoxMap m = build_box_map(sys, g, SamplingConfig{});
    auto v = verify_trapping(m, all_boxes(g));
    CHECK(!v.forward_invariant);  // everything flows out toward x = 1
    CHECK(v.margin == 0.0);
    CHECK_THROWS_AS(global_attractor_outer(m, v), std::invalid_argument);
}

TEST_CASE("trapping of the whole interval for the cubic flow, with margin") {
    SystemEvaluator sys(cubic_spec());
    Grid g(Box({-2.0}, {2.0}), {10});
    BoxMap m = build_box_map(sys, g, SamplingConfig{});
    auto v = verify_trapping(m, all_boxes(g));
    CHECK(v.forward_invariant);
    CHECK(v.escaped_count == 0);
    CHECK(v.margin > 0.0);
}

TEST_CASE("attractor of the cubic flow is the interval [-1, 1]") {
    SystemEvaluator sys(cubic_spec());
    Grid g(Box({-2.0}, {2.0}), {12});
    BoxMap m = build_box_map(sys, g, SamplingConfig{});
    auto v = verify_trapping(m, all_boxes(g));
    REQUIRE(v.forward_invariant);
    auto at = global_attractor_outer(m, v);
    CHECK(at.converged);
    REQUIRE(!at.boxes.empty());
    Box bb = bounding_box(at.boxes, g);
    double w = g.cell_width(0);
    CHECK(bb.lo[0] >= -1.0 - 2 * w);
    CHECK(bb.hi[0] <= 1.0 + 2 * w);
    CHECK(bb.lo[0] <= -1.0 + w);
    CHECK(bb.hi[0] >= 1.0 - w);
    CHECK(connectedness_of_attractor(at.boxes, g));

    // maximality: every node's boxes lie inside the attractor approximation
    ChainGraph cg = assemble_chain_graph(m);
    for (const Node& n : cg.nodes)
        for (box_index b : n.boxes) CHECK(std::binary_search(at.boxes.begin(), at.boxes.end(), b));
}

TEST_CASE("logistic a=4: the whole interval survives pruning") {
    SystemEvaluator sys(logistic_spec(4.0));
    Grid g(Box({0.0}, {1.0}), {10});
    BoxMap m = build_box_map(sys, g, SamplingConfig{});
    auto v = verify_trapping(m, all_boxes(g));
    REQUIRE(v.forward_invariant);
    auto at = global_attractor_outer(m, v);
    CHECK(at.boxes.size() == g.box_count());
    CHECK(at.iterations <= 3);
}

TEST_CASE("pruning is monotone and refinement nests the attractor") {
    SystemEvaluator sys(cubic_spec());
    Grid coarse(Box({-2.0}, {2.0}), {9});
    BoxMap cm = build_box_map(sys, coarse, SamplingConfig{});
    auto ca = global_attractor_outer(cm, all_boxes(coarse));
    Grid fine = subdivide(coarse, {0});
    BoxMap fm = build_box_map(sys, fine, SamplingConfig{});
    auto fa = global_attractor_outer(fm, all_boxes(fine));
    // depth-(d+1) attractor boxes are children of depth-d attractor boxes
    for (box_index b : fa.boxes)
        CHECK(std::binary_search(ca.boxes.begin(), ca.boxes.end(), parent_box(coarse, fine, b)));
}

TEST_CASE("face-connectedness of box unions") {
    Grid g(Box({-2.0}, {2.0}), {4});
    CHECK(connectedness_of_attractor({3, 4, 5, 6}, g));
    CHECK(!connectedness_of_attractor({3, 4, 9, 10}, g));
}

TEST_CASE("time-T graphs agree for T=1 vs T=0.5 on the cubic flow") {
    Grid g(Box({-2.0}, {2.0}), {11});
    SystemEvaluator s1(cubic_spec(1.0));
    SystemEvaluator s2(cubic_spec(0.5));
    ChainGraph g1 = assemble_chain_graph(build_box_map(s1, g, SamplingConfig{}));
    ChainGraph g2 = assemble_chain_graph(build_box_map(s2, g, SamplingConfig{}));
    REQUIRE(g1.nodes.size() == 3);
    REQUIRE(g2.nodes.size() == 3);
    auto cmp = compare_chain_graphs(g1, g2, g);
    CHECK(cmp.nodes_match);
    CHECK(cmp.edges_match);
    CHECK(cmp.max_boxset_gap <= g.cell_width(0) + 1e-12);
    CHECK(cmp.equal);
}

TEST_CASE("circle rotation: time-1 and time-0.37 maps both give one node") {
    SystemSpec rot;
    rot.kind = SystemKind::circle_rotation_flow;
    rot.mode = StepMode::time_t_map;
    rot.integrator.dt = 0.005;
    const double pi = 3.14159265358979323846;
    Grid g(Box({-pi}, {pi}), {7}, {true});
    rot.time_step = 1.0;  // identity map: every point is fixed
    ChainGraph g1 = assemble_chain_graph(build_box_map(SystemEvaluator(rot), g, SamplingConfig{}));
    rot.time_step = 0.37;
    ChainGraph g2 = assemble_chain_graph(build_box_map(SystemEvaluator(rot), g, SamplingConfig{}));
    REQUIRE(g1.nodes.size() == 1);
    REQUIRE(g2.nodes.size() == 1);
    CHECK(g1.nodes[0].boxes.size() == g.box_count());
    CHECK(g2.nodes[0].boxes.size() == g.box_count());
    CHECK(compare_chain_graphs(g1, g2, g).equal);
}

TEST_CASE("graph comparison flags a genuine mismatch") {
    SystemEvaluator cub(cubic_spec());
    SystemEvaluator log4(logistic_spec(4.0));
    Grid gc(Box({-2.0}, {2.0}), {10});
    Grid gl(Box({0.0}, {1.0}), {10});
    ChainGraph g1 = assemble_chain_graph(build_box_map(cub, gc, SamplingConfig{}));
    ChainGraph g2 = assemble_chain_graph(build_box_map(log4, gl, SamplingConfig{}));
    auto cmp = compare_chain_graphs(g1, g2, gc);
    CHECK(!cmp.nodes_match);
    CHECK(!cmp.equal);
}
