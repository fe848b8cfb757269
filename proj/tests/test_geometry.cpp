#include <doctest.h>

#include <cmath>

#include "chaingraph/geometry.hpp"
#include "chaingraph/util.hpp"

using namespace chaingraph;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("box_of basic lookup and outside detection") {
    Grid g(Box({0.0}, {1.0}), {1});
    CHECK(g.box_count() == 2);
    CHECK(g.box_of(std::vector<double>{0.25}).value() == 0);
    CHECK(g.box_of(std::vector<double>{0.75}).value() == 1);
    CHECK(!g.box_of(std::vector<double>{1.5}).has_value());
    CHECK(!g.box_of(std::vector<double>{-0.1}).has_value());
    // boundary points belong to the lower cell
    CHECK(g.box_of(std::vector<double>{0.5}).value() == 0);
    CHECK(g.box_of(std::vector<double>{0.0}).value() == 0);
    CHECK(g.box_of(std::vector<double>{1.0}).value() == 1);
    CHECK_THROWS_AS((void)g.box_of(std::vector<double>{0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("box_of wraps periodic dimensions") {
    Grid g(Box({-pi}, {pi}), {2}, {true});
    auto a = g.box_of(std::vector<double>{pi + 0.1});
    auto b = g.box_of(std::vector<double>{-pi + 0.1});
    REQUIRE(a.has_value());
    CHECK(a.value() == b.value());

    SplitMix rng(42);
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(-pi, pi);
        CHECK(g.box_of(std::vector<double>{t}).value() == g.box_of(std::vector<double>{t + 2 * pi}).value());
    }
}

TEST_CASE("cell_bounds tiles the grid exactly") {
    Grid g2(Box({0.0, 0.0}, {1.0, 1.0}), {1, 1});
    Box c0 = g2.cell_bounds(0);
    CHECK(c0.lo[0] == 0.0);
    CHECK(c0.lo[1] == 0.0);
    CHECK(c0.hi[0] == 0.5);
    CHECK(c0.hi[1] == 0.5);

    Grid g0(Box({0.0}, {1.0}), {0});
    Box whole = g0.cell_bounds(0);
    CHECK(whole.lo[0] == 0.0);
    CHECK(whole.hi[0] == 1.0);

    // enumerate 4 cells of [-2,2] at depth 2 by hand: idx 3 = [1,2]
    Grid g4(Box({-2.0}, {2.0}), {2});
    Box c3 = g4.cell_bounds(3);
    CHECK(c3.lo[0] == doctest::Approx(1.0));
    CHECK(c3.hi[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(g4.cell_bounds(17), std::invalid_argument);
}

TEST_CASE("tiling: random points are inside their own cell") {
    Grid g(Box({-1.0, 0.0, 2.0}, {3.0, 5.0, 2.5}), {3, 2, 4});
    SplitMix rng(7);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> p = {rng.uniform(-1, 3), rng.uniform(0, 5), rng.uniform(2, 2.5)};
        auto idx = g.box_of(p);
        REQUIRE(idx.has_value());
        CHECK(g.cell_bounds(*idx).contains(p));
    }
}

TEST_CASE("subdivide increments depth and children tile the parent") {
    Grid g(Box({0.0, 0.0}, {1.0, 1.0}), {1, 1});
    Grid f = subdivide(g, {0});
    CHECK(f.depth()[0] == 2);
    CHECK(f.depth()[1] == 1);
    CHECK(f.box_count() == 8);

    Grid interval(Box({0.0}, {1.0}), {0});
    Grid i3 = subdivide(subdivide(subdivide(interval, {0}), {0}), {0});
    CHECK(i3.box_count() == 8);

    Grid half(Box({0.0}, {1.0}), {1});
    Grid quarter = subdivide(half, {0});
    auto kids = child_boxes(half, quarter, 0);
    REQUIRE(kids.size() == 2);
    CHECK(quarter.cell_bounds(kids[0]).lo[0] == doctest::Approx(0.0));
    CHECK(quarter.cell_bounds(kids[0]).hi[0] == doctest::Approx(0.25));
    CHECK(quarter.cell_bounds(kids[1]).lo[0] == doctest::Approx(0.25));
    CHECK(quarter.cell_bounds(kids[1]).hi[0] == doctest::Approx(0.5));

    CHECK_THROWS_AS(subdivide(g, {}), std::invalid_argument);
}

TEST_CASE("children lie inside their parent and parent_box inverts child_boxes") {
    Grid parent(Box({-1.0, -2.0}, {2.0, 2.0}), {2, 3}, {false, true});
    Grid child = subdivide(parent, {0, 1});
    SplitMix rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        box_index p = rng.next_below(parent.box_count());
        Box pb = parent.cell_bounds(p);
        auto kids = child_boxes(parent, child, p);
        CHECK(kids.size() == 4);
        for (box_index k : kids) {
            CHECK(parent_box(parent, child, k) == p);
            Box kb = child.cell_bounds(k);
            for (int d = 0; d < parent.dim(); ++d) {
                CHECK(kb.lo[d] >= pb.lo[d] - 1e-15);
                CHECK(kb.hi[d] <= pb.hi[d] + 1e-15);
            }
        }
    }
}

TEST_CASE("set_distance: touching cells have distance zero") {
    Grid g(Box({0.0}, {1.0}), {2});
    CHECK(set_distance({1}, {1}, g) == 0.0);
    CHECK(set_distance({0}, {1}, g) == 0.0);  // shared face
    // [0,0.25] vs [0.75,1]
    CHECK(set_distance({0}, {3}, g) == doctest::Approx(0.5));
    CHECK(set_distance({0, 1}, {3}, g) == doctest::Approx(0.25));
    CHECK_THROWS_AS(set_distance({}, {1}, g), std::invalid_argument);
}

TEST_CASE("set_distance is symmetric and respects periodic wrap") {
    Grid g(Box({0.0}, {1.0}), {3}, {true});
    // cells 0 and 7 touch through the seam
    CHECK(set_distance({0}, {7}, g) == 0.0);
    Grid gn(Box({0.0}, {1.0}), {3}, {false});
    CHECK(set_distance({0}, {7}, gn) == doctest::Approx(0.75));

    SplitMix rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<box_index> a = {rng.next_below(8)}, b = {rng.next_below(8)};
        CHECK(set_distance(a, b, g) == doctest::Approx(set_distance(b, a, g)));
    }
}

TEST_CASE("face_components splits disconnected unions") {
    Grid g(Box({0.0}, {1.0}), {3});
    auto comp = face_components({0, 1, 2, 5, 6}, g);
    CHECK(comp[0] == comp[1]);
    CHECK(comp[1] == comp[2]);
    CHECK(comp[3] == comp[4]);
    CHECK(comp[0] != comp[3]);

    // periodic wrap joins the ends
    Grid gp(Box({0.0}, {1.0}), {3}, {true});
    auto comp_p = face_components({0, 7}, gp);
    CHECK(comp_p[0] == comp_p[1]);
}
