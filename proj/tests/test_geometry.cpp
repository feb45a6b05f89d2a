#include <doctest.h>

#include <random>

#include "cspq/geometry.hpp"
#include "oracles.hpp"

using namespace cspq;
using namespace cspq::oracles;

namespace {

// 2^13-wide world: the grid quantum is 1/128, so integer coordinates are
// exactly representable
const SnapGrid kGrid = SnapGrid::for_world(8192.0);
const SnapGrid kWorldGrid = SnapGrid::for_world(10000.0);

RegionSet rect(double x0, double y0, double x1, double y1) {
    return rect_region(x0, y0, x1, y1, kGrid);
}

double rel_diff(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0 ? 0 : std::abs(a - b) / m;
}

}  // namespace

TEST_CASE("ring area: unit square") {
    CHECK(rect(0, 0, 1, 1).area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ring area: diamond query shape has a third of its box") {
    const double L = 500;
    std::vector<Point> pts = {{L / 2, 0},     {2 * L / 3, L / 3}, {L, L / 2},
                              {2 * L / 3, 2 * L / 3}, {L / 2, L}, {L / 3, 2 * L / 3},
                              {0, L / 2},     {L / 3, L / 3}};
    Ring dm = Ring::from_points(pts, kWorldGrid);
    CHECK(rel_diff(dm.area(), L * L / 3.0) < 1e-3);
}

TEST_CASE("ring area: random 20-gon with holes matches the shoelace oracle") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 20; ++it) {
        Ring outer = Ring::from_points(star_polygon(rng, {500, 500}, 200, 400, 20), kGrid);
        std::vector<Ring> holes;
        for (int h = 0; h < 3; ++h) {
            const Point c{380.0 + 120 * h, 500.0};
            holes.push_back(Ring::from_points(star_polygon(rng, c, 10, 25, 9), kGrid));
        }
        PolygonWithHoles poly(outer, holes);
        double expect = shoelace(outer.points());
        for (const auto& h : poly.holes) expect -= shoelace(h.points());
        CHECK(rel_diff(poly.area(), expect) < 1e-9);
    }
}

TEST_CASE("degenerate ring is rejected") {
    std::vector<Point> collinear = {{0, 0}, {10, 10}, {20, 20}, {30, 30}};
    CHECK_THROWS_AS((void)Ring::from_points(collinear, kGrid), geometry_error);
    std::vector<Point> two = {{0, 0}, {10, 10}};
    CHECK_THROWS_AS((void)Ring::from_points(two, kGrid), geometry_error);
}

TEST_CASE("mbr: square and circle") {
    RegionSet sq = rect(0, 0, 2, 2);
    const Mbr m = sq.mbr();
    CHECK(m.min.x == doctest::Approx(0.0));
    CHECK(m.max.y == doctest::Approx(2.0));

    Ring c = circle_polygon({5, 5}, 1, 64, kGrid);
    const Mbr cm = c.mbr();
    CHECK(cm.min.x >= 4.0 - 1e-9);
    CHECK(cm.max.x <= 6.0 + 1e-9);
    CHECK(cm.max.x - cm.min.x == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("span: rectangle, square, rotated sliver") {
    std::vector<Point> r = {{0, 0}, {40, 0}, {40, 10}, {0, 10}};
    CHECK(Ring::from_points(r, kGrid).span() == doctest::Approx(40));

    std::vector<Point> s = {{3, 3}, {10, 3}, {10, 10}, {3, 10}};
    CHECK(Ring::from_points(s, kGrid).span() == doctest::Approx(7));

    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
        std::vector<Point> pts = star_polygon(rng, {1000, 1000}, 5, 300, 12);
        Ring ring = Ring::from_points(pts, kGrid);
        const auto back = ring.points();
        double lx = back[0].x, hx = lx, ly = back[0].y, hy = ly;
        for (const auto& p : back) {
            lx = std::min(lx, p.x); hx = std::max(hx, p.x);
            ly = std::min(ly, p.y); hy = std::max(hy, p.y);
        }
        CHECK(ring.span() == doctest::Approx(std::max(hx - lx, hy - ly)));
    }
}

TEST_CASE("intersect: idempotence and disjointness") {
    std::mt19937_64 rng(3);
    RegionSet a{PolygonWithHoles(Ring::from_points(star_polygon(rng, {300, 300}, 80, 150, 14), kGrid))};
    CHECK(rel_diff(intersect(a, a).area(), a.area()) < 1e-9);
    CHECK(intersect(rect(0, 0, 10, 10), rect(20, 20, 30, 30)).empty());
}

TEST_CASE("intersect: overlapping L-shapes match the Monte Carlo oracle") {
    std::vector<Point> l1 = {{0, 0}, {60, 0}, {60, 20}, {20, 20}, {20, 80}, {0, 80}};
    std::vector<Point> l2 = {{10, 10}, {70, 10}, {70, 90}, {50, 90}, {50, 30}, {10, 30}};
    RegionSet a{PolygonWithHoles(Ring::from_points(l1, kGrid))};
    RegionSet b{PolygonWithHoles(Ring::from_points(l2, kGrid))};
    RegionSet i = intersect(a, b);
    validate_topology(i);
    CHECK(rel_diff(i.area(), mc_area(i, 1000000, 42)) < 0.005);
}

TEST_CASE("difference: identity, holes, subdivision") {
    RegionSet a = rect(0, 0, 10, 10);
    CHECK(rel_diff(difference(a, RegionSet{}).area(), a.area()) < 1e-12);

    RegionSet holed = difference(a, rect(3, 3, 6, 6));
    REQUIRE(holed.size() == 1);
    REQUIRE(holed.parts[0].holes.size() == 1);
    CHECK(holed.area() == doctest::Approx(100.0 - 9.0).epsilon(1e-12));
    validate_topology(holed);

    RegionSet disk{PolygonWithHoles(circle_polygon({100, 100}, 50, 64, kGrid))};
    RegionSet bar = rect(95, 0, 105, 200);
    RegionSet split = difference(disk, bar);
    REQUIRE(split.size() == 2);
    validate_topology(split);
    CHECK(rel_diff(split.area(), mc_area(split, 1000000, 43)) < 0.005);
}

TEST_CASE("contains_point: squares, holes and the crossing-number oracle") {
    RegionSet sq = rect(0, 0, 10, 10);
    CHECK(contains_point(sq, {5, 5}));
    CHECK(contains_point(sq, {0, 5}));  // boundary counts as inside

    RegionSet holed = difference(sq, rect(3, 3, 6, 6));
    CHECK(!contains_point(holed, {4.5, 4.5}));
    CHECK(contains_point(holed, {1, 1}));
    CHECK(contains_point(holed, {3, 3}));  // hole rim still belongs to the part

    std::mt19937_64 rng(19);
    RegionSet tricky = difference(
        RegionSet{PolygonWithHoles(Ring::from_points(star_polygon(rng, {200, 200}, 100, 180, 17), kGrid))},
        RegionSet{PolygonWithHoles(Ring::from_points(star_polygon(rng, {200, 200}, 10, 50, 9), kGrid))});
    std::uniform_real_distribution<double> u(0.0, 400.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng), y = u(rng);
        CHECK(contains_point(tricky, {x, y}) == crossing_number_inside(tricky, x, y));
    }
}

TEST_CASE("circle_polygon: inscribed square, 64-gon accuracy, no clipping") {
    Ring sq4 = circle_polygon({1024, 1024}, 64, 4, kGrid);
    CHECK(sq4.area() == doctest::Approx(2.0 * 64 * 64).epsilon(1e-12));

    const double tau = 50;
    Ring c = circle_polygon({5000, 5000}, tau, 64, kWorldGrid);
    CHECK(rel_diff(c.area(), M_PI * tau * tau) < 0.002);
    CHECK(rel_diff(c.area(), 64 * tau * tau * std::sin(2 * M_PI / 64) / 2) < 1e-3);

    Ring edge = circle_polygon({0, 5000}, tau, 64, kWorldGrid);
    CHECK(edge.mbr().min.x < 0);  // exits the world box; clipping is not this op's job
}

TEST_CASE("boolean invariants: additivity and duality on fuzzed inputs") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> upos(200.0, 800.0);
    for (int it = 0; it < 120; ++it) {
        RegionSet a{PolygonWithHoles(
            Ring::from_points(star_polygon(rng, {upos(rng), upos(rng)}, 60, 160, 12), kGrid))};
        RegionSet b{PolygonWithHoles(
            Ring::from_points(star_polygon(rng, {upos(rng), upos(rng)}, 60, 160, 10), kGrid))};

        RegionSet i = intersect(a, b);
        RegionSet d = difference(a, b);
        validate_topology(i);
        validate_topology(d);
        CHECK(rel_diff(i.area() + d.area(), a.area()) < 1e-9);

        // duality: (a - r) ∩ R == (a ∩ R) - r
        RegionSet r = rect(upos(rng), upos(rng), upos(rng) + 120, upos(rng) + 40);
        RegionSet lhs = intersect(difference(a, r), b);
        RegionSet rhs = difference(intersect(a, b), r);
        const double la = lhs.area(), ra = rhs.area();
        if (std::max(la, ra) > 0) CHECK(rel_diff(la, ra) < 1e-9);
        else CHECK(la == ra);
    }
}

TEST_CASE("polygon-with-holes area identity cross-checked by Monte Carlo") {
    std::mt19937_64 rng(29);
    RegionSet base{PolygonWithHoles(Ring::from_points(star_polygon(rng, {300, 300}, 150, 250, 16), kGrid))};
    RegionSet holes = rect(250, 250, 350, 350);
    RegionSet holed = difference(base, holes);
    validate_topology(holed);
    double by_rings = 0;
    for (const auto& part : holed.parts) {
        by_rings += part.outer.area();
        for (const auto& h : part.holes) by_rings -= h.area();
    }
    CHECK(rel_diff(holed.area(), by_rings) < 1e-12);
    CHECK(rel_diff(holed.area(), mc_area(holed, 400000, 77)) < 0.005);
}

TEST_CASE("interiors_overlap: touching boundaries do not count") {
    CHECK(!interiors_overlap(rect(0, 0, 10, 10), rect(10, 0, 20, 10)));
    CHECK(interiors_overlap(rect(0, 0, 10, 10), rect(9, 9, 20, 20)));
    // region inside the other's hole
    RegionSet holed = difference(rect(0, 0, 100, 100), rect(40, 40, 60, 60));
    CHECK(!interiors_overlap(holed, rect(45, 45, 55, 55)));
}

TEST_CASE("snap grid: ingestion snaps to the quantum") {
    const SnapGrid g = SnapGrid::for_world(10000.0);
    CHECK(g.quantum == doctest::Approx(10000.0 / 1048576.0));
    RegionSet unit = rect_region(0, 0, 1, 1, g);
    // 1.0 is not on the 10000-world grid; area moves by at most ~2 quanta per side
    CHECK(rel_diff(unit.area(), 1.0) < 4 * g.quantum);
}
