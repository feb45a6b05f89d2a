#include <doctest.h>

#include <algorithm>
#include <random>

#include "cspq/index.hpp"
#include "oracles.hpp"

using namespace cspq;
using namespace cspq::oracles;

namespace {

std::vector<MovingObject> random_objects(std::size_t n, std::uint64_t seed, double world = 10000) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> upos(0.0, world);
    std::uniform_real_distribution<double> utau(20.0, 50.0);
    std::vector<MovingObject> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        MovingObject o;
        o.id = static_cast<ObjectId>(i + 1);
        o.l_r = {upos(rng), upos(rng)};
        o.tau = utau(rng);
        out.push_back(o);
    }
    return out;
}

std::vector<ObjectId> sorted_search(const RTree& tree, const Mbr& window, AccessCounters& c) {
    std::vector<ObjectId> got;
    tree.search(window, c, got);
    std::sort(got.begin(), got.end());
    return got;
}

}  // namespace

TEST_CASE("empty tree answers nothing") {
    RTree tree;
    AccessCounters c;
    std::vector<ObjectId> got;
    tree.search({{0, 0}, {10000, 10000}}, c, got);
    CHECK(got.empty());
    CHECK(tree.size() == 0);
}

TEST_CASE("single object indexed by its 2tau square") {
    std::vector<MovingObject> objs(1);
    objs[0].id = 7;
    objs[0].l_r = {100, 100};
    objs[0].tau = 30;
    RTree tree = build_object_index(objs);
    AccessCounters c;
    CHECK(sorted_search(tree, {{120, 120}, {140, 140}}, c) == std::vector<ObjectId>{7});
    CHECK(sorted_search(tree, {{131, 131}, {150, 150}}, c).empty());
    CHECK(c.node_reads > 0);
}

TEST_CASE("window queries match the linear scan on 5000 objects") {
    auto objs = random_objects(5000, 101);
    RTree tree = build_object_index(objs);
    tree.validate();
    CHECK(tree.size() == objs.size());

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> upos(0.0, 9500.0);
    std::uniform_real_distribution<double> usz(10.0, 900.0);
    AccessCounters c;
    for (int q = 0; q < 100; ++q) {
        const double x = upos(rng), y = upos(rng), w = usz(rng), h = usz(rng);
        const Mbr window{{x, y}, {x + w, y + h}};
        auto expect = scan_objects(objs, window);
        std::sort(expect.begin(), expect.end());
        CHECK(sorted_search(tree, window, c) == expect);
    }
}

TEST_CASE("area index window queries match the linear scan") {
    const SnapGrid g = SnapGrid::for_world(10000.0);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> upos(0.0, 9900.0);
    std::vector<RestrictedArea> areas;
    for (int i = 0; i < 2000; ++i) {
        const double x = upos(rng), y = upos(rng);
        Point pts[4] = {{x, y}, {x + 40, y}, {x + 40, y + 10}, {x, y + 10}};
        areas.emplace_back(static_cast<ObjectId>(i + 1), Ring::from_points(pts, g));
    }
    RTree tree = build_area_index(areas);
    tree.validate();

    AccessCounters c;
    for (int q = 0; q < 100; ++q) {
        const double x = upos(rng), y = upos(rng);
        const Mbr window{{x, y}, {x + 300, y + 200}};
        auto expect = scan_areas(areas, window);
        std::sort(expect.begin(), expect.end());
        CHECK(sorted_search(tree, window, c) == expect);
    }
    // disjoint world quadrant
    CHECK(sorted_search(tree, {{20000, 20000}, {30000, 30000}}, c).empty());
}

TEST_CASE("counters only grow within a query run") {
    auto objs = random_objects(1000, 77);
    RTree tree = build_object_index(objs);
    AccessCounters c;
    std::vector<ObjectId> got;
    tree.search({{0, 0}, {500, 500}}, c, got);
    const auto after_first = c.node_reads;
    CHECK(after_first > 0);
    tree.search({{400, 400}, {900, 900}}, c, got);
    CHECK(c.node_reads > after_first);
}

TEST_CASE("update moves an entry to its new square") {
    auto objs = random_objects(500, 13);
    RTree tree = build_object_index(objs);

    MovingObject& o = objs[42];
    const Point new_pos{o.l_r.x + 5, o.l_r.y + 5};  // same leaf region
    update_object(tree, o, new_pos);
    o.l_r = new_pos;
    AccessCounters c;
    CHECK(std::ranges::count(sorted_search(tree, o.square(), c), o.id) == 1);

    const Point far{9000, 9000};
    const Mbr old_square = o.square();
    update_object(tree, o, far);
    o.l_r = far;
    auto at_new = sorted_search(tree, {{8990, 8990}, {9010, 9010}}, c);
    CHECK(std::ranges::count(at_new, o.id) == 1);
    auto at_old = sorted_search(tree, old_square, c);
    for (ObjectId id : at_old)
        if (id == o.id) {
            // the new square may still straddle the old window only if it intersects
            CHECK(o.square().intersects(old_square));
        }
    tree.validate();
}

TEST_CASE("unknown id cannot be erased") {
    auto objs = random_objects(10, 3);
    RTree tree = build_object_index(objs);
    CHECK_THROWS_AS(tree.erase({{0, 0}, {1, 1}}, 9999), not_found_error);
}

TEST_CASE("random updates keep the tree equivalent to the scan oracle") {
    auto objs = random_objects(800, 29);
    RTree tree = build_object_index(objs);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> upos(0.0, 10000.0);
    std::uniform_int_distribution<std::size_t> pick(0, objs.size() - 1);

    for (int u = 0; u < 100; ++u) {
        MovingObject& o = objs[pick(rng)];
        const Point np{upos(rng), upos(rng)};
        update_object(tree, o, np);
        o.l_r = np;
    }
    tree.validate();
    CHECK(tree.size() == objs.size());

    AccessCounters c;
    for (int q = 0; q < 50; ++q) {
        const double x = upos(rng) * 0.9, y = upos(rng) * 0.9;
        const Mbr window{{x, y}, {x + 600, y + 400}};
        auto expect = scan_objects(objs, window);
        std::sort(expect.begin(), expect.end());
        CHECK(sorted_search(tree, window, c) == expect);
    }
}
