#include <doctest.h>

#include "cspq/wkt.hpp"
#include "oracles.hpp"

using namespace cspq;

namespace {
const SnapGrid kGrid = SnapGrid::for_world(8192.0);
}

TEST_CASE("wkt round trip for ring, polygon and region") {
    std::vector<Point> pts = {{0, 0}, {64, 0}, {64, 64}, {0, 64}};
    Ring r = Ring::from_points(pts, kGrid);
    Ring back = parse_wkt_ring(to_wkt(r), kGrid);
    CHECK(back.exact() == r.exact());

    RegionSet holed = difference(oracles::rect_region(0, 0, 100, 100, kGrid),
                                 oracles::rect_region(30, 30, 60, 60, kGrid));
    RegionSet parsed = parse_wkt_region(to_wkt(holed), kGrid);
    CHECK(parsed.size() == holed.size());
    CHECK(parsed.area() == doctest::Approx(holed.area()).epsilon(1e-12));

    CHECK(parse_wkt_region("MULTIPOLYGON EMPTY", kGrid).empty());
}

TEST_CASE("wkt parse errors carry an offset") {
    CHECK_THROWS_AS((void)parse_wkt_ring("RING (1 2, 3)", kGrid), parse_error);
    CHECK_THROWS_AS((void)parse_wkt_ring("OVAL (1 2, 3 4, 5 6)", kGrid), parse_error);
    CHECK_THROWS_AS((void)parse_wkt_ring("RING (1 2, 3 4, 5 6) junk", kGrid), parse_error);
}
