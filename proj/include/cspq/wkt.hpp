#ifndef CSPQ_WKT_HPP
#define CSPQ_WKT_HPP

/// WKT-like text serialization for rings, polygons with holes and region
/// sets.  Grammar:
///   RING (x y, x y, ...)
///   POLYGON ((outer), (hole), ...)
///   MULTIPOLYGON (((outer), (hole)), ((outer)))  |  MULTIPOLYGON EMPTY
/// Parsing snaps coordinates with the supplied grid (ingestion boundary).

#include <string>
#include <string_view>

#include "cspq/geometry.hpp"

namespace cspq {

class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

std::string to_wkt(const Ring& r);
std::string to_wkt(const PolygonWithHoles& p);
std::string to_wkt(const RegionSet& g);

Ring parse_wkt_ring(std::string_view text, const SnapGrid& grid);
PolygonWithHoles parse_wkt_polygon(std::string_view text, const SnapGrid& grid);
RegionSet parse_wkt_region(std::string_view text, const SnapGrid& grid);

}  // namespace cspq

#endif  // CSPQ_WKT_HPP
