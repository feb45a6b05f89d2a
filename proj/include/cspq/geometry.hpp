#ifndef CSPQ_GEOMETRY_HPP
#define CSPQ_GEOMETRY_HPP

/// @file geometry.hpp
/// @brief Exact 2D kernel for simple polygons, polygons with holes and
/// multipolygon region sets: boolean operations, areas, MBRs, spans,
/// containment.
///
/// Coordinates are snapped to a configurable grid when raw (double) input
/// is ingested, and are exact from then on: every vertex is a homogeneous
/// integer triple (x, y, w), so intersection points of snapped segments are
/// represented without rounding.  Boolean results of boolean results stay
/// exact, which is what makes identities such as
///   area((A - B) ∩ C) == area((A ∩ C) - B)
/// hold to double precision instead of to the snapping quantum.
///
/// Conventions:
///  - outer rings are counter-clockwise, holes are clockwise; the region
///    interior is always to the left of a directed boundary edge,
///  - a point on the boundary counts as inside,
///  - boolean results are regularized: measure-zero slivers, shared-edge
///    contacts and point contacts are not part of the output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cspq {

using BigInt = boost::multiprecision::cpp_int;

class geometry_error : public std::runtime_error {
public:
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

/// Plain world-space point, in world units.
struct Point {
    double x = 0;
    double y = 0;
};

/// Axis-aligned bounding rectangle.
struct Mbr {
    Point min;
    Point max;

    [[nodiscard]] double width() const noexcept { return max.x - min.x; }
    [[nodiscard]] double height() const noexcept { return max.y - min.y; }
    [[nodiscard]] bool intersects(const Mbr& o) const noexcept {
        return !(min.x > o.max.x || o.min.x > max.x || min.y > o.max.y || o.min.y > max.y);
    }
    [[nodiscard]] bool contains(const Point& p) const noexcept {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    [[nodiscard]] bool contains(const Mbr& o) const noexcept {
        return min.x <= o.min.x && min.y <= o.min.y && max.x >= o.max.x && max.y >= o.max.y;
    }
    [[nodiscard]] Mbr expanded(double m) const noexcept {
        return {{min.x - m, min.y - m}, {max.x + m, max.y + m}};
    }
    [[nodiscard]] Mbr merged(const Mbr& o) const noexcept {
        return {{std::min(min.x, o.min.x), std::min(min.y, o.min.y)},
                {std::max(max.x, o.max.x), std::max(max.y, o.max.y)}};
    }
    [[nodiscard]] double area() const noexcept { return width() * height(); }
};

/// Exact homogeneous point: value is (x/w, y/w) in world units, w > 0,
/// gcd(x, y, w) == 1.  xd/yd are cached double approximations used as a
/// filter before exact arithmetic.
struct ExactPoint {
    BigInt x, y, w;
    double xd = 0, yd = 0;

    ExactPoint() : x(0), y(0), w(1) {}
    ExactPoint(BigInt px, BigInt py, BigInt pw);

    [[nodiscard]] bool operator==(const ExactPoint& o) const {
        return x == o.x && y == o.y && w == o.w;
    }
    [[nodiscard]] Point approx() const noexcept { return {xd, yd}; }
};

/// Exact rational with on-demand canonicalization; used for areas and
/// probability ratios so that equal quantities compare (and convert to
/// double) identically no matter which expression produced them.
class BigRational {
public:
    BigRational() : num_(0), den_(1) {}
    BigRational(BigInt n, BigInt d);
    explicit BigRational(long long n) : num_(n), den_(1) {}
    static BigRational from_double(double v);

    BigRational& operator+=(const BigRational& o);
    BigRational& operator-=(const BigRational& o);
    friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
    friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
    friend BigRational operator*(const BigRational& a, const BigRational& b);
    friend BigRational operator/(const BigRational& a, const BigRational& b);

    [[nodiscard]] int sign() const noexcept { return num_.sign(); }
    [[nodiscard]] bool operator==(const BigRational& o) const;
    [[nodiscard]] std::strong_ordering operator<=>(const BigRational& o) const;

    /// Scale-safe conversion (handles numerator/denominator beyond double range).
    [[nodiscard]] double to_double() const;
    void canonicalize();

    [[nodiscard]] const BigInt& num() const noexcept { return num_; }
    [[nodiscard]] const BigInt& den() const noexcept { return den_; }

private:
    BigInt num_, den_;  // den_ > 0; reduced only after canonicalize()
};

/// Snap grid for ingesting raw coordinates.  The default quantum is
/// world_width / 2^20.
struct SnapGrid {
    double quantum;

    static SnapGrid for_world(double world_width, int grid_bits = 20);
    [[nodiscard]] ExactPoint snap(const Point& p) const;
};

/// Simple closed polygon boundary.  At least 3 vertices, implicitly closed,
/// non-self-intersecting, nonzero area.  Orientation is normalized on
/// construction.
class Ring {
public:
    Ring() = default;

    /// Ingest raw points: snap to grid, drop consecutive duplicates,
    /// normalize orientation to CCW.  Throws geometry_error if fewer than
    /// 3 distinct vertices remain or the area is zero.
    static Ring from_points(std::span<const Point> pts, const SnapGrid& grid);

    /// Internal construction from exact vertices (no snapping).
    /// orient_ccw: normalize to CCW when true, keep given order otherwise.
    static Ring from_exact(std::vector<ExactPoint> pts, bool orient_ccw);

    [[nodiscard]] const std::vector<ExactPoint>& exact() const noexcept { return pts_; }
    [[nodiscard]] std::vector<Point> points() const;
    [[nodiscard]] std::size_t size() const noexcept { return pts_.size(); }
    [[nodiscard]] bool empty() const noexcept { return pts_.empty(); }

    [[nodiscard]] const Mbr& mbr() const noexcept { return mbr_; }
    /// Larger MBR side.
    [[nodiscard]] double span() const noexcept { return std::max(mbr_.width(), mbr_.height()); }

    /// Unsigned area, world units squared.
    [[nodiscard]] double area() const { return area_exact().to_double(); }
    /// Exact signed area (positive for CCW).
    [[nodiscard]] const BigRational& signed_area_exact() const;
    [[nodiscard]] BigRational area_exact() const;

    [[nodiscard]] bool is_ccw() const { return signed_area_exact().sign() > 0; }
    [[nodiscard]] Ring reversed() const;

    /// O(n^2) simplicity check (test/validation use).
    [[nodiscard]] bool is_simple() const;

private:
    std::vector<ExactPoint> pts_;
    Mbr mbr_{};
    mutable std::optional<BigRational> area_cache_;
    void finish();
};

/// Closed region bounded by one outer ring (CCW) and zero or more
/// disjoint holes (CW) strictly inside it.
struct PolygonWithHoles {
    Ring outer;
    std::vector<Ring> holes;

    PolygonWithHoles() = default;
    explicit PolygonWithHoles(Ring o) : outer(std::move(o)) {}
    PolygonWithHoles(Ring o, std::vector<Ring> h);

    /// area(outer) - sum of hole areas.
    [[nodiscard]] double area() const { return area_exact().to_double(); }
    [[nodiscard]] BigRational area_exact() const;
    [[nodiscard]] const Mbr& mbr() const noexcept { return outer.mbr(); }
};

/// Disjoint union of polygons with holes; the parts are the subdivisions
/// of the region.
struct RegionSet {
    std::vector<PolygonWithHoles> parts;

    RegionSet() = default;
    explicit RegionSet(PolygonWithHoles part) { parts.push_back(std::move(part)); }
    explicit RegionSet(Ring outer) { parts.emplace_back(std::move(outer)); }

    [[nodiscard]] bool empty() const noexcept { return parts.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return parts.size(); }
    [[nodiscard]] double area() const { return area_exact().to_double(); }
    [[nodiscard]] BigRational area_exact() const;
    [[nodiscard]] Mbr mbr() const;
};

/// Regularized boolean intersection of two region sets.
[[nodiscard]] RegionSet intersect(const RegionSet& a, const RegionSet& b);
/// Regularized boolean difference a - b.
[[nodiscard]] RegionSet difference(const RegionSet& a, const RegionSet& b);

/// True when the regularized intersection is nonempty (the interiors meet);
/// boundary-only contact does not count.
[[nodiscard]] bool interiors_overlap(const RegionSet& a, const RegionSet& b);

/// Boundary-inclusive point containment (exact).
[[nodiscard]] bool contains_point(const RegionSet& g, const Point& p);
[[nodiscard]] bool contains_point(const PolygonWithHoles& g, const Point& p);
[[nodiscard]] bool contains_point_exact(const PolygonWithHoles& g, const ExactPoint& p);

/// Regular n-gon inscribed in the circle (first vertex at angle 0).
/// Vertices are snapped by `grid`; no clipping to any world box.
[[nodiscard]] Ring circle_polygon(Point center, double radius, int n, const SnapGrid& grid);

/// Validate RegionSet structure: rings simple and oriented, holes inside
/// their outer and pairwise disjoint, parts pairwise interior-disjoint.
/// Throws geometry_error describing the first violation.
void validate_topology(const RegionSet& g);

}  // namespace cspq

#endif  // CSPQ_GEOMETRY_HPP
