#include "cspq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <numbers>
#include <tuple>
#include <utility>

namespace cspq {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::gcd;
using boost::multiprecision::msb;

// Scale-safe conversion of n/d (d > 0) to double.
double ratio_to_double(const BigInt& n, const BigInt& d) {
    if (n.is_zero()) return 0.0;
    const std::size_t bn = msb(abs(n));
    const std::size_t bd = msb(d);
    const std::size_t top = std::max(bn, bd);
    if (top < 960) return n.convert_to<double>() / d.convert_to<double>();
    const std::size_t shift = top - 700;
    BigInt nn = n >> shift, dd = d >> shift;
    if (dd.is_zero()) return n.sign() > 0 ? HUGE_VAL : -HUGE_VAL;
    return nn.convert_to<double>() / dd.convert_to<double>();
}

}  // namespace

// ---------------------------------------------------------------------------
// ExactPoint / BigRational
// ---------------------------------------------------------------------------

ExactPoint::ExactPoint(BigInt px, BigInt py, BigInt pw)
    : x(std::move(px)), y(std::move(py)), w(std::move(pw)) {
    if (w.is_zero()) throw geometry_error("homogeneous point with zero weight");
    if (w.sign() < 0) { x = -x; y = -y; w = -w; }
    BigInt g = gcd(gcd(abs(x), abs(y)), w);
    if (g > 1) { x /= g; y /= g; w /= g; }
    xd = ratio_to_double(x, w);
    yd = ratio_to_double(y, w);
}

BigRational::BigRational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw geometry_error("rational with zero denominator");
    if (den_.sign() < 0) { num_ = -num_; den_ = -den_; }
}

BigRational BigRational::from_double(double v) {
    if (!std::isfinite(v)) throw geometry_error("non-finite value");
    int e = 0;
    double f = std::frexp(v, &e);
    auto m = static_cast<long long>(std::ldexp(f, 53));
    e -= 53;
    BigInt num(m), den(1);
    if (e >= 0) num <<= e; else den <<= -e;
    return {std::move(num), std::move(den)};
}

BigRational& BigRational::operator+=(const BigRational& o) {
    // partial reduction keeps the denominator at the lcm of the inputs
    BigInt g = gcd(den_, o.den_);
    BigInt od = o.den_ / g;
    num_ = num_ * od + o.num_ * (den_ / g);
    den_ *= od;
    return *this;
}

BigRational& BigRational::operator-=(const BigRational& o) {
    BigInt g = gcd(den_, o.den_);
    BigInt od = o.den_ / g;
    num_ = num_ * od - o.num_ * (den_ / g);
    den_ *= od;
    return *this;
}

BigRational operator*(const BigRational& a, const BigRational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

BigRational operator/(const BigRational& a, const BigRational& b) {
    if (b.num_.is_zero()) throw geometry_error("rational division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
}

bool BigRational::operator==(const BigRational& o) const {
    return num_ * o.den_ == o.num_ * den_;
}

std::strong_ordering BigRational::operator<=>(const BigRational& o) const {
    BigInt l = num_ * o.den_, r = o.num_ * den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

double BigRational::to_double() const { return ratio_to_double(num_, den_); }

void BigRational::canonicalize() {
    if (num_.is_zero()) { den_ = 1; return; }
    BigInt g = gcd(abs(num_), den_);
    if (g > 1) { num_ /= g; den_ /= g; }
}

// ---------------------------------------------------------------------------
// SnapGrid
// ---------------------------------------------------------------------------

SnapGrid SnapGrid::for_world(double world_width, int grid_bits) {
    if (!(world_width > 0) || grid_bits < 1 || grid_bits > 40)
        throw geometry_error("invalid snap grid parameters");
    return SnapGrid{world_width / std::ldexp(1.0, grid_bits)};
}

ExactPoint SnapGrid::snap(const Point& p) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw geometry_error("non-finite coordinate");
    const auto nx = static_cast<long long>(std::llround(p.x / quantum));
    const auto ny = static_cast<long long>(std::llround(p.y / quantum));
    int e = 0;
    double f = std::frexp(quantum, &e);
    auto m = static_cast<long long>(std::ldexp(f, 53));
    e -= 53;
    BigInt qx = BigInt(nx) * m, qy = BigInt(ny) * m, w(1);
    if (e >= 0) { qx <<= e; qy <<= e; } else { w <<= -e; }
    return {std::move(qx), std::move(qy), std::move(w)};
}

// ---------------------------------------------------------------------------
// Exact predicates with double filters
// ---------------------------------------------------------------------------

namespace {

// Filter threshold: coordinate shadows carry at most ~half-ulp absolute error,
// so anything beyond 1e-11 * magnitude^2 is decidable in double.
inline double orient_err_bound(double mag) { return 1e-11 * mag * mag + 1e-24; }

int orient_exact(const ExactPoint& a, const ExactPoint& b, const ExactPoint& c) {
    BigInt u1 = b.x * a.w - a.x * b.w;
    BigInt u2 = b.y * a.w - a.y * b.w;
    BigInt v1 = c.x * a.w - a.x * c.w;
    BigInt v2 = c.y * a.w - a.y * c.w;
    BigInt det = u1 * v2 - u2 * v1;
    return det.sign();
}

// Sign of the cross product (b-a) x (c-a): >0 means c left of a->b.
int orient_pt(const ExactPoint& a, const ExactPoint& b, const ExactPoint& c) {
    const double ux = b.xd - a.xd, uy = b.yd - a.yd;
    const double vx = c.xd - a.xd, vy = c.yd - a.yd;
    const double det = ux * vy - uy * vx;
    const double mag = std::max({std::abs(a.xd), std::abs(a.yd), std::abs(b.xd),
                                 std::abs(b.yd), std::abs(c.xd), std::abs(c.yd), 1.0});
    const double err = orient_err_bound(mag);
    if (det > err) return 1;
    if (det < -err) return -1;
    return orient_exact(a, b, c);
}

// Sign of a.x/a.w - b.x/b.w.
int cmp_x(const ExactPoint& a, const ExactPoint& b) {
    const double d = a.xd - b.xd;
    const double err = 1e-11 * std::max({std::abs(a.xd), std::abs(b.xd), 1.0});
    if (d > err) return 1;
    if (d < -err) return -1;
    BigInt t = a.x * b.w - b.x * a.w;
    return t.sign();
}

int cmp_y(const ExactPoint& a, const ExactPoint& b) {
    const double d = a.yd - b.yd;
    const double err = 1e-11 * std::max({std::abs(a.yd), std::abs(b.yd), 1.0});
    if (d > err) return 1;
    if (d < -err) return -1;
    BigInt t = a.y * b.w - b.y * a.w;
    return t.sign();
}

bool point_less(const ExactPoint& a, const ExactPoint& b) {
    int c = cmp_x(a, b);
    if (c != 0) return c < 0;
    return cmp_y(a, b) < 0;
}

struct PointLess {
    bool operator()(const ExactPoint& a, const ExactPoint& b) const { return point_less(a, b); }
};

ExactPoint midpoint(const ExactPoint& p, const ExactPoint& q) {
    return {p.x * q.w + q.x * p.w, p.y * q.w + q.y * p.w, 2 * p.w * q.w};
}

// Intersection of the lines through (a,b) and (c,d); requires non-parallel.
ExactPoint line_intersection(const ExactPoint& a, const ExactPoint& b,
                             const ExactPoint& c, const ExactPoint& d) {
    BigInt l1a = a.y * b.w - a.w * b.y;
    BigInt l1b = a.w * b.x - a.x * b.w;
    BigInt l1c = a.x * b.y - a.y * b.x;
    BigInt l2a = c.y * d.w - c.w * d.y;
    BigInt l2b = c.w * d.x - c.x * d.w;
    BigInt l2c = c.x * d.y - c.y * d.x;
    BigInt px = l1b * l2c - l1c * l2b;
    BigInt py = l1c * l2a - l1a * l2c;
    BigInt pw = l1a * l2b - l1b * l2a;
    if (pw.is_zero()) throw geometry_error("line intersection of parallel lines");
    return {std::move(px), std::move(py), std::move(pw)};
}

// Order of p vs q along the direction a->b; valid for points collinear
// with (a, b).
int cmp_along(const ExactPoint& a, const ExactPoint& b, const ExactPoint& p,
              const ExactPoint& q) {
    const int cx = cmp_x(b, a);
    if (cx != 0) {
        const int c = cmp_x(p, q);
        return cx > 0 ? c : -c;
    }
    const int cy = cmp_y(b, a);
    const int c = cmp_y(p, q);
    return cy > 0 ? c : -c;
}

// p strictly between a and b (all collinear).
bool strictly_inside_segment(const ExactPoint& a, const ExactPoint& b, const ExactPoint& p) {
    return cmp_along(a, b, a, p) < 0 && cmp_along(a, b, p, b) < 0;
}

bool on_segment(const ExactPoint& a, const ExactPoint& b, const ExactPoint& p) {
    if (orient_pt(a, b, p) != 0) return false;
    return cmp_along(a, b, a, p) <= 0 && cmp_along(a, b, p, b) <= 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ring
// ---------------------------------------------------------------------------

void Ring::finish() {
    if (pts_.empty()) { mbr_ = {}; return; }
    double lx = pts_[0].xd, ly = pts_[0].yd, hx = lx, hy = ly;
    for (const auto& p : pts_) {
        lx = std::min(lx, p.xd); ly = std::min(ly, p.yd);
        hx = std::max(hx, p.xd); hy = std::max(hy, p.yd);
    }
    mbr_ = {{lx, ly}, {hx, hy}};
    area_cache_.reset();
}

Ring Ring::from_points(std::span<const Point> pts, const SnapGrid& grid) {
    std::vector<ExactPoint> snapped;
    snapped.reserve(pts.size());
    for (const auto& p : pts) {
        ExactPoint e = grid.snap(p);
        if (!snapped.empty() && snapped.back() == e) continue;
        snapped.push_back(std::move(e));
    }
    while (snapped.size() > 1 && snapped.front() == snapped.back()) snapped.pop_back();
    if (snapped.size() < 3) throw geometry_error("ring needs at least 3 distinct vertices");
    return from_exact(std::move(snapped), true);
}

Ring Ring::from_exact(std::vector<ExactPoint> pts, bool orient_ccw) {
    Ring r;
    r.pts_ = std::move(pts);
    if (r.pts_.size() < 3) throw geometry_error("ring needs at least 3 vertices");
    r.finish();
    if (r.signed_area_exact().sign() == 0) throw geometry_error("zero-area ring");
    if (orient_ccw && !r.is_ccw()) {
        std::reverse(r.pts_.begin(), r.pts_.end());
        r.area_cache_.reset();
    }
    return r;
}

std::vector<Point> Ring::points() const {
    std::vector<Point> out;
    out.reserve(pts_.size());
    for (const auto& p : pts_) out.push_back(p.approx());
    return out;
}

const BigRational& Ring::signed_area_exact() const {
    if (!area_cache_) {
        BigRational acc;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            const ExactPoint& p = pts_[i];
            const ExactPoint& q = pts_[(i + 1) % pts_.size()];
            acc += BigRational(p.x * q.y - p.y * q.x, 2 * p.w * q.w);
        }
        acc.canonicalize();
        area_cache_ = std::move(acc);
    }
    return *area_cache_;
}

BigRational Ring::area_exact() const {
    BigRational a = signed_area_exact();
    if (a.sign() < 0) a = BigRational(0) - a;
    return a;
}

Ring Ring::reversed() const {
    std::vector<ExactPoint> pts(pts_.rbegin(), pts_.rend());
    return from_exact(std::move(pts), false);
}

bool Ring::is_simple() const {
    const std::size_t n = pts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const ExactPoint& a = pts_[i];
        const ExactPoint& b = pts_[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const ExactPoint& c = pts_[j];
            const ExactPoint& d = pts_[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            int o1 = orient_pt(a, b, c), o2 = orient_pt(a, b, d);
            int o3 = orient_pt(c, d, a), o4 = orient_pt(c, d, b);
            if (adjacent) {
                // only the shared endpoint may coincide
                if (o1 == 0 && o2 == 0) {
                    // collinear neighbours: reject overlap beyond the joint
                    if (strictly_inside_segment(a, b, c) || strictly_inside_segment(a, b, d) ||
                        strictly_inside_segment(c, d, a) || strictly_inside_segment(c, d, b))
                        return false;
                }
                continue;
            }
            if (o1 * o2 < 0 && o3 * o4 < 0) return false;
            if (o1 == 0 && on_segment(a, b, c)) return false;
            if (o2 == 0 && on_segment(a, b, d)) return false;
            if (o3 == 0 && on_segment(c, d, a)) return false;
            if (o4 == 0 && on_segment(c, d, b)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// PolygonWithHoles / RegionSet
// ---------------------------------------------------------------------------

PolygonWithHoles::PolygonWithHoles(Ring o, std::vector<Ring> h)
    : outer(std::move(o)), holes(std::move(h)) {
    for (auto& hole : holes)
        if (hole.is_ccw()) hole = hole.reversed();
}

BigRational PolygonWithHoles::area_exact() const {
    BigRational a = outer.area_exact();
    for (const auto& h : holes) a -= h.area_exact();
    return a;
}

BigRational RegionSet::area_exact() const {
    BigRational a;
    for (const auto& p : parts) a += p.area_exact();
    a.canonicalize();
    return a;
}

Mbr RegionSet::mbr() const {
    if (parts.empty()) return {};
    Mbr m = parts[0].mbr();
    for (std::size_t i = 1; i < parts.size(); ++i) m = m.merged(parts[i].mbr());
    return m;
}

// ---------------------------------------------------------------------------
// Point containment
// ---------------------------------------------------------------------------

namespace {

// Crossing parity of an upward ray from m against one ring.
// Precondition: m is not on the ring boundary.
int ring_crossings(const std::vector<ExactPoint>& ring, const ExactPoint& m) {
    int cnt = 0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const ExactPoint& a = ring[i];
        const ExactPoint& b = ring[(i + 1) % n];
        // cheap rejects on shadows (conservative margin)
        if (std::max(a.xd, b.xd) < m.xd - 1e-6 || std::min(a.xd, b.xd) > m.xd + 1e-6) continue;
        if (std::max(a.yd, b.yd) < m.yd - 1e-6) continue;  // entirely below
        const bool a_le = cmp_x(a, m) <= 0;
        const bool b_le = cmp_x(b, m) <= 0;
        if (a_le == b_le) continue;
        if (std::min(a.yd, b.yd) > m.yd + 1e-6) { ++cnt; continue; }  // entirely above
        const int o = orient_pt(a, b, m);
        if (a_le && !b_le && o < 0) ++cnt;          // rightward edge, m below it
        else if (!a_le && b_le && o > 0) ++cnt;     // leftward edge, m below it
    }
    return cnt;
}

bool on_ring_boundary(const std::vector<ExactPoint>& ring, const ExactPoint& m) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const ExactPoint& a = ring[i];
        const ExactPoint& b = ring[(i + 1) % n];
        if (m.xd < std::min(a.xd, b.xd) - 1e-6 || m.xd > std::max(a.xd, b.xd) + 1e-6 ||
            m.yd < std::min(a.yd, b.yd) - 1e-6 || m.yd > std::max(a.yd, b.yd) + 1e-6)
            continue;
        if (on_segment(a, b, m)) return true;
    }
    return false;
}

bool ring_contains_incl(const Ring& ring, const ExactPoint& m) {
    if (on_ring_boundary(ring.exact(), m)) return true;
    return (ring_crossings(ring.exact(), m) & 1) != 0;
}

}  // namespace

bool contains_point_exact(const PolygonWithHoles& g, const ExactPoint& p) {
    const Mbr& box = g.mbr();
    if (p.xd < box.min.x - 1e-6 || p.xd > box.max.x + 1e-6 ||
        p.yd < box.min.y - 1e-6 || p.yd > box.max.y + 1e-6)
        return false;
    if (!ring_contains_incl(g.outer, p)) return false;
    for (const auto& h : g.holes) {
        if (on_ring_boundary(h.exact(), p)) return true;  // hole rim belongs to the part
        if ((ring_crossings(h.exact(), p) & 1) != 0) return false;
    }
    return true;
}

bool contains_point(const PolygonWithHoles& g, const Point& p) {
    BigRational rx = BigRational::from_double(p.x);
    BigRational ry = BigRational::from_double(p.y);
    BigInt w = rx.den() * ry.den();
    ExactPoint e(rx.num() * ry.den(), ry.num() * rx.den(), std::move(w));
    return contains_point_exact(g, e);
}

bool contains_point(const RegionSet& g, const Point& p) {
    for (const auto& part : g.parts)
        if (contains_point(part, p)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Boolean operations
// ---------------------------------------------------------------------------

namespace {

struct InputEdge {
    ExactPoint a, b;
    std::vector<ExactPoint> splits;
};

std::vector<InputEdge> gather_edges(const RegionSet& g) {
    std::vector<InputEdge> edges;
    for (const auto& part : g.parts) {
        auto add_ring = [&edges](const Ring& r) {
            const auto& pts = r.exact();
            for (std::size_t i = 0; i < pts.size(); ++i)
                edges.push_back({pts[i], pts[(i + 1) % pts.size()], {}});
        };
        add_ring(part.outer);
        for (const auto& h : part.holes) add_ring(h);
    }
    return edges;
}

// Parity of m against a full edge soup (the union of closed rings).
// Precondition: m not on any edge.
bool parity_inside(const std::vector<InputEdge>& edges, const ExactPoint& m) {
    int cnt = 0;
    for (const auto& e : edges) {
        const ExactPoint& a = e.a;
        const ExactPoint& b = e.b;
        if (std::max(a.xd, b.xd) < m.xd - 1e-6 || std::min(a.xd, b.xd) > m.xd + 1e-6) continue;
        if (std::max(a.yd, b.yd) < m.yd - 1e-6) continue;
        const bool a_le = cmp_x(a, m) <= 0;
        const bool b_le = cmp_x(b, m) <= 0;
        if (a_le == b_le) continue;
        const int o = orient_pt(a, b, m);
        if (a_le && !b_le && o < 0) ++cnt;
        else if (!a_le && b_le && o > 0) ++cnt;
    }
    return (cnt & 1) != 0;
}

void record_split(InputEdge& e, const ExactPoint& p) {
    if (p == e.a || p == e.b) return;
    e.splits.push_back(p);
}

// Find all crossings between edges of the two operands and record splits.
void cross_edges(std::vector<InputEdge>& ea, std::vector<InputEdge>& eb) {
    for (auto& e1 : ea) {
        const double lx1 = std::min(e1.a.xd, e1.b.xd) - 1e-6, hx1 = std::max(e1.a.xd, e1.b.xd) + 1e-6;
        const double ly1 = std::min(e1.a.yd, e1.b.yd) - 1e-6, hy1 = std::max(e1.a.yd, e1.b.yd) + 1e-6;
        for (auto& e2 : eb) {
            if (std::min(e2.a.xd, e2.b.xd) > hx1 || std::max(e2.a.xd, e2.b.xd) < lx1 ||
                std::min(e2.a.yd, e2.b.yd) > hy1 || std::max(e2.a.yd, e2.b.yd) < ly1)
                continue;
            const int o1 = orient_pt(e1.a, e1.b, e2.a);
            const int o2 = orient_pt(e1.a, e1.b, e2.b);
            if (o1 == 0 && o2 == 0) {
                // collinear: record overlapping endpoints as interior splits
                if (strictly_inside_segment(e1.a, e1.b, e2.a)) record_split(e1, e2.a);
                if (strictly_inside_segment(e1.a, e1.b, e2.b)) record_split(e1, e2.b);
                if (strictly_inside_segment(e2.a, e2.b, e1.a)) record_split(e2, e1.a);
                if (strictly_inside_segment(e2.a, e2.b, e1.b)) record_split(e2, e1.b);
                continue;
            }
            const int o3 = orient_pt(e2.a, e2.b, e1.a);
            const int o4 = orient_pt(e2.a, e2.b, e1.b);
            if (o1 * o2 < 0 && o3 * o4 < 0) {
                ExactPoint p = line_intersection(e1.a, e1.b, e2.a, e2.b);
                record_split(e1, p);
                record_split(e2, p);
                continue;
            }
            // touching configurations: an endpoint of one segment lies in the
            // interior of the other; split even for tangential contacts so
            // that subsegment midpoints never sit on the other boundary
            if (o1 == 0 && strictly_inside_segment(e1.a, e1.b, e2.a)) record_split(e1, e2.a);
            if (o2 == 0 && strictly_inside_segment(e1.a, e1.b, e2.b)) record_split(e1, e2.b);
            if (o3 == 0 && strictly_inside_segment(e2.a, e2.b, e1.a)) record_split(e2, e1.a);
            if (o4 == 0 && strictly_inside_segment(e2.a, e2.b, e1.b)) record_split(e2, e1.b);
        }
    }
}

struct SubSeg {
    ExactPoint p, q;
};

std::vector<SubSeg> subdivide(std::vector<InputEdge>& edges) {
    std::vector<SubSeg> out;
    for (auto& e : edges) {
        if (e.splits.empty()) {
            out.push_back({e.a, e.b});
            continue;
        }
        std::sort(e.splits.begin(), e.splits.end(),
                  [&e](const ExactPoint& u, const ExactPoint& v) {
                      return cmp_along(e.a, e.b, u, v) < 0;
                  });
        e.splits.erase(std::unique(e.splits.begin(), e.splits.end()), e.splits.end());
        ExactPoint cur = e.a;
        for (const auto& s : e.splits) {
            out.push_back({cur, s});
            cur = s;
        }
        out.push_back({cur, e.b});
    }
    return out;
}

struct SharedInfo {
    int a_count = 0, b_count = 0;
    bool a_forward = false, b_forward = false;  // direction relative to canonical key
};

using SharedMap = std::map<std::pair<ExactPoint, ExactPoint>, SharedInfo,
                           bool (*)(const std::pair<ExactPoint, ExactPoint>&,
                                    const std::pair<ExactPoint, ExactPoint>&)>;

bool pair_less(const std::pair<ExactPoint, ExactPoint>& a,
               const std::pair<ExactPoint, ExactPoint>& b) {
    if (!(a.first == b.first)) return point_less(a.first, b.first);
    if (a.second == b.second) return false;
    return point_less(a.second, b.second);
}

std::pair<ExactPoint, ExactPoint> canonical_key(const SubSeg& s, bool& forward) {
    forward = point_less(s.p, s.q);
    return forward ? std::make_pair(s.p, s.q) : std::make_pair(s.q, s.p);
}

enum class BoolOp { Intersect, Difference };

struct DirectedEdge {
    ExactPoint p, q;
};

// Exact integer direction of p->q, scaled by positive weights.
struct Dir {
    BigInt dx, dy;
    double dxd, dyd;
};

Dir direction(const ExactPoint& p, const ExactPoint& q) {
    Dir d;
    d.dx = q.x * p.w - p.x * q.w;
    d.dy = q.y * p.w - p.y * q.w;
    d.dxd = q.xd - p.xd;
    d.dyd = q.yd - p.yd;
    return d;
}

int sign_filtered(double approx, const BigInt& exact_in, double mag) {
    const double err = 1e-11 * mag + 1e-24;
    if (approx > err) return 1;
    if (approx < -err) return -1;
    return exact_in.sign();
}

int cross_sign(const Dir& u, const Dir& v) {
    const double ap = u.dxd * v.dyd - u.dyd * v.dxd;
    const double mag = (std::abs(u.dxd) + std::abs(u.dyd)) * (std::abs(v.dxd) + std::abs(v.dyd)) + 1.0;
    const double err = 1e-11 * mag;
    if (ap > err) return 1;
    if (ap < -err) return -1;
    BigInt c = u.dx * v.dy - u.dy * v.dx;
    return c.sign();
}

int dot_sign(const Dir& u, const Dir& v) {
    const double ap = u.dxd * v.dxd + u.dyd * v.dyd;
    const double mag = (std::abs(u.dxd) + std::abs(u.dyd)) * (std::abs(v.dxd) + std::abs(v.dyd)) + 1.0;
    const double err = 1e-11 * mag;
    if (ap > err) return 1;
    if (ap < -err) return -1;
    BigInt c = u.dx * v.dx + u.dy * v.dy;
    return c.sign();
}

// Rank of direction u rotating clockwise from `from`, in [0, 3]:
// 0 = strictly CW side, 1 = opposite, 2 = strictly CCW side, 3 = same direction.
int cw_rank(const Dir& from, const Dir& u) {
    const int cr = cross_sign(from, u);
    if (cr < 0) return 0;
    if (cr > 0) return 2;
    return dot_sign(from, u) < 0 ? 1 : 3;
}

// True when u comes strictly before v rotating clockwise from `from`.
bool cw_before(const Dir& from, const Dir& u, const Dir& v) {
    const int ru = cw_rank(from, u), rv = cw_rank(from, v);
    if (ru != rv) return ru < rv;
    if (ru == 1 || ru == 3) return false;  // equal direction classes
    return cross_sign(u, v) < 0;
}

std::vector<Ring> stitch(std::vector<DirectedEdge> edges) {
    std::map<ExactPoint, std::vector<std::size_t>, PointLess> outgoing;
    for (std::size_t i = 0; i < edges.size(); ++i) outgoing[edges[i].p].push_back(i);

    std::vector<bool> used(edges.size(), false);
    std::vector<Ring> rings;
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        std::vector<ExactPoint> chain;
        std::size_t cur = start;
        used[cur] = true;
        chain.push_back(edges[cur].p);
        while (!(edges[cur].q == edges[start].p)) {
            chain.push_back(edges[cur].q);
            auto it = outgoing.find(edges[cur].q);
            if (it == outgoing.end())
                throw geometry_error("boolean result boundary does not close");
            std::size_t next = edges.size();
            const Dir rev = direction(edges[cur].q, edges[cur].p);
            for (std::size_t cand : it->second) {
                if (used[cand]) continue;
                if (next == edges.size()) { next = cand; continue; }
                const Dir du = direction(edges[cand].p, edges[cand].q);
                const Dir dv = direction(edges[next].p, edges[next].q);
                if (cw_before(rev, du, dv)) next = cand;
            }
            if (next == edges.size())
                throw geometry_error("boolean result boundary does not close");
            used[next] = true;
            cur = next;
            if (chain.size() > edges.size() + 1)
                throw geometry_error("boolean stitching runaway");
        }
        if (chain.size() < 3) continue;  // degenerate back-and-forth
        // канonical start: smallest vertex first, for deterministic output
        std::size_t lo = 0;
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (point_less(chain[i], chain[lo])) lo = i;
        std::rotate(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(lo), chain.end());
        Ring r;
        try {
            r = Ring::from_exact(std::move(chain), false);
        } catch (const geometry_error&) {
            continue;  // zero-area sliver
        }
        rings.push_back(std::move(r));
    }
    return rings;
}

RegionSet assemble(std::vector<Ring> rings) {
    std::vector<Ring> outers, holes;
    for (auto& r : rings) {
        if (r.is_ccw()) outers.push_back(std::move(r));
        else holes.push_back(std::move(r));
    }
    std::vector<std::size_t> order(outers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<BigRational> areas;
    areas.reserve(outers.size());
    for (const auto& o : outers) areas.push_back(o.area_exact());
    std::stable_sort(order.begin(), order.end(),
                     [&areas](std::size_t i, std::size_t j) { return areas[i] < areas[j]; });

    std::vector<std::vector<Ring>> part_holes(outers.size());
    for (auto& h : holes) {
        const auto& pts = h.exact();
        bool placed = false;
        for (std::size_t oi : order) {
            const Ring& outer = outers[oi];
            if (!outer.mbr().expanded(1e-6).contains(h.mbr())) continue;
            // probe edge midpoints until one is strictly off the outer boundary
            bool inside = false, decided = false;
            for (std::size_t k = 0; k < pts.size() && !decided; ++k) {
                ExactPoint m = midpoint(pts[k], pts[(k + 1) % pts.size()]);
                if (on_ring_boundary(outer.exact(), m)) continue;
                inside = (ring_crossings(outer.exact(), m) & 1) != 0;
                decided = true;
            }
            if (decided && inside) {
                part_holes[oi].push_back(std::move(h));
                placed = true;
                break;
            }
        }
        if (!placed) throw geometry_error("boolean result hole without containing ring");
    }

    RegionSet out;
    for (std::size_t i = 0; i < outers.size(); ++i) {
        PolygonWithHoles part(std::move(outers[i]));
        part.holes = std::move(part_holes[i]);
        out.parts.push_back(std::move(part));
    }
    std::sort(out.parts.begin(), out.parts.end(), [](const PolygonWithHoles& a, const PolygonWithHoles& b) {
        const Mbr& ma = a.mbr();
        const Mbr& mb = b.mbr();
        return std::tie(ma.min.x, ma.min.y, ma.max.x, ma.max.y) <
               std::tie(mb.min.x, mb.min.y, mb.max.x, mb.max.y);
    });
    return out;
}

RegionSet boolean_op(const RegionSet& a, const RegionSet& b, BoolOp op) {
    if (a.empty()) return {};
    if (b.empty()) return op == BoolOp::Intersect ? RegionSet{} : a;
    if (!a.mbr().expanded(1e-9).intersects(b.mbr()))
        return op == BoolOp::Intersect ? RegionSet{} : a;

    std::vector<InputEdge> ea = gather_edges(a);
    std::vector<InputEdge> eb = gather_edges(b);
    cross_edges(ea, eb);
    std::vector<SubSeg> sa = subdivide(ea);
    std::vector<SubSeg> sb = subdivide(eb);

    SharedMap shared(pair_less);
    for (const auto& s : sa) {
        bool fwd = false;
        auto key = canonical_key(s, fwd);
        auto& info = shared[key];
        ++info.a_count;
        info.a_forward = fwd;
    }
    for (const auto& s : sb) {
        bool fwd = false;
        auto key = canonical_key(s, fwd);
        auto& info = shared[key];
        ++info.b_count;
        info.b_forward = fwd;
    }
    for (const auto& [key, info] : shared)
        if (info.a_count > 1 || info.b_count > 1)
            throw geometry_error("operand has duplicated boundary edges");

    std::vector<DirectedEdge> selected;
    for (const auto& s : sa) {
        bool fwd = false;
        auto key = canonical_key(s, fwd);
        const SharedInfo& info = shared.find(key)->second;
        if (info.b_count > 0) {
            const bool same_dir = info.a_forward == info.b_forward;
            if ((op == BoolOp::Intersect && same_dir) || (op == BoolOp::Difference && !same_dir))
                selected.push_back({s.p, s.q});
            continue;
        }
        const bool inside_b = parity_inside(eb, midpoint(s.p, s.q));
        if (op == BoolOp::Intersect ? inside_b : !inside_b) selected.push_back({s.p, s.q});
    }
    for (const auto& s : sb) {
        bool fwd = false;
        auto key = canonical_key(s, fwd);
        const SharedInfo& info = shared.find(key)->second;
        if (info.a_count > 0) continue;  // handled above
        if (!parity_inside(ea, midpoint(s.p, s.q))) continue;
        if (op == BoolOp::Intersect) selected.push_back({s.p, s.q});
        else selected.push_back({s.q, s.p});
    }

    if (selected.empty()) return {};
    return assemble(stitch(std::move(selected)));
}

}  // namespace

RegionSet intersect(const RegionSet& a, const RegionSet& b) {
    return boolean_op(a, b, BoolOp::Intersect);
}

RegionSet difference(const RegionSet& a, const RegionSet& b) {
    return boolean_op(a, b, BoolOp::Difference);
}

bool interiors_overlap(const RegionSet& a, const RegionSet& b) {
    if (a.empty() || b.empty()) return false;
    if (!a.mbr().expanded(1e-9).intersects(b.mbr())) return false;
    return !intersect(a, b).empty();
}

// ---------------------------------------------------------------------------
// circle_polygon / validate_topology
// ---------------------------------------------------------------------------

Ring circle_polygon(Point center, double radius, int n, const SnapGrid& grid) {
    if (!(radius > 0)) throw geometry_error("circle radius must be positive");
    if (n < 3) throw geometry_error("circle polygonization needs at least 3 vertices");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        pts.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
    }
    return Ring::from_points(pts, grid);
}

namespace {

bool rings_interiors_cross(const Ring& r1, const Ring& r2) {
    const auto& p1 = r1.exact();
    const auto& p2 = r2.exact();
    for (std::size_t i = 0; i < p1.size(); ++i) {
        const ExactPoint& a = p1[i];
        const ExactPoint& b = p1[(i + 1) % p1.size()];
        for (std::size_t j = 0; j < p2.size(); ++j) {
            const ExactPoint& c = p2[j];
            const ExactPoint& d = p2[(j + 1) % p2.size()];
            int o1 = orient_pt(a, b, c), o2 = orient_pt(a, b, d);
            int o3 = orient_pt(c, d, a), o4 = orient_pt(c, d, b);
            if (o1 * o2 < 0 && o3 * o4 < 0) return true;
        }
    }
    return false;
}

}  // namespace

void validate_topology(const RegionSet& g) {
    for (const auto& part : g.parts) {
        if (!part.outer.is_ccw()) throw geometry_error("outer ring not counter-clockwise");
        if (!part.outer.is_simple()) throw geometry_error("outer ring not simple");
        for (const auto& h : part.holes) {
            if (h.is_ccw()) throw geometry_error("hole ring not clockwise");
            if (!h.is_simple()) throw geometry_error("hole ring not simple");
            if (rings_interiors_cross(part.outer, h))
                throw geometry_error("hole crosses its outer ring");
            for (const auto& p : h.exact())
                if (!ring_contains_incl(part.outer, p))
                    throw geometry_error("hole vertex outside its outer ring");
        }
        for (std::size_t i = 0; i < part.holes.size(); ++i) {
            for (std::size_t j = i + 1; j < part.holes.size(); ++j) {
                RegionSet hi{PolygonWithHoles(part.holes[i].reversed())};
                RegionSet hj{PolygonWithHoles(part.holes[j].reversed())};
                if (interiors_overlap(hi, hj)) throw geometry_error("holes overlap");
            }
        }
    }
    for (std::size_t i = 0; i < g.parts.size(); ++i) {
        for (std::size_t j = i + 1; j < g.parts.size(); ++j) {
            RegionSet a{g.parts[i]};
            RegionSet b{g.parts[j]};
            if (interiors_overlap(a, b)) throw geometry_error("parts overlap");
        }
    }
}

}  // namespace cspq
