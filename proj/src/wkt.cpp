#include "cspq/wkt.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

namespace cspq {

namespace {

void append_coords(std::string& out, const Ring& r) {
    char buf[64];
    out += '(';
    const auto pts = r.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ", ";
        std::snprintf(buf, sizeof buf, "%.17g %.17g", pts[i].x, pts[i].y);
        out += buf;
    }
    out += ')';
}

void append_polygon_body(std::string& out, const PolygonWithHoles& p) {
    out += '(';
    append_coords(out, p.outer);
    for (const auto& h : p.holes) {
        out += ", ";
        append_coords(out, h);
    }
    out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    void expect_keyword(std::string_view kw) {
        skip_ws();
        for (char c : kw) {
            if (pos_ >= text_.size() || std::toupper(static_cast<unsigned char>(text_[pos_])) != c)
                fail(std::string("expected '") + std::string(kw) + "'");
            ++pos_;
        }
    }

    bool try_keyword(std::string_view kw) {
        skip_ws();
        std::size_t save = pos_;
        for (char c : kw) {
            if (pos_ >= text_.size() || std::toupper(static_cast<unsigned char>(text_[pos_])) != c) {
                pos_ = save;
                return false;
            }
            ++pos_;
        }
        return true;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool try_char(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double number() {
        skip_ws();
        double v = 0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{}) fail("expected number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }

    std::vector<Point> point_list() {
        std::vector<Point> pts;
        expect('(');
        do {
            double x = number();
            double y = number();
            pts.push_back({x, y});
        } while (try_char(','));
        expect(')');
        return pts;
    }

    void finish() {
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error("wkt: " + msg + " at offset " + std::to_string(pos_));
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
};

PolygonWithHoles parse_polygon_body(Parser& p, const SnapGrid& grid) {
    p.expect('(');
    Ring outer = Ring::from_points(p.point_list(), grid);
    std::vector<Ring> holes;
    while (p.try_char(','))
        holes.push_back(Ring::from_points(p.point_list(), grid));
    p.expect(')');
    return {std::move(outer), std::move(holes)};
}

}  // namespace

std::string to_wkt(const Ring& r) {
    std::string out = "RING ";
    append_coords(out, r);
    return out;
}

std::string to_wkt(const PolygonWithHoles& p) {
    std::string out = "POLYGON ";
    append_polygon_body(out, p);
    return out;
}

std::string to_wkt(const RegionSet& g) {
    if (g.empty()) return "MULTIPOLYGON EMPTY";
    std::string out = "MULTIPOLYGON (";
    for (std::size_t i = 0; i < g.parts.size(); ++i) {
        if (i) out += ", ";
        append_polygon_body(out, g.parts[i]);
    }
    out += ')';
    return out;
}

Ring parse_wkt_ring(std::string_view text, const SnapGrid& grid) {
    Parser p(text);
    p.expect_keyword("RING");
    Ring r = Ring::from_points(p.point_list(), grid);
    p.finish();
    return r;
}

PolygonWithHoles parse_wkt_polygon(std::string_view text, const SnapGrid& grid) {
    Parser p(text);
    p.expect_keyword("POLYGON");
    PolygonWithHoles poly = parse_polygon_body(p, grid);
    p.finish();
    return poly;
}

RegionSet parse_wkt_region(std::string_view text, const SnapGrid& grid) {
    Parser p(text);
    RegionSet out;
    if (p.try_keyword("MULTIPOLYGON")) {
        if (p.try_keyword("EMPTY")) {
            p.finish();
            return out;
        }
        p.expect('(');
        do {
            out.parts.push_back(parse_polygon_body(p, grid));
        } while (p.try_char(','));
        p.expect(')');
        p.finish();
        return out;
    }
    if (p.try_keyword("POLYGON")) {
        out.parts.push_back(parse_polygon_body(p, grid));
        p.finish();
        return out;
    }
    p.expect_keyword("RING");
    out.parts.emplace_back(Ring::from_points(p.point_list(), grid));
    p.finish();
    return out;
}

}  // namespace cspq
