#include "cspq/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace cspq {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kAreaStream = 0x41524541u;
constexpr std::uint64_t kObjectStream = 0x4f424a53u;

// Uniform-cell hash over area MBRs used to keep placement and point
// rejection linear.
class MbrGrid {
public:
    MbrGrid(double world, double cell) : world_(world), cell_(cell) {
        cols_ = static_cast<int>(std::ceil(world / cell)) + 1;
        cells_.resize(static_cast<std::size_t>(cols_) * cols_);
    }

    void add(const Mbr& box, std::size_t idx) {
        visit(box, [&](std::size_t c) { cells_[c].push_back(idx); });
    }

    template <typename F>
    bool any_hit(const Mbr& box, F&& probe) const {
        bool hit = false;
        visit(box, [&](std::size_t c) {
            if (hit) return;
            for (std::size_t idx : cells_[c])
                if (probe(idx)) { hit = true; return; }
        });
        return hit;
    }

private:
    double world_, cell_;
    int cols_;
    std::vector<std::vector<std::size_t>> cells_;

    template <typename F>
    void visit(const Mbr& box, F&& f) const {
        const int x0 = std::clamp(static_cast<int>(box.min.x / cell_), 0, cols_ - 1);
        const int x1 = std::clamp(static_cast<int>(box.max.x / cell_), 0, cols_ - 1);
        const int y0 = std::clamp(static_cast<int>(box.min.y / cell_), 0, cols_ - 1);
        const int y1 = std::clamp(static_cast<int>(box.max.y / cell_), 0, cols_ - 1);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                f(static_cast<std::size_t>(y) * cols_ + x);
    }
};

std::vector<Point> area_shape_at(const WorkloadSpec& spec, double cx, double cy) {
    std::vector<Point> pts;
    if (spec.area_edges == 4) {
        // default obstacle: 40x10 rectangle, (cx, cy) is the bottom-left corner
        pts = {{cx, cy}, {cx + 40, cy}, {cx + 40, cy + 10}, {cx, cy + 10}};
    } else {
        // equilateral polygon, circumradius 20
        for (int i = 0; i < spec.area_edges; ++i) {
            const double t = 2.0 * std::numbers::pi * i / spec.area_edges;
            pts.push_back({cx + 20 * std::cos(t), cy + 20 * std::sin(t)});
        }
    }
    return pts;
}

Mbr bounds_of(std::span<const Point> pts) {
    Mbr m{{pts[0].x, pts[0].y}, {pts[0].x, pts[0].y}};
    for (const auto& p : pts) {
        m.min.x = std::min(m.min.x, p.x);
        m.min.y = std::min(m.min.y, p.y);
        m.max.x = std::max(m.max.x, p.x);
        m.max.y = std::max(m.max.y, p.y);
    }
    return m;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw validation_error("cannot open " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

RangeShape range_shape_from_string(const std::string& s) {
    if (s == "Sq" || s == "sq") return RangeShape::Sq;
    if (s == "Ta" || s == "ta") return RangeShape::Ta;
    if (s == "Dm" || s == "dm") return RangeShape::Dm;
    if (s == "Tz" || s == "tz") return RangeShape::Tz;
    if (s == "Cc" || s == "cc") return RangeShape::Cc;
    throw validation_error("unknown range shape: " + s);
}

std::string to_string(RangeShape s) {
    switch (s) {
        case RangeShape::Sq: return "Sq";
        case RangeShape::Ta: return "Ta";
        case RangeShape::Dm: return "Dm";
        case RangeShape::Tz: return "Tz";
        case RangeShape::Cc: return "Cc";
    }
    return "Sq";
}

void WorkloadSpec::validate() const {
    if (objects < 0 || areas < 0) throw validation_error("negative entity count");
    if (area_edges < 3) throw validation_error("area polygons need at least 3 edges");
    if (query_edges < 3) throw validation_error("query polygons need at least 3 edges");
    if (!(epsilon > 0) || epsilon > world) throw validation_error("query size out of range");
    if (!(tau_min > 0) || tau_max < tau_min) throw validation_error("bad tau range");
    if (!(world > 0)) throw validation_error("world width must be positive");
}

std::vector<RestrictedArea> gen_restricted_areas(const WorkloadSpec& spec, const SnapGrid& grid) {
    spec.validate();
    std::mt19937_64 rng(mix64(spec.seed ^ kAreaStream));
    const double shape_w = spec.area_edges == 4 ? 40.0 : 40.0;
    const double shape_h = spec.area_edges == 4 ? 10.0 : 40.0;
    const double gap = 4 * grid.quantum;  // keep snapped shapes disjoint

    std::vector<RestrictedArea> areas;
    std::vector<Mbr> boxes;
    areas.reserve(static_cast<std::size_t>(spec.areas));
    MbrGrid cells(spec.world, std::max(shape_w, shape_h) + 1);

    std::uniform_real_distribution<double> ux(0.0, spec.world - shape_w);
    std::uniform_real_distribution<double> uy(0.0, spec.world - shape_h);
    const long long max_tries = 200LL * spec.areas + 100000;
    long long tries = 0;
    while (areas.size() < static_cast<std::size_t>(spec.areas)) {
        if (++tries > max_tries)
            throw validation_error("cannot place " + std::to_string(spec.areas) +
                                   " disjoint areas: density too high");
        double cx = ux(rng);
        double cy = uy(rng);
        if (spec.area_edges != 4) { cx += 20; cy += 20; }  // center-based placement
        std::vector<Point> pts = area_shape_at(spec, cx, cy);
        const Mbr box = bounds_of(pts).expanded(gap);
        if (cells.any_hit(box, [&](std::size_t idx) { return boxes[idx].intersects(box); }))
            continue;
        Ring shape = Ring::from_points(pts, grid);
        const auto id = static_cast<ObjectId>(areas.size() + 1);
        areas.emplace_back(id, std::move(shape));
        boxes.push_back(box);
        cells.add(box, boxes.size() - 1);
    }
    return areas;
}

std::vector<MovingObject> gen_objects(const WorkloadSpec& spec,
                                      std::span<const RestrictedArea> areas,
                                      const SnapGrid& grid) {
    spec.validate();
    (void)grid;
    std::mt19937_64 rng(mix64(spec.seed ^ kObjectStream));

    MbrGrid cells(spec.world, 64.0);
    for (std::size_t i = 0; i < areas.size(); ++i) cells.add(areas[i].mbr, i);

    std::uniform_real_distribution<double> upos(0.0, spec.world);
    std::uniform_real_distribution<double> utau(spec.tau_min, spec.tau_max);

    std::vector<MovingObject> objects;
    objects.reserve(static_cast<std::size_t>(spec.objects));
    const long long max_tries = 1000LL * spec.objects + 100000;
    long long tries = 0;
    while (objects.size() < static_cast<std::size_t>(spec.objects)) {
        if (++tries > max_tries)
            throw validation_error("cannot place objects outside restricted areas");
        const Point p{upos(rng), upos(rng)};
        const Mbr probe{{p.x, p.y}, {p.x, p.y}};
        const bool blocked = cells.any_hit(probe, [&](std::size_t idx) {
            return areas[idx].mbr.contains(p) &&
                   contains_point(RegionSet{PolygonWithHoles(areas[idx].shape)}, p);
        });
        if (blocked) continue;
        MovingObject o;
        o.id = static_cast<ObjectId>(objects.size() + 1);
        o.l_r = p;
        o.tau = utau(rng);
        o.pdf = spec.pdf == PdfKind::Uniform ? Pdf::uniform()
                                             : Pdf::distorted_gaussian(o.tau / 5.0);
        objects.push_back(o);
    }
    return objects;
}

QueryRange gen_query_range(const WorkloadSpec& spec, std::mt19937_64& rng, const SnapGrid& grid,
                           int psi_override) {
    const double L = spec.epsilon;
    std::vector<Point> pts;

    if (psi_override >= 3) {
        // the psi sweep: equilateral polygon, circumradius L/2, first vertex
        // at angle 0 (exact LxL MBR when psi is a multiple of 4)
        std::uniform_real_distribution<double> upos(L / 2, spec.world - L / 2);
        const double cx = upos(rng), cy = upos(rng);
        for (int i = 0; i < psi_override; ++i) {
            const double t = 2.0 * std::numbers::pi * i / psi_override;
            pts.push_back({cx + (L / 2) * std::cos(t), cy + (L / 2) * std::sin(t)});
        }
        return QueryRange{Ring::from_points(pts, grid)};
    }

    std::uniform_real_distribution<double> upos(0.0, spec.world - L);
    const double x = upos(rng), y = upos(rng);
    switch (spec.eta) {
        case RangeShape::Sq:
            pts = {{x, y}, {x + L, y}, {x + L, y + L}, {x, y + L}};
            break;
        case RangeShape::Ta:
            pts = {{x, y}, {x + L, y}, {x + L / 2, y + L}};
            break;
        case RangeShape::Tz:
            pts = {{x, y}, {x + L, y}, {x + 2 * L / 3, y + L}, {x + L / 3, y + L}};
            break;
        case RangeShape::Dm:
            pts = {{x + L / 2, y},         {x + 2 * L / 3, y + L / 3},
                   {x + L, y + L / 2},     {x + 2 * L / 3, y + 2 * L / 3},
                   {x + L / 2, y + L},     {x + L / 3, y + 2 * L / 3},
                   {x, y + L / 2},         {x + L / 3, y + L / 3}};
            break;
        case RangeShape::Cc:
            pts = {{x + L / 3, y},         {x + 2 * L / 3, y},
                   {x + 2 * L / 3, y + L / 3}, {x + L, y + L / 3},
                   {x + L, y + 2 * L / 3},     {x + 2 * L / 3, y + 2 * L / 3},
                   {x + 2 * L / 3, y + L},     {x + L / 3, y + L},
                   {x + L / 3, y + 2 * L / 3}, {x, y + 2 * L / 3},
                   {x, y + L / 3},             {x + L / 3, y + L / 3}};
            break;
    }
    return QueryRange{Ring::from_points(pts, grid)};
}

std::vector<Point> load_points(const std::filesystem::path& file, double world) {
    std::ifstream in(file);
    if (!in) throw validation_error("cannot open " + file.string());
    std::vector<Point> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        double x = 0, y = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2)
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": expected 'x,y'");
        raw.push_back({x, y});
    }
    if (raw.empty()) return raw;

    Mbr ext = bounds_of(raw);
    auto norm = [world](double v, double lo, double hi) {
        if (hi <= lo) return world / 2;  // degenerate range: anchor to the center
        return (v - lo) / (hi - lo) * world;
    };
    for (auto& p : raw) {
        p.x = norm(p.x, ext.min.x, ext.max.x);
        p.y = norm(p.y, ext.min.y, ext.max.y);
    }
    return raw;
}

std::vector<RestrictedArea> load_rects(const std::filesystem::path& file, double world,
                                       const SnapGrid& grid, bool keep_overlaps) {
    std::ifstream in(file);
    if (!in) throw validation_error("cannot open " + file.string());
    struct Raw { double x0, y0, x1, y1; };
    std::vector<Raw> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        Raw r{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.x0, &r.y0, &r.x1, &r.y1) != 4)
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": expected 'xmin,ymin,xmax,ymax'");
        if (r.x1 < r.x0 || r.y1 < r.y0)
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": inverted rectangle");
        raw.push_back(r);
    }
    if (raw.empty()) return {};

    double lx = raw[0].x0, hx = raw[0].x1, ly = raw[0].y0, hy = raw[0].y1;
    for (const auto& r : raw) {
        lx = std::min(lx, r.x0); hx = std::max(hx, r.x1);
        ly = std::min(ly, r.y0); hy = std::max(hy, r.y1);
    }
    auto nx = [&](double v) { return hx <= lx ? world / 2 : (v - lx) / (hx - lx) * world; };
    auto ny = [&](double v) { return hy <= ly ? world / 2 : (v - ly) / (hy - ly) * world; };

    std::vector<RestrictedArea> out;
    std::vector<Mbr> kept;
    for (const auto& r : raw) {
        Mbr box{{nx(r.x0), ny(r.y0)}, {nx(r.x1), ny(r.y1)}};
        if (!(box.width() > 0) || !(box.height() > 0)) continue;  // degenerate after normalization
        if (!keep_overlaps) {
            bool overlaps = false;
            for (const auto& k : kept)
                if (k.intersects(box)) { overlaps = true; break; }
            if (overlaps) continue;
        }
        Point pts[4] = {{box.min.x, box.min.y},
                        {box.max.x, box.min.y},
                        {box.max.x, box.max.y},
                        {box.min.x, box.max.y}};
        out.emplace_back(static_cast<ObjectId>(out.size() + 1), Ring::from_points(pts, grid));
        kept.push_back(box);
    }
    return out;
}

void save_dataset(const std::filesystem::path& dir, const WorkloadSpec& spec,
                  std::span<const MovingObject> objects, std::span<const RestrictedArea> areas) {
    std::filesystem::create_directories(dir);
    char buf[128];

    std::string obj_csv = "# id,x,y,tau,pdf,sigma\n";
    for (const auto& o : objects) {
        std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g,%s,%.17g\n", o.id, o.l_r.x, o.l_r.y,
                      o.tau, o.pdf.kind == PdfKind::Uniform ? "UD" : "DG", o.pdf.sigma);
        obj_csv += buf;
    }

    std::string area_csv = "# id,x1,y1,x2,y2,...\n";
    for (const auto& a : areas) {
        area_csv += std::to_string(a.id);
        for (const Point& p : a.shape.points()) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", p.x, p.y);
            area_csv += buf;
        }
        area_csv += '\n';
    }

    nlohmann::json manifest;
    manifest["seed"] = spec.seed;
    manifest["N"] = spec.objects;
    manifest["M"] = spec.areas;
    manifest["zeta"] = spec.area_edges;
    manifest["psi"] = spec.query_edges;
    manifest["epsilon"] = spec.epsilon;
    manifest["eta"] = to_string(spec.eta);
    manifest["tau_min"] = spec.tau_min;
    manifest["tau_max"] = spec.tau_max;
    manifest["world"] = spec.world;
    manifest["pdf"] = spec.pdf == PdfKind::Uniform ? "UD" : "DG";
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(obj_csv)));
    manifest["objects_fnv1a64"] = buf;
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(area_csv)));
    manifest["areas_fnv1a64"] = buf;

    std::ofstream(dir / "objects.csv") << obj_csv;
    std::ofstream(dir / "areas.csv") << area_csv;
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir, const SnapGrid& grid) {
    Dataset data;

    const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    data.spec.seed = manifest.value("seed", 0ULL);
    data.spec.objects = manifest.value("N", 0);
    data.spec.areas = manifest.value("M", 0);
    data.spec.area_edges = manifest.value("zeta", 4);
    data.spec.query_edges = manifest.value("psi", 4);
    data.spec.epsilon = manifest.value("epsilon", 500.0);
    data.spec.eta = range_shape_from_string(manifest.value("eta", std::string("Sq")));
    data.spec.tau_min = manifest.value("tau_min", 20.0);
    data.spec.tau_max = manifest.value("tau_max", 50.0);
    data.spec.world = manifest.value("world", 10000.0);
    data.spec.pdf = manifest.value("pdf", std::string("UD")) == "DG" ? PdfKind::DistortedGaussian
                                                                     : PdfKind::Uniform;

    {
        std::ifstream in(dir / "objects.csv");
        if (!in) throw validation_error("cannot open " + (dir / "objects.csv").string());
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            MovingObject o;
            unsigned id = 0;
            double x = 0, y = 0, tau = 0, sigma = 0;
            char pdf[8] = {0};
            if (std::sscanf(line.c_str(), "%u,%lf,%lf,%lf,%2[A-Za-z],%lf", &id, &x, &y, &tau, pdf,
                            &sigma) != 6)
                throw validation_error("objects.csv:" + std::to_string(lineno) + ": bad record");
            o.id = id;
            o.l_r = {x, y};
            o.tau = tau;
            o.pdf = std::string(pdf) == "DG" ? Pdf::distorted_gaussian(sigma) : Pdf::uniform();
            data.objects.push_back(o);
        }
    }

    {
        std::ifstream in(dir / "areas.csv");
        if (!in) throw validation_error("cannot open " + (dir / "areas.csv").string());
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string tok;
            std::vector<double> vals;
            while (std::getline(ls, tok, ',')) {
                try {
                    vals.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw validation_error("areas.csv:" + std::to_string(lineno) + ": bad number");
                }
            }
            if (vals.size() < 7 || vals.size() % 2 == 0)
                throw validation_error("areas.csv:" + std::to_string(lineno) +
                                       ": expected id followed by coordinate pairs");
            std::vector<Point> pts;
            for (std::size_t i = 1; i + 1 < vals.size(); i += 2) pts.push_back({vals[i], vals[i + 1]});
            data.areas.emplace_back(static_cast<ObjectId>(vals[0]), Ring::from_points(pts, grid));
        }
    }
    return data;
}

void validate_dataset(const Dataset& data, double world) {
    MbrGrid cells(world, 64.0);
    for (std::size_t i = 0; i < data.areas.size(); ++i) {
        const auto& a = data.areas[i];
        if (!a.shape.is_simple()) throw validation_error("area " + std::to_string(a.id) + " not simple");
        const bool clash = cells.any_hit(a.mbr, [&](std::size_t j) {
            return data.areas[j].mbr.intersects(a.mbr) &&
                   interiors_overlap(RegionSet{PolygonWithHoles(data.areas[j].shape)},
                                     RegionSet{PolygonWithHoles(a.shape)});
        });
        if (clash) throw validation_error("area " + std::to_string(a.id) + " overlaps another area");
        cells.add(a.mbr, i);
    }
    for (const auto& o : data.objects) {
        if (!(o.tau > 0)) throw validation_error("object " + std::to_string(o.id) + " has tau <= 0");
        if (o.l_r.x < 0 || o.l_r.x > world || o.l_r.y < 0 || o.l_r.y > world)
            throw validation_error("object " + std::to_string(o.id) + " outside the territory");
        const Mbr probe{{o.l_r.x, o.l_r.y}, {o.l_r.x, o.l_r.y}};
        const bool inside = cells.any_hit(probe, [&](std::size_t j) {
            return data.areas[j].mbr.contains(o.l_r) &&
                   contains_point(RegionSet{PolygonWithHoles(data.areas[j].shape)}, o.l_r);
        });
        if (inside)
            throw validation_error("object " + std::to_string(o.id) + " inside a restricted area");
    }
}

}  // namespace cspq
