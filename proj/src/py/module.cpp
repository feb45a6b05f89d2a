// Python bindings: geometry primitives on plain vertex lists plus the
// engine (dataset generation, the three query pipelines, updates,
// calibration).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cspq/bench.hpp"
#include "cspq/datagen.hpp"
#include "cspq/engine.hpp"
#include "cspq/wkt.hpp"

namespace py = pybind11;
using namespace cspq;

namespace {

using PyRing = std::vector<std::pair<double, double>>;
using PyPolygon = std::vector<PyRing>;   // outer ring first, then holes
using PyRegion = std::vector<PyPolygon>;

Ring ring_from_py(const PyRing& pts, const SnapGrid& grid) {
    std::vector<Point> raw;
    raw.reserve(pts.size());
    for (const auto& [x, y] : pts) raw.push_back({x, y});
    return Ring::from_points(raw, grid);
}

RegionSet region_from_py(const PyRegion& polys, const SnapGrid& grid) {
    RegionSet out;
    for (const auto& poly : polys) {
        if (poly.empty()) throw geometry_error("polygon needs an outer ring");
        Ring outer = ring_from_py(poly[0], grid);
        std::vector<Ring> holes;
        for (std::size_t i = 1; i < poly.size(); ++i) holes.push_back(ring_from_py(poly[i], grid));
        out.parts.emplace_back(std::move(outer), std::move(holes));
    }
    return out;
}

PyRing ring_to_py(const Ring& r) {
    PyRing out;
    for (const Point& p : r.points()) out.emplace_back(p.x, p.y);
    return out;
}

PyRegion region_to_py(const RegionSet& g) {
    PyRegion out;
    for (const auto& part : g.parts) {
        PyPolygon poly{ring_to_py(part.outer)};
        for (const auto& h : part.holes) poly.push_back(ring_to_py(h));
        out.push_back(std::move(poly));
    }
    return out;
}

SnapGrid default_grid(double world) { return SnapGrid::for_world(world); }

py::dict stats_to_py(const EngineStats& s) {
    py::dict d;
    d["candidates"] = s.candidates;
    d["k1"] = s.k1;
    d["k2"] = s.k2;
    d["k3"] = s.k3;
    d["prob_decided"] = s.prob_decided;
    d["answers"] = s.answers;
    d["avg_step"] = s.avg_step();
    d["node_reads"] = s.io.node_reads;
    d["record_fetches"] = s.io.record_fetches;
    return d;
}

class PyDatabase {
public:
    PyDatabase(int objects, int areas, double world, const std::string& pdf, std::uint64_t seed,
               double epsilon, const std::string& eta) {
        spec_.objects = objects;
        spec_.areas = areas;
        spec_.world = world;
        spec_.pdf = pdf == "DG" ? PdfKind::DistortedGaussian : PdfKind::Uniform;
        spec_.seed = seed;
        spec_.epsilon = epsilon;
        spec_.eta = range_shape_from_string(eta);
        WorldConfig cfg;
        cfg.width = world;
        const SnapGrid grid = cfg.grid();
        auto area_records = gen_restricted_areas(spec_, grid);
        auto object_records = gen_objects(spec_, area_records, grid);
        db_ = std::make_unique<Database>(cfg, std::move(object_records), std::move(area_records));
    }

    py::dict query(const std::string& method, const PyRing& range, double p_t,
                   const std::string& mode, std::uint64_t seed) const {
        Query q;
        q.range = QueryRange(ring_from_py(range, db_->config().grid()));
        q.p_t = p_t;
        q.mode = mode == "implicit" ? QueryMode::Implicit : QueryMode::Explicit;
        QueryResult res;
        switch (method_from_string(method)) {
            case Method::B: res = baseline_query(*db_, q, seed); break;
            case Method::PE: res = ecsptrq(*db_, q, seed); break;
            case Method::PI: res = icsptrq(*db_, q, seed); break;
        }
        py::dict out;
        py::list tuples;
        for (const auto& [id, p] : res.answer.tuples) tuples.append(py::make_tuple(id, p));
        out["answer"] = tuples;
        out["ids"] = res.ids;
        out["stats"] = stats_to_py(res.stats);
        return out;
    }

    py::dict random_query_range(std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        QueryRange r = gen_query_range(spec_, rng, db_->config().grid());
        py::dict out;
        out["ring"] = ring_to_py(r.shape);
        return out;
    }

    void report_location(ObjectId id, double x, double y) { db_->report_location(id, {x, y}); }

    py::list objects() const {
        py::list out;
        for (const auto& o : db_->objects()) {
            py::dict d;
            d["id"] = o.id;
            d["x"] = o.l_r.x;
            d["y"] = o.l_r.y;
            d["tau"] = o.tau;
            d["pdf"] = o.pdf.kind == PdfKind::Uniform ? "UD" : "DG";
            out.append(d);
        }
        return out;
    }

    std::size_t num_areas() const { return db_->areas().size(); }
    double preprocessing_ms() const { return db_->preprocessing_ms(); }

private:
    WorkloadSpec spec_;
    std::unique_ptr<Database> db_;
};

}  // namespace

PYBIND11_MODULE(_cspq, m) {
    m.doc() = "constrained-space probabilistic threshold range queries";

    py::register_exception<geometry_error>(m, "GeometryError");
    py::register_exception<validation_error>(m, "ValidationError");
    py::register_exception<not_found_error>(m, "NotFoundError");

    m.def(
        "area",
        [](const PyRegion& region, double world) {
            return region_from_py(region, default_grid(world)).area();
        },
        py::arg("region"), py::arg("world") = 10000.0,
        "Area of a region ([[outer, hole, ...], ...], rings as [(x, y), ...]).");

    m.def(
        "intersect",
        [](const PyRegion& a, const PyRegion& b, double world) {
            const SnapGrid g = default_grid(world);
            return region_to_py(intersect(region_from_py(a, g), region_from_py(b, g)));
        },
        py::arg("a"), py::arg("b"), py::arg("world") = 10000.0);

    m.def(
        "difference",
        [](const PyRegion& a, const PyRegion& b, double world) {
            const SnapGrid g = default_grid(world);
            return region_to_py(difference(region_from_py(a, g), region_from_py(b, g)));
        },
        py::arg("a"), py::arg("b"), py::arg("world") = 10000.0);

    m.def(
        "contains_point",
        [](const PyRegion& region, double x, double y, double world) {
            return contains_point(region_from_py(region, default_grid(world)), {x, y});
        },
        py::arg("region"), py::arg("x"), py::arg("y"), py::arg("world") = 10000.0);

    m.def(
        "circle_polygon",
        [](double cx, double cy, double radius, int n, double world) {
            return ring_to_py(circle_polygon({cx, cy}, radius, n, default_grid(world)));
        },
        py::arg("cx"), py::arg("cy"), py::arg("radius"), py::arg("n") = 64,
        py::arg("world") = 10000.0);

    m.def(
        "region_wkt",
        [](const PyRegion& region, double world) {
            return to_wkt(region_from_py(region, default_grid(world)));
        },
        py::arg("region"), py::arg("world") = 10000.0);

    py::class_<PyDatabase>(m, "Database")
        .def(py::init<int, int, double, const std::string&, std::uint64_t, double,
                      const std::string&>(),
             py::arg("objects") = 1000, py::arg("areas") = 1000, py::arg("world") = 10000.0,
             py::arg("pdf") = "UD", py::arg("seed") = 1, py::arg("epsilon") = 500.0,
             py::arg("eta") = "Sq",
             "Generate a synthetic workload and build the twin index.")
        .def("query", &PyDatabase::query, py::arg("method"), py::arg("range"), py::arg("p_t"),
             py::arg("mode") = "explicit", py::arg("seed") = 1,
             "Run one query; range is a ring [(x, y), ...]; method is B, PE or PI.")
        .def("random_query_range", &PyDatabase::random_query_range, py::arg("seed") = 1)
        .def("report_location", &PyDatabase::report_location, py::arg("id"), py::arg("x"),
             py::arg("y"))
        .def("objects", &PyDatabase::objects)
        .def_property_readonly("num_areas", &PyDatabase::num_areas)
        .def_property_readonly("preprocessing_ms", &PyDatabase::preprocessing_ms);
}
