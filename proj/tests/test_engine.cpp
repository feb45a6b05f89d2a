#include <doctest.h>

#include <algorithm>
#include <random>

#include "cspq/datagen.hpp"
#include "cspq/engine.hpp"
#include "oracles.hpp"

using namespace cspq;
using namespace cspq::oracles;

namespace {

// The textbook scenario: no restricted areas, a rectangular range, uniform
// PDFs; o2 and o3 sit on range edges, o4 on a corner, o1 far away.
Database figure_one_db() {
    WorldConfig cfg;
    cfg.width = 8192;  // integer coordinates are on the snap grid
    std::vector<MovingObject> objects(4);
    objects[0] = {1, {5000, 5000}, 50, Pdf::uniform()};
    objects[1] = {2, {1000, 2000}, 50, Pdf::uniform()};  // left edge: half inside
    objects[2] = {3, {2000, 3000}, 50, Pdf::uniform()};  // top edge: half inside
    objects[3] = {4, {3000, 3000}, 50, Pdf::uniform()};  // corner: quarter inside
    return Database(cfg, std::move(objects), {});
}

Query figure_one_query(const Database& db, QueryMode mode) {
    const SnapGrid grid = db.config().grid();
    std::vector<Point> pts = {{1000, 1000}, {3000, 1000}, {3000, 3000}, {1000, 3000}};
    Query q;
    q.range = QueryRange(Ring::from_points(pts, grid));
    q.p_t = 0.2;
    q.mode = mode;
    return q;
}

Database random_db(int n_objects, int n_areas, std::uint64_t seed, PdfKind pdf,
                   WorkloadSpec* out_spec = nullptr) {
    WorkloadSpec spec;
    spec.objects = n_objects;
    spec.areas = n_areas;
    spec.seed = seed;
    spec.pdf = pdf;
    WorldConfig cfg;
    cfg.width = spec.world;
    const SnapGrid grid = cfg.grid();
    auto areas = gen_restricted_areas(spec, grid);
    auto objects = gen_objects(spec, areas, grid);
    if (out_spec) *out_spec = spec;
    return Database(cfg, std::move(objects), std::move(areas));
}

Query random_query(const Database& db, const WorkloadSpec& spec, std::uint64_t seed, double p_t,
                   QueryMode mode) {
    std::mt19937_64 rng(seed);
    Query q;
    q.range = gen_query_range(spec, rng, db.config().grid());
    q.p_t = p_t;
    q.mode = mode;
    return q;
}

}  // namespace

TEST_CASE("edge and corner objects get exact probabilities") {
    Database db = figure_one_db();

    QueryResult pe = ecsptrq(db, figure_one_query(db, QueryMode::Explicit), 1);
    REQUIRE(pe.answer.tuples.size() == 3);
    CHECK(pe.answer.tuples[0].first == 2);
    CHECK(pe.answer.tuples[0].second == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pe.answer.tuples[1].first == 3);
    CHECK(pe.answer.tuples[1].second == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pe.answer.tuples[2].first == 4);
    CHECK(pe.answer.tuples[2].second == doctest::Approx(0.25).epsilon(1e-12));

    QueryResult pi = icsptrq(db, figure_one_query(db, QueryMode::Implicit), 1);
    CHECK(pi.ids == AnswerImplicit{2, 3, 4});

    QueryResult b = baseline_query(db, figure_one_query(db, QueryMode::Explicit), 1);
    CHECK(b.answer.tuples == pe.answer.tuples);
}

TEST_CASE("range away from every object square yields nothing") {
    Database db = figure_one_db();
    const SnapGrid grid = db.config().grid();
    std::vector<Point> pts = {{7000, 7000}, {7500, 7000}, {7500, 7500}, {7000, 7500}};
    Query q;
    q.range = QueryRange(Ring::from_points(pts, grid));
    q.p_t = 0.2;
    QueryResult res = ecsptrq(db, q, 1);
    CHECK(res.answer.tuples.empty());
    CHECK(res.stats.candidates == 0);
    CHECK(res.stats.k1 == 0);
    CHECK(res.stats.k2 == 0);
    CHECK(res.stats.k3 == 0);
}

TEST_CASE("optimized pipelines equal the baseline on random uniform workloads") {
    WorkloadSpec spec;
    Database db = random_db(500, 500, 3, PdfKind::Uniform, &spec);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> upt(0.1, 0.9);

    int nonempty = 0;
    for (int qi = 0; qi < 25; ++qi) {
        const double p_t = upt(rng);
        Query qe = random_query(db, spec, 100 + qi, p_t, QueryMode::Explicit);
        QueryResult b = baseline_query(db, qe, qi);
        QueryResult pe = ecsptrq(db, qe, qi);
        CHECK(pe.answer.tuples == b.answer.tuples);

        Query qm = qe;
        qm.mode = QueryMode::Implicit;
        QueryResult pi = icsptrq(db, qm, qi);
        CHECK(pi.ids == pe.ids);
        if (!b.answer.tuples.empty()) ++nonempty;

        // stats sanity: every candidate is decided exactly once
        CHECK(pe.stats.k1 + pe.stats.k2 + pe.stats.k3 + pe.stats.prob_decided ==
              pe.stats.candidates);
        CHECK(pi.stats.k1 + pi.stats.k2 + pi.stats.k3 + pi.stats.prob_decided ==
              pi.stats.candidates);
    }
    CHECK(nonempty > 5);
}

TEST_CASE("spatially decided objects have the extreme probabilities") {
    WorkloadSpec spec;
    Database db = random_db(600, 400, 7, PdfKind::Uniform, &spec);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> upt(0.1, 0.9);

    std::uint64_t validated_seen = 0, pruned_seen = 0;
    for (int qi = 0; qi < 15; ++qi) {
        Query q = random_query(db, spec, 200 + qi, upt(rng), QueryMode::Explicit);
        QueryResult pe = ecsptrq(db, q, qi, true);
        QueryResult b = baseline_query(db, q, qi, true);

        auto baseline_p = [&b](ObjectId id) {
            for (const auto& rec : b.log)
                if (rec.id == id) return rec.decision.p;
            REQUIRE(false);
            return -1.0;
        };
        for (const auto& rec : pe.log) {
            if (rec.stage == Stage::SpatialValidate) {
                CHECK(baseline_p(rec.id) == 1.0);
                ++validated_seen;
            } else if (rec.stage == Stage::SpatialPrune || rec.stage == Stage::EmptySPrune ||
                       rec.stage == Stage::Unreachable) {
                CHECK(baseline_p(rec.id) == 0.0);
                ++pruned_seen;
            }
        }
    }
    CHECK(validated_seen > 0);
    CHECK(pruned_seen > 0);
}

TEST_CASE("implicit query with a zero threshold") {
    WorkloadSpec spec;
    Database db = random_db(400, 300, 13, PdfKind::Uniform, &spec);
    Query q = random_query(db, spec, 321, 0.0, QueryMode::Implicit);
    QueryResult pi = icsptrq(db, q, 1);
    QueryResult b = baseline_query(db, q, 1, true);

    // every object with a nonempty s qualifies; the baseline additionally
    // keeps p = 0 objects at p_t = 0, so PI's ids form a subset
    CHECK(std::includes(b.ids.begin(), b.ids.end(), pi.ids.begin(), pi.ids.end()));
    for (const auto& rec : b.log)
        if (rec.decision.p > 0)
            CHECK(std::binary_search(pi.ids.begin(), pi.ids.end(), rec.id));
}

TEST_CASE("monte carlo pipelines disagree with the baseline only inside the band") {
    WorkloadSpec spec;
    Database db = random_db(500, 400, 17, PdfKind::DistortedGaussian, &spec);
    const double band = db.config().delta_table.delta.back();
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> upt(0.3, 0.8);

    for (int qi = 0; qi < 10; ++qi) {
        const double p_t = upt(rng);
        Query q = random_query(db, spec, 400 + qi, p_t, QueryMode::Explicit);
        QueryResult b = baseline_query(db, q, qi, true);
        QueryResult pe = ecsptrq(db, q, qi);
        Query qm = q;
        qm.mode = QueryMode::Implicit;
        QueryResult pi = icsptrq(db, qm, qi);

        auto baseline_p = [&b](ObjectId id) {
            for (const auto& rec : b.log)
                if (rec.id == id) return rec.decision.p;
            REQUIRE(false);
            return -1.0;
        };
        for (const auto* ids : {&pe.ids, &pi.ids}) {
            std::vector<ObjectId> diff;
            std::set_symmetric_difference(ids->begin(), ids->end(), b.ids.begin(), b.ids.end(),
                                          std::back_inserter(diff));
            for (ObjectId id : diff) CHECK(std::abs(baseline_p(id) - p_t) <= band + 1e-12);
        }
    }
}

TEST_CASE("location reports update the record and the index") {
    WorkloadSpec spec;
    Database db = random_db(300, 200, 23, PdfKind::Uniform, &spec);

    const ObjectId id = db.objects()[0].id;
    db.report_location(id, {4321, 1234});
    CHECK(db.object(id).l_r.x == 4321);
    AccessCounters c;
    std::vector<ObjectId> got;
    db.object_index().search({{4300, 1200}, {4340, 1260}}, c, got);
    CHECK(std::ranges::count(got, id) == 1);

    // a location inside a restricted area is rejected
    const RestrictedArea& area = db.areas()[0];
    const Point inside{(area.mbr.min.x + area.mbr.max.x) / 2,
                       (area.mbr.min.y + area.mbr.max.y) / 2};
    CHECK_THROWS_AS(db.report_location(id, inside), validation_error);
    CHECK_THROWS_AS(db.report_location(999999, {10, 10}), not_found_error);
    CHECK_THROWS_AS(db.report_location(id, {-5, 10}), validation_error);

    // random legal moves keep the index equivalent to a scan
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> upos(0.0, spec.world);
    std::uniform_int_distribution<std::size_t> pick(0, db.objects().size() - 1);
    int moved = 0;
    while (moved < 100) {
        const ObjectId oid = db.objects()[pick(rng)].id;
        try {
            db.report_location(oid, {upos(rng), upos(rng)});
            ++moved;
        } catch (const validation_error&) {
        }
    }
    db.object_index().validate();
    for (int qi = 0; qi < 20; ++qi) {
        const double x = upos(rng) * 0.9, y = upos(rng) * 0.9;
        const Mbr window{{x, y}, {x + 700, y + 500}};
        auto expect = scan_objects(db.objects(), window);
        std::sort(expect.begin(), expect.end());
        std::vector<ObjectId> got2;
        AccessCounters c2;
        db.object_index().search(window, c2, got2);
        std::sort(got2.begin(), got2.end());
        CHECK(got2 == expect);
    }
}
