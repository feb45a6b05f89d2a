#include "cspq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "cspq/uncertainty.hpp"

namespace cspq {

Database::Database(WorldConfig cfg, std::vector<MovingObject> objects,
                   std::vector<RestrictedArea> areas)
    : cfg_(std::move(cfg)), objects_(std::move(objects)), areas_(std::move(areas)) {
    cfg_.validate();
    object_slot_.reserve(objects_.size());
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        if (!object_slot_.emplace(objects_[i].id, i).second)
            throw validation_error("duplicate object id " + std::to_string(objects_[i].id));
    }
    area_slot_.reserve(areas_.size());
    for (std::size_t i = 0; i < areas_.size(); ++i) {
        if (!area_slot_.emplace(areas_[i].id, i).second)
            throw validation_error("duplicate area id " + std::to_string(areas_[i].id));
    }
    const auto t0 = std::chrono::steady_clock::now();
    obj_tree_ = build_object_index(objects_);
    area_tree_ = build_area_index(areas_);
    const auto t1 = std::chrono::steady_clock::now();
    preprocessing_ms_ = std::chrono::duration<double, std::milli>(t1 - t0).count();
}

const MovingObject& Database::object(ObjectId id) const {
    auto it = object_slot_.find(id);
    if (it == object_slot_.end()) throw not_found_error("unknown object id " + std::to_string(id));
    return objects_[it->second];
}

const RestrictedArea& Database::area(ObjectId id) const {
    auto it = area_slot_.find(id);
    if (it == area_slot_.end()) throw not_found_error("unknown area id " + std::to_string(id));
    return areas_[it->second];
}

void Database::report_location(ObjectId id, const Point& new_l_r) {
    auto it = object_slot_.find(id);
    if (it == object_slot_.end()) throw not_found_error("unknown object id " + std::to_string(id));
    MovingObject& obj = objects_[it->second];

    if (new_l_r.x < 0 || new_l_r.x > cfg_.width || new_l_r.y < 0 || new_l_r.y > cfg_.width)
        throw validation_error("location outside the territory");
    AccessCounters scratch;
    std::vector<ObjectId> hits;
    area_tree_.search({{new_l_r.x, new_l_r.y}, {new_l_r.x, new_l_r.y}}, scratch, hits);
    for (ObjectId aid : hits) {
        const RestrictedArea& r = area(aid);
        if (contains_point(RegionSet{PolygonWithHoles(r.shape)}, new_l_r))
            throw validation_error("location inside restricted area " + std::to_string(aid));
    }

    update_object(obj_tree_, obj, new_l_r);
    obj.l_r = new_l_r;
}

// ---------------------------------------------------------------------------
// Query pipelines
// ---------------------------------------------------------------------------

namespace {

std::vector<ObjectId> sorted_candidates(const Database& db, const Mbr& window,
                                        AccessCounters& io) {
    std::vector<ObjectId> ids;
    db.object_index().search(window, io, ids);
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Per-object record-fetch tracking: an area polygon is fetched once per
// object pipeline, no matter how many stages consume it.
struct FetchScope {
    AccessCounters& io;
    std::unordered_set<ObjectId> areas_fetched;

    void fetch_area(ObjectId id) {
        if (areas_fetched.insert(id).second) ++io.record_fetches;
    }
    void fetch_object_record() { ++io.record_fetches; }
    [[nodiscard]] FetchHook hook() {
        return [this](ObjectId id) { fetch_area(id); };
    }
};

void log_decision(QueryResult& out, bool keep_log, ObjectId id, Stage stage, const Decision& d,
                  bool in_answer) {
    if (keep_log) out.log.push_back({id, stage, d, in_answer});
}

std::vector<const RestrictedArea*> area_records(const Database& db, std::vector<ObjectId> ids) {
    std::sort(ids.begin(), ids.end());
    std::vector<const RestrictedArea*> out;
    out.reserve(ids.size());
    for (ObjectId id : ids) out.push_back(&db.area(id));
    return out;
}

void add_answer(QueryResult& out, const Query& q, ObjectId id, double p) {
    if (q.mode == QueryMode::Explicit) out.answer.tuples.emplace_back(id, p);
    out.ids.push_back(id);
    ++out.stats.answers;
}

// The optimized pipeline shared by ECSPTRQ and ICSPTRQ; `implicit` selects
// the enhanced multi-step stage.
QueryResult optimized_query(const Database& db, const Query& q, std::uint64_t seed, bool implicit,
                            bool keep_log) {
    QueryResult out;
    const WorldConfig& cfg = db.config();
    const SnapGrid grid = cfg.grid();
    const RegionSet range{PolygonWithHoles(q.range.shape)};

    const std::vector<ObjectId> candidates = sorted_candidates(db, q.range.mbr, out.stats.io);
    out.stats.candidates = candidates.size();

    for (ObjectId id : candidates) {
        const MovingObject& o = db.object(id);
        FetchScope fetches{out.stats.io, {}};

        const Ring circle = circle_polygon(o.l_r, o.tau, cfg.circle_vertices, grid);
        const RegionSet circle_region{PolygonWithHoles(circle)};
        RegionSet s = intersect(circle_region, range);

        if (s.empty()) {  // circle misses R entirely
            ++out.stats.k1;
            log_decision(out, keep_log, id, Stage::SpatialPrune, {}, false);
            continue;
        }
        if (s.area_exact() == circle_region.area_exact()) {  // circle inside R: p = 1
            ++out.stats.k1;
            add_answer(out, q, id, 1.0);
            log_decision(out, keep_log, id, Stage::SpatialValidate, {}, true);
            continue;
        }

        // subtract the areas near circle ∩ R (operation-order duality)
        std::vector<ObjectId> near_ids;
        db.area_index().search(s.mbr(), out.stats.io, near_ids);
        for (const RestrictedArea* r : area_records(db, std::move(near_ids))) {
            if (!s.mbr().expanded(1e-9).intersects(r->mbr)) continue;
            fetches.fetch_area(r->id);
            s = difference(s, RegionSet{PolygonWithHoles(r->shape)});
            if (s.empty()) break;
        }
        if (s.empty()) {
            ++out.stats.k2;
            log_decision(out, keep_log, id, Stage::EmptySPrune, {}, false);
            continue;
        }

        // uncertainty region with early pruning
        std::vector<ObjectId> cand_ids;
        db.area_index().search(o.square(), out.stats.io, cand_ids);
        std::vector<const RestrictedArea*> cand_areas;
        cand_areas.reserve(cand_ids.size());
        for (ObjectId aid : cand_ids) cand_areas.push_back(&db.area(aid));
        cand_areas = sort_by_span(std::move(cand_areas));

        EarlyPruneResult built = build_with_early_prune(o, circle, cand_areas, s, fetches.hook());
        if (built.pruned) {
            ++out.stats.k3;
            log_decision(out, keep_log, id, Stage::Unreachable, {}, false);
            continue;
        }

        // probability stage: the object's PDF payload is consumed here
        fetches.fetch_object_record();
        Decision d;
        if (o.pdf.kind == PdfKind::Uniform) {
            d = implicit ? adaptive_uniform(built.u, built.s_kept, q.p_t)
                         : uniform_multistep(built.u, built.s_kept, q.p_t);
        } else {
            Rng rng = make_object_rng(seed, id);
            d = implicit ? two_way_test(built.u, built.s_kept, o.pdf, o, q.p_t, cfg, rng)
                         : mc_multistep(built.u, built.s_kept, o.pdf, o, q.p_t, cfg, rng);
        }
        ++out.stats.prob_decided;
        out.stats.step_sum += d.step;
        if (d.method == 1) ++out.stats.m1_runs;
        if (d.method == 2) ++out.stats.m2_runs;

        bool qualified = false;
        if (d.kind == Decision::Kind::Validated) qualified = true;
        else if (d.kind == Decision::Kind::Exact && d.p >= q.p_t) qualified = true;
        if (qualified) add_answer(out, q, id, d.p);
        log_decision(out, keep_log, id, Stage::Probability, d, qualified);
    }
    return out;
}

}  // namespace

QueryResult ecsptrq(const Database& db, const Query& q, std::uint64_t seed, bool keep_log) {
    return optimized_query(db, q, seed, false, keep_log);
}

QueryResult icsptrq(const Database& db, const Query& q, std::uint64_t seed, bool keep_log) {
    return optimized_query(db, q, seed, true, keep_log);
}

QueryResult baseline_query(const Database& db, const Query& q, std::uint64_t seed, bool keep_log) {
    QueryResult out;
    const WorldConfig& cfg = db.config();
    const SnapGrid grid = cfg.grid();
    const RegionSet range{PolygonWithHoles(q.range.shape)};

    const std::vector<ObjectId> candidates = sorted_candidates(db, q.range.mbr, out.stats.io);
    out.stats.candidates = candidates.size();

    for (ObjectId id : candidates) {
        const MovingObject& o = db.object(id);
        FetchScope fetches{out.stats.io, {}};

        // fetch candidate areas and compute the full uncertainty region
        std::vector<ObjectId> cand_ids;
        db.area_index().search(o.square(), out.stats.io, cand_ids);
        std::vector<const RestrictedArea*> cand_areas;
        cand_areas.reserve(cand_ids.size());
        for (ObjectId aid : cand_ids) cand_areas.push_back(&db.area(aid));
        cand_areas = sort_by_span(std::move(cand_areas));

        const Ring circle = circle_polygon(o.l_r, o.tau, cfg.circle_vertices, grid);
        const RegionSet u = compute_uncertainty_region(o, circle, cand_areas, fetches.hook());
        const RegionSet s = intersect(u, range);

        double p = 0;
        if (s.empty()) {
            p = 0;
        } else {
            fetches.fetch_object_record();
            if (o.pdf.kind == PdfKind::Uniform) {
                p = exact_probability_uniform(u, s).to_double();
            } else {
                Rng rng = make_object_rng(seed, id);
                p = mc_probability(u, s, o.pdf, o, static_cast<std::size_t>(cfg.n1), rng);
            }
        }

        Decision d{Decision::Kind::Exact, Rule::FinalExact, p, 1, 0};
        const bool qualified = p >= q.p_t;
        if (qualified) add_answer(out, q, id, p);
        log_decision(out, keep_log, id, Stage::Probability, d, qualified);
    }
    return out;
}

}  // namespace cspq
