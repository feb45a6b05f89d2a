#include "cspq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cspq/uncertainty.hpp"

namespace cspq {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

WorkloadSpec apply_sweep(const ExperimentPlan& plan, const std::string& value, double& p_t,
                         int& psi_override) {
    WorkloadSpec spec = plan.base;
    p_t = plan.p_t;
    psi_override = 0;
    if (plan.sweep == "none") return spec;
    if (plan.sweep == "eta") {
        spec.eta = range_shape_from_string(value);
        return spec;
    }
    const double v = std::stod(value);
    if (plan.sweep == "N") spec.objects = static_cast<int>(v);
    else if (plan.sweep == "M") spec.areas = static_cast<int>(v);
    else if (plan.sweep == "zeta") spec.area_edges = static_cast<int>(v);
    else if (plan.sweep == "psi") { spec.query_edges = static_cast<int>(v); psi_override = static_cast<int>(v); }
    else if (plan.sweep == "epsilon") spec.epsilon = v;
    else if (plan.sweep == "p_t") p_t = v;
    else throw validation_error("unknown sweep variable: " + plan.sweep);
    return spec;
}

QueryResult run_method(Method m, const Database& db, const Query& q, std::uint64_t seed) {
    switch (m) {
        case Method::B: return baseline_query(db, q, seed);
        case Method::PE: return ecsptrq(db, q, seed);
        case Method::PI: return icsptrq(db, q, seed);
    }
    throw validation_error("unknown method");
}

// A disagreement with the baseline is exempt only when the baseline's own
// full-sample estimate sits inside the final workload-error band around p_t
// (the two-way fall-through / final-step region).  The oracle run keeps its
// per-candidate log so that the estimate is available for pruned objects too.
void check_against_baseline(Method m, const QueryResult& got, const QueryResult& oracle,
                            const Query& q, PdfKind pdf, const WorldConfig& cfg,
                            const std::string& where) {
    const double band = cfg.delta_table.delta.back();
    auto baseline_p = [&oracle, &where](ObjectId id) {
        for (const auto& rec : oracle.log)
            if (rec.id == id) return rec.decision.p;
        throw validation_error(where + ": object " + std::to_string(id) +
                               " missing from the baseline candidate set");
    };

    if (pdf == PdfKind::Uniform && m == Method::PE) {
        if (got.answer.tuples != oracle.answer.tuples)
            throw validation_error(where + ": PE answer tuples differ from baseline");
        return;
    }

    const std::vector<ObjectId>& got_ids = got.ids;
    const std::vector<ObjectId>& want_ids = oracle.ids;
    if (pdf == PdfKind::Uniform) {
        if (got_ids != want_ids)
            throw validation_error(where + ": " + to_string(m) + " id set differs from baseline");
        return;
    }
    std::vector<ObjectId> diff;
    std::set_symmetric_difference(got_ids.begin(), got_ids.end(), want_ids.begin(),
                                  want_ids.end(), std::back_inserter(diff));
    for (ObjectId id : diff) {
        if (std::abs(baseline_p(id) - q.p_t) > band + 1e-12)
            throw validation_error(where + ": " + to_string(m) + " disagrees on object " +
                                   std::to_string(id) + " outside the delta band");
    }
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::B: return "B";
        case Method::PE: return "PE";
        case Method::PI: return "PI";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "B" || s == "b") return Method::B;
    if (s == "PE" || s == "pe") return Method::PE;
    if (s == "PI" || s == "pi") return Method::PI;
    throw validation_error("unknown method: " + s);
}

void ExperimentPlan::validate() const {
    base.validate();
    if (queries_per_point < 1) throw validation_error("need at least one query per point");
    if (repetitions < 1) throw validation_error("need at least one repetition");
    if (methods.empty()) throw validation_error("no methods selected");
    if (sweep != "none" && values.empty()) throw validation_error("sweep without values");
}

std::vector<BenchRow> run_plan(const ExperimentPlan& plan, std::ostream* progress) {
    plan.validate();
    std::vector<BenchRow> rows;
    const std::vector<std::string> values = plan.sweep == "none"
                                                ? std::vector<std::string>{"default"}
                                                : plan.values;

    for (const std::string& value : values) {
        double p_t = plan.p_t;
        int psi_override = 0;
        WorkloadSpec spec = apply_sweep(plan, value, p_t, psi_override);
        if (plan.sweep == "none") psi_override = spec.query_edges > 4 ? spec.query_edges : 0;

        WorldConfig cfg;
        cfg.width = spec.world;
        const SnapGrid grid = cfg.grid();

        if (progress) *progress << "[bench] " << plan.sweep << "=" << value << ": generating N="
                                << spec.objects << " M=" << spec.areas << "\n";
        auto areas = gen_restricted_areas(spec, grid);
        auto objects = gen_objects(spec, areas, grid);
        Database db(cfg, std::move(objects), std::move(areas));

        // common random numbers: query placement streams depend only on the
        // plan seed and the query index, not on the sweep value
        std::vector<Query> queries;
        queries.reserve(static_cast<std::size_t>(plan.queries_per_point));
        for (int qi = 0; qi < plan.queries_per_point; ++qi) {
            std::mt19937_64 qrng(mix64(plan.seed ^ (0xC0FFEEULL + static_cast<std::uint64_t>(qi))));
            Query q;
            q.range = gen_query_range(spec, qrng, grid, psi_override);
            q.p_t = p_t;
            q.mode = QueryMode::Explicit;
            queries.push_back(std::move(q));
        }

        // correctness gate (first repetition's seeds)
        std::vector<QueryResult> oracle;
        const bool need_gate =
            plan.check_against_baseline &&
            std::any_of(plan.methods.begin(), plan.methods.end(),
                        [](Method m) { return m != Method::B; });
        if (need_gate) {
            oracle.reserve(queries.size());
            for (std::size_t qi = 0; qi < queries.size(); ++qi) {
                const std::uint64_t seed = mix64(plan.seed ^ (qi << 20));
                oracle.push_back(baseline_query(db, queries[qi], seed, true));
            }
        }

        for (Method m : plan.methods) {
            if (progress) *progress << "[bench] " << plan.sweep << "=" << value << ": method "
                                    << to_string(m) << "\n";
            BenchRow row;
            row.sweep = plan.sweep;
            row.value = value;
            row.method = to_string(m);
            row.pdf = spec.pdf == PdfKind::Uniform ? "UD" : "DG";
            row.queries = plan.queries_per_point * plan.repetitions;
            row.preprocessing_ms = db.preprocessing_ms();
            row.circle_vertices = static_cast<std::uint64_t>(cfg.circle_vertices);
            row.grid_bits = static_cast<std::uint64_t>(cfg.grid_bits);

            std::vector<double> times;
            times.reserve(static_cast<std::size_t>(row.queries));
            double io_sum = 0, reads_sum = 0, fetch_sum = 0, cand_sum = 0, ans_sum = 0;
            double k1_sum = 0, k2_sum = 0, k3_sum = 0, step_sum = 0, prob_sum = 0;

            for (int rep = 0; rep < plan.repetitions; ++rep) {
                for (std::size_t qi = 0; qi < queries.size(); ++qi) {
                    Query q = queries[qi];
                    q.mode = m == Method::PI ? QueryMode::Implicit : QueryMode::Explicit;
                    const std::uint64_t seed =
                        mix64(plan.seed ^ (qi << 20) ^ (static_cast<std::uint64_t>(rep) << 44));

                    const auto t0 = std::chrono::steady_clock::now();
                    QueryResult res = run_method(m, db, q, seed);
                    const auto t1 = std::chrono::steady_clock::now();
                    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

                    io_sum += static_cast<double>(res.stats.io.total());
                    reads_sum += static_cast<double>(res.stats.io.node_reads);
                    fetch_sum += static_cast<double>(res.stats.io.record_fetches);
                    cand_sum += static_cast<double>(res.stats.candidates);
                    ans_sum += static_cast<double>(res.stats.answers);
                    k1_sum += static_cast<double>(res.stats.k1);
                    k2_sum += static_cast<double>(res.stats.k2);
                    k3_sum += static_cast<double>(res.stats.k3);
                    step_sum += res.stats.step_sum;
                    prob_sum += static_cast<double>(res.stats.prob_decided);

                    if (rep == 0 && need_gate && m != Method::B)
                        check_against_baseline(m, res, oracle[qi], q, spec.pdf, cfg,
                                               plan.sweep + "=" + value + " q" + std::to_string(qi));
                }
            }

            const double nq = static_cast<double>(row.queries);
            row.mean_query_ms = mean(times);
            row.median_query_ms = median(times);
            row.min_query_ms = times.empty() ? 0 : *std::min_element(times.begin(), times.end());
            row.mean_io = io_sum / nq;
            row.mean_node_reads = reads_sum / nq;
            row.mean_record_fetches = fetch_sum / nq;
            row.mean_candidates = cand_sum / nq;
            row.mean_answers = ans_sum / nq;
            row.mean_k1 = k1_sum / nq;
            row.mean_k2 = k2_sum / nq;
            row.mean_k3 = k3_sum / nq;
            row.avg_step = prob_sum > 0 ? step_sum / prob_sum : 0;
            rows.push_back(std::move(row));
        }

        // update stage: rounds of `updates` random legal moves
        {
            std::mt19937_64 urng(mix64(plan.seed ^ 0x5054ULL));
            std::uniform_int_distribution<std::size_t> pick(0, db.objects().size() - 1);
            std::uniform_real_distribution<double> upos(0.0, spec.world);
            double total_ms = 0;
            long long done = 0;
            for (int round = 0; round < plan.update_rounds; ++round) {
                for (int i = 0; i < plan.updates; ++i) {
                    const ObjectId id = db.objects()[pick(urng)].id;
                    for (int tries = 0; tries < 1000; ++tries) {
                        const Point p{upos(urng), upos(urng)};
                        const auto t0 = std::chrono::steady_clock::now();
                        try {
                            db.report_location(id, p);
                        } catch (const validation_error&) {
                            continue;  // landed inside an area: redraw
                        }
                        const auto t1 = std::chrono::steady_clock::now();
                        total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
                        ++done;
                        break;
                    }
                }
            }
            db.object_index().validate();
            const double per_update = done ? total_ms / static_cast<double>(done) : 0;
            for (auto it = rows.end() - static_cast<std::ptrdiff_t>(plan.methods.size());
                 it != rows.end(); ++it)
                it->update_ms = per_update;
        }
    }
    return rows;
}

std::string csv_header() {
    return "sweep,value,method,pdf,queries,preprocessing_ms,update_ms,mean_query_ms,"
           "median_query_ms,min_query_ms,mean_io,mean_node_reads,mean_record_fetches,"
           "mean_candidates,mean_answers,mean_k1,mean_k2,mean_k3,avg_step,circle_vertices,"
           "grid_bits";
}

std::string csv_line(const BenchRow& r) {
    std::ostringstream os;
    os.precision(9);
    os << r.sweep << ',' << r.value << ',' << r.method << ',' << r.pdf << ',' << r.queries << ','
       << r.preprocessing_ms << ',' << r.update_ms << ',' << r.mean_query_ms << ','
       << r.median_query_ms << ',' << r.min_query_ms << ',' << r.mean_io << ','
       << r.mean_node_reads << ',' << r.mean_record_fetches << ',' << r.mean_candidates << ','
       << r.mean_answers << ',' << r.mean_k1 << ',' << r.mean_k2 << ',' << r.mean_k3 << ','
       << r.avg_step << ',' << r.circle_vertices << ',' << r.grid_bits;
    return os.str();
}

void emit_csv(std::span<const BenchRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
    if (!out) throw validation_error("write failure: " + path.string());
}

std::vector<WorkloadInstance> collect_workload(const Database& db, const WorkloadSpec& spec,
                                               int n_queries, std::uint64_t seed,
                                               std::size_t max_instances) {
    const WorldConfig& cfg = db.config();
    const SnapGrid grid = cfg.grid();
    std::vector<WorkloadInstance> out;
    AccessCounters scratch;

    for (int qi = 0; qi < n_queries; ++qi) {
        std::mt19937_64 qrng(mix64(seed ^ (0xCA11ULL + static_cast<std::uint64_t>(qi))));
        const QueryRange range = gen_query_range(spec, qrng, grid);
        const RegionSet range_region{PolygonWithHoles(range.shape)};

        std::vector<ObjectId> ids;
        db.object_index().search(range.mbr, scratch, ids);
        std::sort(ids.begin(), ids.end());

        for (ObjectId id : ids) {
            if (max_instances && out.size() >= max_instances) return out;
            const MovingObject& o = db.object(id);
            const Ring circle = circle_polygon(o.l_r, o.tau, cfg.circle_vertices, grid);
            const RegionSet circle_region{PolygonWithHoles(circle)};
            RegionSet s = intersect(circle_region, range_region);
            if (s.empty() || s.area_exact() == circle_region.area_exact()) continue;

            std::vector<ObjectId> near_ids;
            db.area_index().search(s.mbr(), scratch, near_ids);
            std::sort(near_ids.begin(), near_ids.end());
            for (ObjectId aid : near_ids) {
                const RestrictedArea& r = db.area(aid);
                if (!s.mbr().expanded(1e-9).intersects(r.mbr)) continue;
                s = difference(s, RegionSet{PolygonWithHoles(r.shape)});
                if (s.empty()) break;
            }
            if (s.empty()) continue;

            std::vector<ObjectId> cand_ids;
            db.area_index().search(o.square(), scratch, cand_ids);
            std::vector<const RestrictedArea*> cand_areas;
            cand_areas.reserve(cand_ids.size());
            for (ObjectId aid : cand_ids) cand_areas.push_back(&db.area(aid));
            cand_areas = sort_by_span(std::move(cand_areas));

            EarlyPruneResult built = build_with_early_prune(o, circle, cand_areas, s);
            if (built.pruned) continue;

            WorkloadInstance inst;
            inst.u = std::move(built.u);
            inst.s = std::move(built.s_kept);
            inst.object = o;
            if (inst.object.pdf.kind != PdfKind::DistortedGaussian)
                inst.object.pdf = Pdf::distorted_gaussian(inst.object.tau / 5.0);
            out.push_back(std::move(inst));
        }
    }
    return out;
}

}  // namespace cspq
