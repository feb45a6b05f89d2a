// cspq command line: dataset generation, delta calibration, single queries,
// benchmark sweeps and dataset validation.

#include <CLI11.hpp>

#include <iostream>
#include <random>

#include "cspq/bench.hpp"
#include "cspq/config.hpp"
#include "cspq/datagen.hpp"
#include "cspq/engine.hpp"
#include "cspq/uncertainty.hpp"
#include "cspq/wkt.hpp"

namespace {

using namespace cspq;

WorkloadSpec spec_from_config(const Config& cfg) {
    WorkloadSpec spec;
    spec.objects = static_cast<int>(cfg.get_int("N", spec.objects));
    spec.areas = static_cast<int>(cfg.get_int("M", spec.areas));
    spec.area_edges = static_cast<int>(cfg.get_int("zeta", spec.area_edges));
    spec.query_edges = static_cast<int>(cfg.get_int("psi", spec.query_edges));
    spec.epsilon = cfg.get_double("epsilon", spec.epsilon);
    spec.eta = range_shape_from_string(cfg.get("eta", to_string(spec.eta)));
    spec.tau_min = cfg.get_double("tau_min", spec.tau_min);
    spec.tau_max = cfg.get_double("tau_max", spec.tau_max);
    spec.world = cfg.get_double("world", spec.world);
    spec.pdf = cfg.get("pdf", "UD") == "DG" ? PdfKind::DistortedGaussian : PdfKind::Uniform;
    spec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(spec.seed)));
    return spec;
}

void add_spec_options(CLI::App* cmd, WorkloadSpec& spec, std::string& config_path) {
    cmd->add_option("--config", config_path, "key=value config file (flags override it)");
    cmd->add_option("-N,--objects", spec.objects, "number of moving objects");
    cmd->add_option("-M,--areas", spec.areas, "number of restricted areas");
    cmd->add_option("--zeta", spec.area_edges, "edges per restricted area (4 = 40x10 rectangle)");
    cmd->add_option("--psi", spec.query_edges, "edges of the query range polygon");
    cmd->add_option("--epsilon", spec.epsilon, "query MBR side");
    cmd->add_option("--eta", [&spec](const std::vector<std::string>& v) {
        spec.eta = range_shape_from_string(v.at(0));
        return true;
    }, "query range shape: Sq|Ta|Dm|Tz|Cc");
    cmd->add_option("--tau-min", spec.tau_min, "minimum distance threshold");
    cmd->add_option("--tau-max", spec.tau_max, "maximum distance threshold");
    cmd->add_option("--world", spec.world, "world width (square territory)");
    cmd->add_option("--pdf", [&spec](const std::vector<std::string>& v) {
        spec.pdf = v.at(0) == "DG" ? PdfKind::DistortedGaussian : PdfKind::Uniform;
        return true;
    }, "location PDF: UD|DG");
    cmd->add_option("--seed", spec.seed, "generation seed");
}

WorldConfig world_config_for(const WorkloadSpec& spec, const std::string& delta_path) {
    WorldConfig cfg;
    cfg.width = spec.world;
    if (!delta_path.empty()) {
        cfg.delta_table = load_delta_table(delta_path);
        cfg.theta = static_cast<int>(cfg.delta_table.delta.size());
        cfg.n1 = cfg.delta_table.samples.back();
    }
    return cfg;
}

Database open_database(const std::string& dir, const std::string& delta_path, WorkloadSpec* out_spec) {
    WorldConfig probe;  // manifest carries the world width
    Dataset data = load_dataset(dir, probe.grid());
    WorkloadSpec spec = data.spec;
    WorldConfig cfg = world_config_for(spec, delta_path);
    if (spec.world != probe.width) {
        // reload with the right grid when the dataset is not a 10000-world
        data = load_dataset(dir, cfg.grid());
    }
    if (out_spec) *out_spec = spec;
    return Database(cfg, std::move(data.objects), std::move(data.areas));
}

int cmd_gen(const WorkloadSpec& spec, const std::string& out_dir) {
    const SnapGrid grid = SnapGrid::for_world(spec.world);
    auto areas = gen_restricted_areas(spec, grid);
    auto objects = gen_objects(spec, areas, grid);
    save_dataset(out_dir, spec, objects, areas);
    std::cout << "wrote " << objects.size() << " objects, " << areas.size() << " areas to "
              << out_dir << "\n";
    return 0;
}

int cmd_validate(const std::string& dir) {
    WorldConfig probe;
    Dataset data = load_dataset(dir, probe.grid());
    validate_dataset(data, data.spec.world);
    Database db(world_config_for(data.spec, ""), std::move(data.objects), std::move(data.areas));
    db.object_index().validate();
    db.area_index().validate();
    std::cout << "dataset ok: " << db.objects().size() << " objects, " << db.areas().size()
              << " areas, indexes valid\n";
    return 0;
}

int cmd_calibrate(const std::string& dir, int n_queries, std::uint64_t seed,
                  const std::string& out_file, int oracle_n, int max_instances) {
    WorkloadSpec spec;
    Database db = open_database(dir, "", &spec);
    auto workload = collect_workload(db, spec, n_queries, seed,
                                     static_cast<std::size_t>(max_instances));
    if (workload.empty()) {
        std::cerr << "no calibration instances collected; increase --queries\n";
        return 1;
    }
    DeltaTable table = calibrate_delta_table(db.config(), workload, seed,
                                             static_cast<std::size_t>(oracle_n));
    save_delta_table(table, out_file);
    std::cout << "calibrated " << table.delta.size() << " versions from " << workload.size()
              << " instances -> " << out_file << "\n";
    for (std::size_t k = 0; k < table.delta.size(); ++k)
        std::cout << "  CV" << k + 1 << ": " << table.samples[k] << " pts, delta "
                  << table.delta[k] << "\n";
    return 0;
}

int cmd_query(const std::string& dir, const std::string& mode, const std::string& method,
              double p_t, const std::string& range_wkt, std::uint64_t query_seed,
              const std::string& delta_path, bool show_stats) {
    WorkloadSpec spec;
    Database db = open_database(dir, delta_path, &spec);
    const SnapGrid grid = db.config().grid();

    Query q;
    q.p_t = p_t;
    q.mode = mode == "implicit" ? QueryMode::Implicit : QueryMode::Explicit;
    if (!range_wkt.empty()) {
        q.range = QueryRange(parse_wkt_ring(range_wkt, grid));
    } else {
        std::mt19937_64 rng(query_seed);
        q.range = gen_query_range(spec, rng, grid);
    }

    QueryResult res;
    switch (method_from_string(method)) {
        case Method::B: res = baseline_query(db, q, query_seed); break;
        case Method::PE: res = ecsptrq(db, q, query_seed); break;
        case Method::PI: res = icsptrq(db, q, query_seed); break;
    }

    if (q.mode == QueryMode::Explicit) {
        std::cout << "id,p\n";
        char buf[64];
        for (const auto& [id, p] : res.answer.tuples) {
            std::snprintf(buf, sizeof buf, "%u,%.17g\n", id, p);
            std::cout << buf;
        }
    } else {
        std::cout << "id\n";
        for (ObjectId id : res.ids) std::cout << id << "\n";
    }
    if (show_stats) {
        std::cerr << "candidates=" << res.stats.candidates << " k1=" << res.stats.k1
                  << " k2=" << res.stats.k2 << " k3=" << res.stats.k3
                  << " prob_decided=" << res.stats.prob_decided
                  << " answers=" << res.stats.answers << " node_reads=" << res.stats.io.node_reads
                  << " record_fetches=" << res.stats.io.record_fetches << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained-space probabilistic threshold range queries"};
    app.require_subcommand(1);

    WorkloadSpec spec;
    // config file values become defaults; explicit flags override them
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                spec = spec_from_config(cspq::Config::parse_file(argv[i + 1]));
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }
    }
    std::string config_path, out_dir = "data", data_dir = "data";
    std::string mode = "explicit", method = "PE", range_wkt, delta_path, out_file;
    double p_t = 0.7;
    std::uint64_t query_seed = 1;
    bool show_stats = false;
    bool paper_scale = false, no_check = false;
    int n_queries = 50, oracle_n = 100000, max_instances = 400;

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    add_spec_options(gen, spec, config_path);
    gen->add_option("-o,--out", out_dir, "output directory");

    auto* validate = app.add_subcommand("validate", "validate a dataset and its indexes");
    validate->add_option("-d,--data", data_dir, "dataset directory")->required();

    auto* calibrate = app.add_subcommand("calibrate", "calibrate the workload-error table");
    calibrate->add_option("-d,--data", data_dir, "dataset directory")->required();
    calibrate->add_option("-o,--out", out_file, "output delta CSV")->required();
    calibrate->add_option("--queries", n_queries, "query ranges used to collect instances");
    calibrate->add_option("--oracle-n", oracle_n, "sample count of the high-N oracle");
    calibrate->add_option("--max-instances", max_instances, "cap on collected instances");
    calibrate->add_option("--seed", query_seed, "calibration seed");

    auto* query = app.add_subcommand("query", "run one query");
    query->add_option("-d,--data", data_dir, "dataset directory")->required();
    query->add_option("--mode", mode, "explicit|implicit");
    query->add_option("--method", method, "B|PE|PI");
    query->add_option("--pt", p_t, "probability threshold");
    query->add_option("--range", range_wkt, "query range as WKT RING (default: generated)");
    query->add_option("--seed", query_seed, "query seed (placement and sampling)");
    query->add_option("--delta", delta_path, "calibrated delta CSV");
    query->add_flag("--stats", show_stats, "print engine counters to stderr");

    auto* bench = app.add_subcommand("bench", "run an experiment sweep");
    add_spec_options(bench, spec, config_path);
    std::string sweep = "none", values_csv, methods_csv = "B,PE,PI", csv_out = "metrics.csv";
    int reps = 10, queries_per_point = 50;
    bench->add_option("--sweep", sweep, "sweep variable: none|N|M|zeta|psi|epsilon|p_t|eta");
    bench->add_option("--values", values_csv, "comma-separated sweep values");
    bench->add_option("--methods", methods_csv, "comma-separated subset of B,PE,PI");
    bench->add_option("--queries", queries_per_point, "query ranges per sweep point");
    bench->add_option("--reps", reps, "repetitions per query");
    bench->add_option("--pt", p_t, "probability threshold");
    bench->add_option("--delta", delta_path, "calibrated delta CSV");
    bench->add_option("-o,--out", csv_out, "metrics CSV path");
    bench->add_flag("--paper-scale", paper_scale, "use the full-scale defaults (N = M = 50000)");
    bench->add_flag("--no-check", no_check, "skip the baseline correctness gate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(spec, out_dir);
        if (validate->parsed()) return cmd_validate(data_dir);
        if (calibrate->parsed())
            return cmd_calibrate(data_dir, n_queries, query_seed, out_file, oracle_n, max_instances);
        if (query->parsed())
            return cmd_query(data_dir, mode, method, p_t, range_wkt, query_seed, delta_path,
                             show_stats);
        if (bench->parsed()) {
            ExperimentPlan plan;
            plan.base = spec;
            if (paper_scale) {
                plan.base.objects = 50000;
                plan.base.areas = 50000;
            }
            plan.sweep = sweep;
            if (!values_csv.empty()) {
                std::stringstream ss(values_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) plan.values.push_back(tok);
            }
            plan.methods.clear();
            std::stringstream ms(methods_csv);
            std::string tok;
            while (std::getline(ms, tok, ',')) plan.methods.push_back(method_from_string(tok));
            plan.p_t = p_t;
            plan.queries_per_point = queries_per_point;
            plan.repetitions = reps;
            plan.seed = spec.seed;
            plan.check_against_baseline = !no_check;

            auto rows = run_plan(plan, &std::cerr);
            emit_csv(rows, csv_out);
            std::cout << csv_header() << "\n";
            for (const auto& r : rows) std::cout << csv_line(r) << "\n";
            std::cout << "wrote " << csv_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
