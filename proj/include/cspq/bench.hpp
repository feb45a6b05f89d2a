#ifndef CSPQ_BENCH_HPP
#define CSPQ_BENCH_HPP

/// Experiment harness: builds the twin index (timed as preprocessing), runs
/// the baseline and the optimized pipelines across parameter sweeps, times
/// updates, and emits CSV metrics.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspq/datagen.hpp"
#include "cspq/engine.hpp"

namespace cspq {

enum class Method : std::uint8_t { B, PE, PI };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ExperimentPlan {
    std::string sweep = "none";          // one of: none, N, M, zeta, psi, epsilon, p_t, eta
    std::vector<std::string> values;     // sweep values (numbers, or shape tags for eta)
    WorkloadSpec base;                   // defaults for everything not swept
    double p_t = 0.7;
    std::vector<Method> methods = {Method::B, Method::PE, Method::PI};
    int queries_per_point = 50;
    int repetitions = 10;
    int updates = 100;
    int update_rounds = 10;
    std::uint64_t seed = 1;
    bool check_against_baseline = true;  // abort on answer mismatch (band-exempt for MC)

    void validate() const;
};

/// Metrics for one (sweep value, method) cell.
struct BenchRow {
    std::string sweep;
    std::string value;
    std::string method;
    std::string pdf;
    int queries = 0;
    double preprocessing_ms = 0;
    double update_ms = 0;          // mean per single location update
    double mean_query_ms = 0;
    double median_query_ms = 0;
    double min_query_ms = 0;
    double mean_io = 0;            // node_reads + record_fetches per query
    double mean_node_reads = 0;
    double mean_record_fetches = 0;
    double mean_candidates = 0;
    double mean_answers = 0;
    double mean_k1 = 0, mean_k2 = 0, mean_k3 = 0;
    double avg_step = 0;
    std::uint64_t circle_vertices = 64;
    std::uint64_t grid_bits = 20;
};

std::vector<BenchRow> run_plan(const ExperimentPlan& plan, std::ostream* progress = nullptr);

/// Collect (u, s) calibration instances by running the optimized spatial
/// pipeline over `n_queries` generated ranges; objects are forced onto the
/// DistortedGaussian PDF (sigma = tau/5) since the workload errors concern
/// the Monte Carlo path.
std::vector<WorkloadInstance> collect_workload(const Database& db, const WorkloadSpec& spec,
                                               int n_queries, std::uint64_t seed,
                                               std::size_t max_instances = 0);

void emit_csv(std::span<const BenchRow> rows, const std::filesystem::path& path);
std::string csv_header();
std::string csv_line(const BenchRow& row);

}  // namespace cspq

#endif  // CSPQ_BENCH_HPP
