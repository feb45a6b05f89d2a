#ifndef CSPQ_PROBABILITY_HPP
#define CSPQ_PROBABILITY_HPP

/// Multi-step appearance-probability computation and the threshold
/// pruning/validating rules built on coarse-version results (CVRs):
///   - uniform PDF: hole-deferred area ratios, refined one hole per step,
///   - non-uniform PDF: self-normalized Monte Carlo with cumulative samples
///     and calibrated per-version workload errors,
///   - the adaptive prune/validate dispatch and the two-way test.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "cspq/model.hpp"

namespace cspq {

/// Why a decision was reached (k-counters and soundness audits key off this).
enum class Rule : std::uint8_t {
    None,
    CvrPrune,        // uniform prune-mode CVR < p_t
    CvrValidate,     // uniform validate-mode CVR > p_t
    McPrune,         // CVR + delta < p_t
    McValidate,      // CVR - delta >= p_t
    FinalExact,      // ran to the final CVR, value is exact
    FinalEstimate,   // ran to the final CVR, value is the full-sample estimate
};

struct Decision {
    enum class Kind : std::uint8_t { Pruned, Validated, Exact } kind = Kind::Exact;
    Rule rule = Rule::None;
    double p = 0;   // exact/estimated probability for Kind::Exact
    int step = 0;   // 1-based CVR step at which the decision fell
    int method = 0; // adaptive dispatch: 1 = prune-mode, 2 = validate-mode
};

using Rng = std::mt19937_64;

/// Deterministic per-object stream for reproducible parallel queries.
Rng make_object_rng(std::uint64_t query_seed, ObjectId id);

/// p = area(s) / area(u), exact.
BigRational exact_probability_uniform(const RegionSet& u, const RegionSet& s);

/// ECSPTRQ prune-mode: p0 from outer rings of s only, then one hole of s
/// (descending area) subtracted per step.  Pruned at the first CVR < p_t,
/// otherwise Exact with the final value.  Appends each CVR to `trace`.
Decision uniform_multistep(const RegionSet& u, const RegionSet& s, double p_t,
                           std::vector<double>* trace = nullptr);

/// ICSPTRQ validate-mode: p0 = area(s) / area(u_o), then one hole of u
/// subtracted from the denominator per step.  Validated at the first
/// intermediate CVR > p_t; the final step compares the exact p against p_t.
Decision uniform_multistep_validate(const RegionSet& u, const RegionSet& s, double p_t,
                                    std::vector<double>* trace = nullptr);

/// gamma = sum of outer-ring areas of s / area(u_o).
double reference_value(const RegionSet& u, const RegionSet& s);

/// Adaptive mechanism: gamma < p_t -> prune-mode, else validate-mode.
Decision adaptive_uniform(const RegionSet& u, const RegionSet& s, double p_t,
                          std::vector<double>* trace = nullptr);

/// n points uniform over u by rejection from mbr(u); throws geometry_error
/// when the acceptance rate degenerates (below 1e-4).
std::vector<Point> sample_in_region(const RegionSet& u, std::size_t n, Rng& rng);

/// Self-normalized estimate of p over N points sampled in u (Uniform PDF
/// reduces to the hit fraction).
double mc_probability(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, std::size_t n, Rng& rng);

/// ECSPTRQ Monte Carlo prune-mode: step k uses floor(k*N1/theta) cumulative
/// samples; Pruned at the first CVR + delta^{k-1} < p_t, otherwise the final
/// CVR is the answer.
Decision mc_multistep(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, double p_t, const WorldConfig& cfg, Rng& rng,
                      std::vector<double>* trace = nullptr);

/// ICSPTRQ Monte Carlo mode: per step, Pruned if CVR + delta < p_t and
/// Validated if CVR - delta >= p_t; an undecided final CVR validates.
Decision two_way_test(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, double p_t, const WorldConfig& cfg, Rng& rng,
                      std::vector<double>* trace = nullptr);

/// One calibration instance: a computed uncertainty region, its query
/// intersection, and the owning object (PDF parameters + RNG identity).
struct WorkloadInstance {
    RegionSet u;
    RegionSet s;
    MovingObject object;
};

/// Re-estimates the per-version workload errors on a sample workload:
/// delta^{k-1} is the max |CVR_k - oracle| over the workload for k < theta
/// and the mean absolute error at k = theta; enforced nonincreasing by a
/// backward maximum (only ever raises a bound).  `oracle_n` points drive the
/// high-N reference estimate per instance.
DeltaTable calibrate_delta_table(const WorldConfig& cfg, std::span<const WorkloadInstance> workload,
                                 std::uint64_t seed, std::size_t oracle_n = 100000);

/// CSV round trip, columns: version,samples,delta.
void save_delta_table(const DeltaTable& table, const std::filesystem::path& path);
DeltaTable load_delta_table(const std::filesystem::path& path);

}  // namespace cspq

#endif  // CSPQ_PROBABILITY_HPP
