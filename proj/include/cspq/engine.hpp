#ifndef CSPQ_ENGINE_HPP
#define CSPQ_ENGINE_HPP

/// Query pipelines: the baseline method (compute u for every candidate,
/// intersect, compute p one-shot) and the optimized explicit/implicit
/// pipelines (operation-order duality, location-unreachability pruning,
/// multi-step probability computation), plus the update stage.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cspq/index.hpp"
#include "cspq/model.hpp"
#include "cspq/probability.hpp"

namespace cspq {

/// In-memory record store plus the twin index.
class Database {
public:
    Database(WorldConfig cfg, std::vector<MovingObject> objects, std::vector<RestrictedArea> areas);

    [[nodiscard]] const WorldConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const std::vector<MovingObject>& objects() const noexcept { return objects_; }
    [[nodiscard]] const std::vector<RestrictedArea>& areas() const noexcept { return areas_; }
    [[nodiscard]] const RTree& object_index() const noexcept { return obj_tree_; }
    [[nodiscard]] const RTree& area_index() const noexcept { return area_tree_; }

    [[nodiscard]] const MovingObject& object(ObjectId id) const;
    [[nodiscard]] const RestrictedArea& area(ObjectId id) const;

    /// Update stage: validates the new location (inside the world, outside
    /// every restricted area), updates the record and the object index.
    void report_location(ObjectId id, const Point& new_l_r);

    /// Milliseconds spent building both indexes at construction.
    [[nodiscard]] double preprocessing_ms() const noexcept { return preprocessing_ms_; }

private:
    WorldConfig cfg_;
    std::vector<MovingObject> objects_;
    std::vector<RestrictedArea> areas_;
    std::unordered_map<ObjectId, std::size_t> object_slot_;
    std::unordered_map<ObjectId, std::size_t> area_slot_;
    RTree obj_tree_;
    RTree area_tree_;
    double preprocessing_ms_ = 0;
};

/// Where an object's fate was decided (instrumentation for the k-counters
/// and the soundness audits).
enum class Stage : std::uint8_t {
    SpatialValidate,  // circle inside R (k1)
    SpatialPrune,     // circle disjoint from R (k1)
    EmptySPrune,      // s empty after subtracting nearby areas (k2)
    Unreachable,      // s disjoint from the effective subdivision (k3)
    Probability,      // decided by the multi-step probability stage
};

struct DecisionRecord {
    ObjectId id = 0;
    Stage stage = Stage::Probability;
    Decision decision;
    bool in_answer = false;
};

struct EngineStats {
    std::uint64_t candidates = 0;  // |O*|
    std::uint64_t k1 = 0;          // spatially validated or pruned against R
    std::uint64_t k2 = 0;          // pruned by empty s
    std::uint64_t k3 = 0;          // pruned by location unreachability
    std::uint64_t prob_decided = 0;
    std::uint64_t answers = 0;
    std::uint64_t m1_runs = 0;     // adaptive dispatch: prune-mode
    std::uint64_t m2_runs = 0;     // adaptive dispatch: validate-mode
    double step_sum = 0;           // sum of deciding CVR steps
    AccessCounters io;

    [[nodiscard]] double avg_step() const noexcept {
        return prob_decided ? step_sum / static_cast<double>(prob_decided) : 0.0;
    }
};

struct QueryResult {
    AnswerExplicit answer;  // explicit tuples (empty in implicit mode)
    AnswerImplicit ids;     // qualified ids (both modes)
    EngineStats stats;
    std::vector<DecisionRecord> log;  // filled when keep_log
};

/// Optimized explicit pipeline.
QueryResult ecsptrq(const Database& db, const Query& q, std::uint64_t seed, bool keep_log = false);

/// Optimized implicit pipeline (adaptive mechanism / two-way test).
QueryResult icsptrq(const Database& db, const Query& q, std::uint64_t seed, bool keep_log = false);

/// Baseline: per candidate, fetch nearby areas, compute u, s = u ∩ R and p
/// in one shot; no duality, no unreachability-vs-s pruning, no multi-step
/// thresholding.
QueryResult baseline_query(const Database& db, const Query& q, std::uint64_t seed,
                           bool keep_log = false);

}  // namespace cspq

#endif  // CSPQ_ENGINE_HPP
