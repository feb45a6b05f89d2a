#ifndef CSPQ_UNCERTAINTY_HPP
#define CSPQ_UNCERTAINTY_HPP

/// Uncertainty-region computation under restricted areas: span-sorted
/// subtraction, effective-subdivision selection (the piece containing l_r),
/// and early pruning against the query intersection.

#include <functional>
#include <vector>

#include "cspq/model.hpp"

namespace cspq {

/// Candidate areas ordered by descending span; ties broken by ascending id.
std::vector<const RestrictedArea*> sort_by_span(std::vector<const RestrictedArea*> areas);

/// Called the first time an area's polygon is consumed (record-fetch hook).
using FetchHook = std::function<void(ObjectId area_id)>;

/// u = circle - union of areas, restricted to the piece containing l_r at
/// every subdivision step.  `areas` must already be span-sorted.  Result is
/// a single part, possibly with holes; l_r is inside it.
RegionSet compute_uncertainty_region(const MovingObject& o, const Ring& circle,
                                     std::span<const RestrictedArea* const> areas,
                                     const FetchHook& on_fetch = {});

struct EarlyPruneResult {
    bool pruned = false;        // true: s and the effective subdivision are disjoint
    RegionSet u;                // final uncertainty region (single part) when not pruned
    RegionSet s_kept;           // surviving subdivisions of s
    int areas_applied = 0;      // obstacles subtracted before the decision
    int subdivision_events = 0; // steps where the running region split
    std::vector<RegionSet> effective_subdivisions;  // d^e chosen at each event
};

/// Uncertainty-region computation fused with early pruning: subtract areas
/// in span order; whenever the running region splits, keep the piece
/// containing l_r, prune the object if s no longer meets it, and drop the
/// subdivisions of s that no longer meet it.  `s` must be nonempty.
EarlyPruneResult build_with_early_prune(const MovingObject& o, const Ring& circle,
                                        std::span<const RestrictedArea* const> areas,
                                        const RegionSet& s, const FetchHook& on_fetch = {});

}  // namespace cspq

#endif  // CSPQ_UNCERTAINTY_HPP
