#include "cspq/uncertainty.hpp"

#include <algorithm>

namespace cspq {

namespace {

ExactPoint exact_from_point(const Point& p) {
    BigRational rx = BigRational::from_double(p.x);
    BigRational ry = BigRational::from_double(p.y);
    return {rx.num() * ry.den(), ry.num() * rx.den(), rx.den() * ry.den()};
}

// Keep the subdivision containing l_r (boundary-inclusive, first match in
// the canonical part order).
RegionSet select_effective(RegionSet parts, const ExactPoint& lr, ObjectId oid) {
    for (auto& part : parts.parts) {
        if (contains_point_exact(part, lr))
            return RegionSet(std::move(part));
    }
    throw geometry_error("object " + std::to_string(oid) +
                         ": recorded location left the uncertainty region");
}

}  // namespace

std::vector<const RestrictedArea*> sort_by_span(std::vector<const RestrictedArea*> areas) {
    std::sort(areas.begin(), areas.end(), [](const RestrictedArea* a, const RestrictedArea* b) {
        const double sa = a->span(), sb = b->span();
        if (sa != sb) return sa > sb;
        return a->id < b->id;
    });
    return areas;
}

RegionSet compute_uncertainty_region(const MovingObject& o, const Ring& circle,
                                     std::span<const RestrictedArea* const> areas,
                                     const FetchHook& on_fetch) {
    const ExactPoint lr = exact_from_point(o.l_r);
    RegionSet u{PolygonWithHoles(circle)};
    for (const RestrictedArea* r : areas) {
        if (!u.mbr().expanded(1e-9).intersects(r->mbr)) continue;
        if (on_fetch) on_fetch(r->id);
        u = difference(u, RegionSet(PolygonWithHoles(r->shape)));
        if (u.size() > 1) u = select_effective(std::move(u), lr, o.id);
        if (u.empty())
            throw geometry_error("object " + std::to_string(o.id) +
                                 ": uncertainty region vanished");
    }
    return u;
}

EarlyPruneResult build_with_early_prune(const MovingObject& o, const Ring& circle,
                                        std::span<const RestrictedArea* const> areas,
                                        const RegionSet& s, const FetchHook& on_fetch) {
    EarlyPruneResult res;
    res.s_kept = s;
    const ExactPoint lr = exact_from_point(o.l_r);
    res.u = RegionSet{PolygonWithHoles(circle)};

    for (const RestrictedArea* r : areas) {
        if (!res.u.mbr().expanded(1e-9).intersects(r->mbr)) continue;
        if (on_fetch) on_fetch(r->id);
        res.u = difference(res.u, RegionSet(PolygonWithHoles(r->shape)));
        ++res.areas_applied;
        if (res.u.size() <= 1) {
            if (res.u.empty())
                throw geometry_error("object " + std::to_string(o.id) +
                                     ": uncertainty region vanished");
            continue;
        }

        // subdivision event: select d^e, then test s against it
        ++res.subdivision_events;
        res.u = select_effective(std::move(res.u), lr, o.id);
        res.effective_subdivisions.push_back(res.u);

        std::vector<PolygonWithHoles> kept;
        kept.reserve(res.s_kept.parts.size());
        for (auto& part : res.s_kept.parts) {
            if (interiors_overlap(res.u, RegionSet(part)))
                kept.push_back(std::move(part));
        }
        res.s_kept.parts = std::move(kept);
        if (res.s_kept.empty()) {
            res.pruned = true;
            return res;
        }
    }
    return res;
}

}  // namespace cspq
