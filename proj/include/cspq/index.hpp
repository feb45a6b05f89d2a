#ifndef CSPQ_INDEX_HPP
#define CSPQ_INDEX_HPP

/// Twin R-tree support: one tree indexes moving objects by their 2tau
/// squares, the other indexes restricted-area MBRs.  Window searches return
/// entries whose rectangle intersects the window (closed-rectangle overlap,
/// matching the candidate definitions), and count visited nodes as the I/O
/// proxy.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cspq/model.hpp"

namespace cspq {

class not_found_error : public std::runtime_error {
public:
    explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

/// I/O proxy counters.  node_reads counts R-tree nodes visited; record
/// fetches count payload materializations (object PDF records, area
/// polygons).
struct AccessCounters {
    std::uint64_t node_reads = 0;
    std::uint64_t record_fetches = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return node_reads + record_fetches; }
    AccessCounters& operator+=(const AccessCounters& o) noexcept {
        node_reads += o.node_reads;
        record_fetches += o.record_fetches;
        return *this;
    }
};

/// Guttman R-tree (least-area-enlargement insertion, quadratic split).
class RTree {
public:
    explicit RTree(int fanout = 50);
    RTree(RTree&&) noexcept;
    RTree& operator=(RTree&&) noexcept;
    ~RTree();

    void insert(const Mbr& box, ObjectId id);
    /// Removes the entry (box, id); throws not_found_error if absent.
    void erase(const Mbr& box, ObjectId id);

    /// Ids of entries whose box intersects `window`; increments
    /// counters.node_reads once per node visited (root included).
    void search(const Mbr& window, AccessCounters& counters, std::vector<ObjectId>& out) const;

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] int fanout() const noexcept;

    /// Structural invariant walk (containment, entry counts, uniform leaf
    /// depth); throws geometry_error on violation.
    void validate() const;

private:
    struct Node;
    std::unique_ptr<Node> root_;
    int fanout_ = 50;
    std::size_t count_ = 0;

    void insert_entry(const Mbr& box, ObjectId id, int target_level);
};

/// Index of moving objects by their 2tau squares.
RTree build_object_index(std::span<const MovingObject> objects, int fanout = 50);
/// Index of restricted areas by their MBRs.
RTree build_area_index(std::span<const RestrictedArea> areas, int fanout = 50);

/// Reflect a location report: replaces the object's 2tau square.
void update_object(RTree& tree, const MovingObject& before, const Point& new_l_r);

}  // namespace cspq

#endif  // CSPQ_INDEX_HPP
