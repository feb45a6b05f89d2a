#include "cspq/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cspq {

struct RTree::Node {
    bool leaf = true;
    std::vector<Mbr> boxes;
    std::vector<std::unique_ptr<Node>> children;  // internal nodes
    std::vector<ObjectId> ids;                    // leaves

    [[nodiscard]] std::size_t count() const noexcept { return boxes.size(); }

    [[nodiscard]] Mbr merged() const {
        Mbr m = boxes.front();
        for (std::size_t i = 1; i < boxes.size(); ++i) m = m.merged(boxes[i]);
        return m;
    }
};

namespace {

double enlargement(const Mbr& box, const Mbr& extra) {
    return box.merged(extra).area() - box.area();
}

}  // namespace

RTree::RTree(int fanout) : fanout_(fanout) {
    if (fanout < 4) throw geometry_error("r-tree fanout must be at least 4");
}

RTree::RTree(RTree&&) noexcept = default;
RTree& RTree::operator=(RTree&&) noexcept = default;
RTree::~RTree() = default;

std::size_t RTree::size() const noexcept { return count_; }
int RTree::fanout() const noexcept { return fanout_; }

namespace {

// Quadratic split: pick the pair wasting the most area as seeds, then assign
// the rest by least enlargement (forcing assignment when a group must take
// everything left to reach min fill).
template <typename Payload>
void quadratic_split(std::vector<Mbr>& boxes, std::vector<Payload>& payloads, int min_fill,
                     std::vector<Mbr>& out_boxes, std::vector<Payload>& out_payloads) {
    const std::size_t n = boxes.size();
    std::size_t seed_a = 0, seed_b = 1;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dead = boxes[i].merged(boxes[j]).area() - boxes[i].area() - boxes[j].area();
            if (dead > worst) {
                worst = dead;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    std::vector<Mbr> a_boxes, b_boxes;
    std::vector<Payload> a_payloads, b_payloads;
    Mbr a_cover = boxes[seed_a], b_cover = boxes[seed_b];
    a_boxes.push_back(boxes[seed_a]);
    a_payloads.push_back(std::move(payloads[seed_a]));
    b_boxes.push_back(boxes[seed_b]);
    b_payloads.push_back(std::move(payloads[seed_b]));

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (i != seed_a && i != seed_b) rest.push_back(i);

    std::size_t remaining = rest.size();
    for (std::size_t idx : rest) {
        const std::size_t need_a = a_boxes.size() + remaining;
        const std::size_t need_b = b_boxes.size() + remaining;
        bool to_a;
        if (need_a <= static_cast<std::size_t>(min_fill)) {
            to_a = true;
        } else if (need_b <= static_cast<std::size_t>(min_fill)) {
            to_a = false;
        } else {
            const double ea = enlargement(a_cover, boxes[idx]);
            const double eb = enlargement(b_cover, boxes[idx]);
            to_a = ea < eb || (ea == eb && a_cover.area() <= b_cover.area());
        }
        if (to_a) {
            a_cover = a_cover.merged(boxes[idx]);
            a_boxes.push_back(boxes[idx]);
            a_payloads.push_back(std::move(payloads[idx]));
        } else {
            b_cover = b_cover.merged(boxes[idx]);
            b_boxes.push_back(boxes[idx]);
            b_payloads.push_back(std::move(payloads[idx]));
        }
        --remaining;
    }

    boxes = std::move(a_boxes);
    payloads = std::move(a_payloads);
    out_boxes = std::move(b_boxes);
    out_payloads = std::move(b_payloads);
}

}  // namespace

void RTree::insert(const Mbr& box, ObjectId id) {
    insert_entry(box, id, 0);
    ++count_;
}

void RTree::insert_entry(const Mbr& box, ObjectId id, int /*target_level*/) {
    if (!root_) {
        root_ = std::make_unique<Node>();
        root_->leaf = true;
    }
    const int min_fill = std::max(2, fanout_ * 2 / 5);

    // descend by least area enlargement
    std::vector<Node*> path;
    Node* node = root_.get();
    while (!node->leaf) {
        path.push_back(node);
        std::size_t best = 0;
        double best_enl = std::numeric_limits<double>::infinity();
        double best_area = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < node->count(); ++i) {
            const double enl = enlargement(node->boxes[i], box);
            const double area = node->boxes[i].area();
            if (enl < best_enl || (enl == best_enl && area < best_area)) {
                best = i;
                best_enl = enl;
                best_area = area;
            }
        }
        node->boxes[best] = node->boxes[best].merged(box);
        node = node->children[best].get();
    }

    node->boxes.push_back(box);
    node->ids.push_back(id);

    // split upward while overflowing
    Node* cur = node;
    while (cur->count() > static_cast<std::size_t>(fanout_)) {
        auto sibling = std::make_unique<Node>();
        sibling->leaf = cur->leaf;
        if (cur->leaf) {
            quadratic_split(cur->boxes, cur->ids, min_fill, sibling->boxes, sibling->ids);
        } else {
            quadratic_split(cur->boxes, cur->children, min_fill, sibling->boxes, sibling->children);
        }

        if (path.empty()) {
            auto new_root = std::make_unique<Node>();
            new_root->leaf = false;
            new_root->boxes.push_back(cur->merged());
            new_root->boxes.push_back(sibling->merged());
            new_root->children.push_back(std::move(root_));
            new_root->children.push_back(std::move(sibling));
            root_ = std::move(new_root);
            return;
        }

        Node* parent = path.back();
        path.pop_back();
        for (std::size_t i = 0; i < parent->count(); ++i) {
            if (parent->children[i].get() == cur) {
                parent->boxes[i] = cur->merged();
                break;
            }
        }
        parent->boxes.push_back(sibling->merged());
        parent->children.push_back(std::move(sibling));
        cur = parent;
    }

    // tighten ancestor boxes
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        Node* parent = *it;
        for (std::size_t i = 0; i < parent->count(); ++i) {
            Node* child = parent->children[i].get();
            parent->boxes[i] = child->merged();
        }
    }
}

namespace {

// Node is a private nested type; deduced parameters keep these helpers
// file-local without naming it.
void collect_leaf_entries(auto* node, std::vector<std::pair<Mbr, ObjectId>>& out) {
    if (node->leaf) {
        for (std::size_t i = 0; i < node->count(); ++i) out.emplace_back(node->boxes[i], node->ids[i]);
        return;
    }
    for (auto& c : node->children) collect_leaf_entries(c.get(), out);
}

// Returns true when `node` underflowed and should be removed by the parent.
bool erase_recursive(auto* node, const Mbr& box, ObjectId id,
                     std::vector<std::pair<Mbr, ObjectId>>& orphans, int min_fill, bool& found) {
    if (node->leaf) {
        for (std::size_t i = 0; i < node->count(); ++i) {
            if (node->ids[i] == id) {
                node->boxes.erase(node->boxes.begin() + static_cast<std::ptrdiff_t>(i));
                node->ids.erase(node->ids.begin() + static_cast<std::ptrdiff_t>(i));
                found = true;
                return node->count() < static_cast<std::size_t>(min_fill);
            }
        }
        return false;
    }
    for (std::size_t i = 0; i < node->count(); ++i) {
        if (!node->boxes[i].intersects(box)) continue;
        bool child_found = false;
        const bool underflow =
            erase_recursive(node->children[i].get(), box, id, orphans, min_fill, child_found);
        if (!child_found) continue;
        found = true;
        if (underflow) {
            collect_leaf_entries(node->children[i].get(), orphans);
            node->boxes.erase(node->boxes.begin() + static_cast<std::ptrdiff_t>(i));
            node->children.erase(node->children.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            node->boxes[i] = node->children[i]->merged();
        }
        return node->count() < static_cast<std::size_t>(min_fill);
    }
    return false;
}

}  // namespace

void RTree::erase(const Mbr& box, ObjectId id) {
    const int min_fill = std::max(2, fanout_ * 2 / 5);
    bool found = false;
    std::vector<std::pair<Mbr, ObjectId>> orphans;
    if (root_) erase_recursive(root_.get(), box, id, orphans, min_fill, found);
    if (!found) throw not_found_error("r-tree entry not found: id " + std::to_string(id));
    --count_;
    if (root_) {
        if (root_->count() == 0) {
            root_.reset();
        } else {
            while (!root_->leaf && root_->count() == 1)
                root_ = std::move(root_->children[0]);
        }
    }
    for (auto& [b, i] : orphans) insert_entry(b, i, 0);
}

void RTree::search(const Mbr& window, AccessCounters& counters, std::vector<ObjectId>& out) const {
    if (!root_) return;
    std::vector<const Node*> stack{root_.get()};
    while (!stack.empty()) {
        const Node* node = stack.back();
        stack.pop_back();
        ++counters.node_reads;
        for (std::size_t i = 0; i < node->count(); ++i) {
            if (!node->boxes[i].intersects(window)) continue;
            if (node->leaf) out.push_back(node->ids[i]);
            else stack.push_back(node->children[i].get());
        }
    }
}

namespace {

void validate_node(const auto* node, int fanout, bool is_root, int depth, int& leaf_depth,
                   std::size_t& entries) {
    if (node->count() > static_cast<std::size_t>(fanout))
        throw geometry_error("r-tree node overflow");
    if (!is_root && node->count() < 1) throw geometry_error("r-tree empty non-root node");
    if (node->leaf) {
        if (node->ids.size() != node->boxes.size()) throw geometry_error("r-tree leaf arity");
        if (leaf_depth == -1) leaf_depth = depth;
        else if (leaf_depth != depth) throw geometry_error("r-tree leaves at differing depths");
        entries += node->count();
        return;
    }
    if (node->children.size() != node->boxes.size()) throw geometry_error("r-tree node arity");
    for (std::size_t i = 0; i < node->count(); ++i) {
        const auto* child = node->children[i].get();
        const Mbr tight = child->merged();
        if (!(node->boxes[i].contains(tight)))
            throw geometry_error("r-tree child box not contained in parent entry");
        validate_node(child, fanout, false, depth + 1, leaf_depth, entries);
    }
}

}  // namespace

void RTree::validate() const {
    std::size_t entries = 0;
    int leaf_depth = -1;
    if (root_) validate_node(root_.get(), fanout_, true, 0, leaf_depth, entries);
    if (entries != count_) throw geometry_error("r-tree entry count mismatch");
}

RTree build_object_index(std::span<const MovingObject> objects, int fanout) {
    RTree tree(fanout);
    for (const auto& o : objects) tree.insert(o.square(), o.id);
    return tree;
}

RTree build_area_index(std::span<const RestrictedArea> areas, int fanout) {
    RTree tree(fanout);
    for (const auto& a : areas) tree.insert(a.mbr, a.id);
    return tree;
}

void update_object(RTree& tree, const MovingObject& before, const Point& new_l_r) {
    tree.erase(before.square(), before.id);
    MovingObject moved = before;
    moved.l_r = new_l_r;
    tree.insert(moved.square(), moved.id);
}

}  // namespace cspq
