#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace ps::tree {

// Rewards are stored as fixed-point integers so the accumulator stays an
// atomic integer while representing reward values in [0, 1].
inline constexpr std::int64_t kRewardScale = 1 << 16;

// Lock-free search tree node. All operations may be called concurrently from
// any number of threads:
//
//  * init() uses an exchange on `isparent` as a single-winner latch; only the
//    winner allocates and links the children array, then publishes it with a
//    release store to `isexpandable`. Losers return without side effects.
//  * add_child() acquire-loads `isexpandable` before touching the children
//    array and claims children by an atomic decrement of `untriedmoves`, so
//    each child is handed out exactly once across all threads.
//  * update()/uct_value() access w and n with sequentially consistent
//    ordering; no update is ever lost and readers never see w/n pairs out of
//    the single total order.
class Node {
public:
    Node() = default;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    int move() const { return move_; }
    Node* parent() const { return parent_; }

    // Allocates and publishes the children array. Exactly one concurrent
    // caller returns true (the one that performed the initialization).
    bool init(std::span<const int> moves);

    // Returns an unclaimed child, or this node when the children are not yet
    // published or all of them have been handed out. Marks the node fully
    // expanded when the last child is claimed.
    Node* add_child();

    bool is_fully_expanded() const { return isfullyexpanded_.load(); }

    // UCT score as seen by the parent's argmax: mean reward plus exploration
    // radius. Unvisited nodes score +infinity; a zero parent count contributes
    // a zero logarithm. Requires a parent.
    double uct_value(double cp) const;

    // w += delta (fixed point), n += 1, both sequentially consistent.
    void update(double delta);

    std::int64_t visits() const { return n_.load(std::memory_order_seq_cst); }
    std::int64_t reward_raw() const { return w_.load(std::memory_order_seq_cst); }

    // valid after isexpandable() is observed true
    bool expandable() const { return isexpandable_.load(std::memory_order_acquire); }
    int num_children() const { return nchildren_; }
    Node* child(int i) const { return &children_[i]; }

private:
    friend class SearchTree;

    int move_ = -1;
    Node* parent_ = nullptr;
    std::atomic<std::int64_t> w_{0};
    std::atomic<std::int64_t> n_{0};
    std::atomic<bool> isparent_{false};
    std::atomic<std::int64_t> untriedmoves_{-1};
    std::atomic<bool> isexpandable_{false};
    std::atomic<bool> isfullyexpanded_{false};
    std::unique_ptr<Node[]> children_;
    int nchildren_ = 0;
};

// Owns the root; children arrays are owned by their parent nodes and are
// allocated once by the init() winner, never freed mid-search. Destroy only
// after all search threads have quiesced.
class SearchTree {
public:
    SearchTree() : root_(std::make_unique<Node>()) {}

    Node& root() { return *root_; }
    const Node& root() const { return *root_; }

    // Depth-first text dump, deterministic child order:
    //   "<indent><move> n=<int> w=<fixed-point> fe=<0|1>"
    std::string dump() const;

private:
    std::unique_ptr<Node> root_;
};

}  // namespace ps::tree
