#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "pipesearch/problem.hpp"
#include "pipesearch/rng.hpp"
#include "pipesearch/tree.hpp"

namespace ps::mcts {

struct SearchBudget {
    std::int64_t max_playouts = 1;  // counted in completed playouts
};

// A unit of pipeline work: one selected path and its evolving state. Owned by
// exactly one stage invocation at a time; transferable between threads at
// stage boundaries. The per-playout generator is derived from
// (root seed, token id, issue ordinal) so streams do not depend on scheduling.
struct Token {
    int id = 0;
    std::int64_t ordinal = 0;
    tree::Node* v = nullptr;
    std::unique_ptr<problem::SearchState> s;
    double delta = 0.0;
    SplitMix64 rng;
};

// Optional first-hit stop condition checked after each evaluation.
struct StopTarget {
    enum class Kind { none, cost_at_most, reward_at_least };
    Kind kind = Kind::none;
    std::int64_t cost = 0;
    double reward = 0.0;
};

// Shared, thread-safe bookkeeping for one search run: the tree, the root
// state prototype, UCT constant, seed derivation and best-so-far tracking.
class SearchContext {
public:
    SearchContext(tree::SearchTree& tree, const problem::SearchState& root_state, double cp,
                  std::uint64_t seed, StopTarget target = {})
        : tree_(&tree), root_state_(&root_state), cp_(cp), seed_(seed), target_(target) {}

    tree::SearchTree& tree() const { return *tree_; }
    double cp() const { return cp_; }
    std::uint64_t seed() const { return seed_; }

    // Resets a token onto the root for a new playout.
    void issue(Token& t, int id, std::int64_t ordinal) const;

    // Records the playout outcome reached by a token; sets the stop flag when
    // the target is met.
    void record(const Token& t);

    bool stop_requested() const { return stop_.load(std::memory_order_acquire); }
    void request_stop() { stop_.store(true, std::memory_order_release); }

    std::int64_t best_cost() const { return best_cost_.load(std::memory_order_acquire); }
    double best_reward() const;
    std::vector<problem::Move> best_path() const;
    bool target_hit() const { return target_hit_.load(std::memory_order_acquire); }

private:
    tree::SearchTree* tree_;
    const problem::SearchState* root_state_;
    double cp_;
    std::uint64_t seed_;
    StopTarget target_;

    std::atomic<bool> stop_{false};
    std::atomic<bool> target_hit_{false};
    std::atomic<std::int64_t> best_cost_{std::numeric_limits<std::int64_t>::max()};
    mutable std::mutex best_mu_;
    double best_reward_ = 0.0;
    std::vector<problem::Move> best_path_;
};

// The five stage functions. select/expand/random_simulation/evaluation map a
// token to a token; backup consumes it (v is left null).
void select(Token& t, const SearchContext& ctx);
void expand(Token& t);
void random_simulation(Token& t);
void evaluation(Token& t);
void backup(Token& t);

// Root child with the highest visit count; ties broken by lowest move label.
// Returns -1 when the root has no published children.
int best_child_move(const tree::Node& root);

struct SearchResult {
    int best_move = -1;
    std::int64_t playouts = 0;
    std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
    double best_reward = 0.0;
    std::vector<problem::Move> best_path;
    bool target_hit = false;
    std::unique_ptr<tree::SearchTree> tree;
};

// Serial MCTS: runs select/expand/random_simulation/evaluation/backup with a
// single token until the budget is spent (or the target is hit).
SearchResult uct_search(const problem::SearchState& root_state, SearchBudget budget, double cp,
                        std::uint64_t seed, StopTarget target = {});

}  // namespace ps::mcts
