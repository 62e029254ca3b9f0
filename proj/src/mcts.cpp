#include "pipesearch/mcts.hpp"

#include <stdexcept>

namespace ps::mcts {

void SearchContext::issue(Token& t, int id, std::int64_t ordinal) const {
    t.id = id;
    t.ordinal = ordinal;
    t.v = &tree_->root();
    t.s = root_state_->clone();
    t.delta = 0.0;
    t.rng = SplitMix64(mix64(seed_, static_cast<std::uint64_t>(id),
                             static_cast<std::uint64_t>(ordinal)));
}

void SearchContext::record(const Token& t) {
    const std::int64_t cost = t.s->terminal_cost();
    bool improved = false;
    std::int64_t prev = best_cost_.load(std::memory_order_relaxed);
    while (cost < prev) {
        if (best_cost_.compare_exchange_weak(prev, cost, std::memory_order_acq_rel)) {
            improved = true;
            break;
        }
    }
    if (improved) {
        std::lock_guard<std::mutex> lock(best_mu_);
        // keep the details only while still the best; a lower cost may have
        // been recorded between the exchange and the lock
        if (cost <= best_cost_.load(std::memory_order_relaxed)) {
            best_reward_ = t.delta;
            best_path_ = t.s->history();
        }
    }
    switch (target_.kind) {
        case StopTarget::Kind::none:
            break;
        case StopTarget::Kind::cost_at_most:
            if (cost <= target_.cost) {
                target_hit_.store(true, std::memory_order_release);
                request_stop();
            }
            break;
        case StopTarget::Kind::reward_at_least:
            if (t.delta >= target_.reward - 1e-12) {
                target_hit_.store(true, std::memory_order_release);
                request_stop();
            }
            break;
    }
}

double SearchContext::best_reward() const {
    std::lock_guard<std::mutex> lock(best_mu_);
    return best_reward_;
}

std::vector<problem::Move> SearchContext::best_path() const {
    std::lock_guard<std::mutex> lock(best_mu_);
    return best_path_;
}

void select(Token& t, const SearchContext& ctx) {
    while (t.v->is_fully_expanded()) {
        tree::Node* best = nullptr;
        double best_value = 0.0;
        for (int i = 0; i < t.v->num_children(); ++i) {
            tree::Node* child = t.v->child(i);
            const double value = child->uct_value(ctx.cp());
            if (best == nullptr || value > best_value) {  // ties keep the lowest index
                best = child;
                best_value = value;
            }
        }
        if (best == nullptr) break;
        t.v = best;
        t.s->set_move(best->move());
    }
}

void expand(Token& t) {
    if (t.s->is_terminal()) return;
    std::vector<problem::Move> moves = t.s->untried_moves();
    shuffle(moves, t.rng);
    t.v->init(moves);
    tree::Node* child = t.v->add_child();
    if (child != t.v) {
        t.v = child;
        t.s->set_move(child->move());
    }
}

void random_simulation(Token& t) {
    while (!t.s->is_terminal()) {
        std::vector<problem::Move> moves = t.s->untried_moves();
        t.s->set_move(moves[t.rng.below(moves.size())]);
    }
}

void evaluation(Token& t) {
    t.delta = t.s->evaluate();
}

void backup(Token& t) {
    while (t.v != nullptr) {
        t.v->update(t.delta);
        t.v = t.v->parent();
    }
}

int best_child_move(const tree::Node& root) {
    if (!root.expandable()) return -1;
    int best_move = -1;
    std::int64_t best_visits = -1;
    for (int i = 0; i < root.num_children(); ++i) {
        const tree::Node* child = root.child(i);
        const std::int64_t n = child->visits();
        if (n > best_visits || (n == best_visits && child->move() < best_move)) {
            best_visits = n;
            best_move = child->move();
        }
    }
    return best_move;
}

SearchResult uct_search(const problem::SearchState& root_state, SearchBudget budget, double cp,
                        std::uint64_t seed, StopTarget target) {
    if (budget.max_playouts < 1) {
        throw std::invalid_argument("uct_search: budget must be >= 1 playout");
    }
    if (root_state.is_terminal()) {
        throw std::invalid_argument("uct_search: root state is terminal");
    }

    auto tree = std::make_unique<tree::SearchTree>();
    SearchContext ctx(*tree, root_state, cp, seed, target);

    Token token;
    std::int64_t completed = 0;
    for (std::int64_t i = 0; i < budget.max_playouts; ++i) {
        if (ctx.stop_requested()) break;
        ctx.issue(token, 0, i);
        select(token, ctx);
        expand(token);
        random_simulation(token);
        evaluation(token);
        ctx.record(token);
        backup(token);
        ++completed;
    }

    SearchResult result;
    result.best_move = best_child_move(tree->root());
    result.playouts = completed;
    result.best_cost = ctx.best_cost();
    result.best_reward = ctx.best_reward();
    result.best_path = ctx.best_path();
    result.target_hit = ctx.target_hit();
    result.tree = std::move(tree);
    return result;
}

}  // namespace ps::mcts
