#include "pipesearch/tree.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ps::tree {

bool Node::init(std::span<const int> moves) {
    if (isparent_.exchange(true)) {  // [A] single winner, losers leave
        return false;
    }
    const int count = static_cast<int>(moves.size());
    children_ = std::make_unique<Node[]>(count);  // [B]
    for (int i = 0; i < count; ++i) {
        children_[i].move_ = moves[i];
        children_[i].parent_ = this;
    }
    nchildren_ = count;
    untriedmoves_.store(count);                                  // [C]
    isexpandable_.store(true, std::memory_order_release);        // [D1]
    return true;
}

Node* Node::add_child() {
    if (!isexpandable_.load(std::memory_order_acquire)) {  // [D2]
        return this;
    }
    // fetch_sub returns the prior value; idx is the decremented one, so the
    // children are handed out from index count-1 down to 0. [E]
    const std::int64_t idx = untriedmoves_.fetch_sub(1) - 1;
    if (idx == 0) {
        isfullyexpanded_.store(true);
    }
    if (idx < 0) {
        return this;
    }
    return &children_[idx];
}

double Node::uct_value(double cp) const {
    const std::int64_t w = w_.load(std::memory_order_seq_cst);          // [F1]
    const std::int64_t n = n_.load(std::memory_order_seq_cst);          // [F2]
    const std::int64_t np = parent_->n_.load(std::memory_order_seq_cst);
    if (n == 0) {
        return std::numeric_limits<double>::infinity();  // first-play urgency
    }
    const double mean =
        (static_cast<double>(w) / static_cast<double>(n)) / static_cast<double>(kRewardScale);
    const double log_np = np > 0 ? std::log(static_cast<double>(np)) : 0.0;
    return mean + cp * std::sqrt(log_np / static_cast<double>(n));
}

void Node::update(double delta) {
    w_.fetch_add(std::llround(delta * static_cast<double>(kRewardScale)),
                 std::memory_order_seq_cst);  // [G1]
    n_.fetch_add(1, std::memory_order_seq_cst);  // [G2]
}

namespace {

void dump_node(const Node& node, int depth, std::ostringstream& os) {
    for (int i = 0; i < depth; ++i) os << "  ";
    os << node.move() << " n=" << node.visits() << " w=" << node.reward_raw()
       << " fe=" << (node.is_fully_expanded() ? 1 : 0) << "\n";
    if (node.expandable()) {
        for (int i = 0; i < node.num_children(); ++i) {
            dump_node(*node.child(i), depth + 1, os);
        }
    }
}

}  // namespace

std::string SearchTree::dump() const {
    std::ostringstream os;
    dump_node(*root_, 0, os);
    return os.str();
}

}  // namespace ps::tree
