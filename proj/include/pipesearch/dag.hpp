#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pipesearch/bigint.hpp"
#include "pipesearch/poly.hpp"

namespace ps::poly {

enum class NodeKind : std::uint8_t { constant, variable, add, multiply };

struct DagNode {
    NodeKind kind = NodeKind::constant;
    std::int32_t a = -1;  // left operand (add/multiply)
    std::int32_t b = -1;  // right operand
    std::int32_t var = -1;
    BigInt value;
};

struct OpCount {
    std::int64_t multiplications = 0;
    std::int64_t additions = 0;
    std::int64_t total = 0;
    bool operator==(const OpCount&) const = default;
};

// Operands always reference earlier nodes, so node order is topological.
// Constant and variable leaves are deduplicated at construction; add/multiply
// nodes are appended as-is (sharing those is cse()'s job).
class ExpressionDag {
public:
    std::int32_t add_constant(const BigInt& v);
    std::int32_t add_variable(int var);
    std::int32_t add_add(std::int32_t a, std::int32_t b);
    std::int32_t add_multiply(std::int32_t a, std::int32_t b);

    bool is_constant_one(std::int32_t id) const {
        return nodes_[id].kind == NodeKind::constant && nodes_[id].value.is_one();
    }

    const std::vector<DagNode>& nodes() const { return nodes_; }
    const std::vector<std::int32_t>& roots() const { return roots_; }
    void set_root(std::int32_t id) { roots_.assign(1, id); }
    void add_root(std::int32_t id) { roots_.push_back(id); }

private:
    std::int32_t check(std::int32_t id) const;

    std::vector<DagNode> nodes_;
    std::vector<std::int32_t> roots_;
    std::map<std::string, std::int32_t> const_cache_;
    std::map<int, std::int32_t> var_cache_;
};

// Horner scheme: the order in which variables are factored out, outermost first.
struct HornerScheme {
    std::vector<int> order;
};

// Recursively factors p by scheme.order, treating later variables as constants
// inside each coefficient. Requires a complete permutation of 0..nvars-1.
ExpressionDag horner_transform(const Polynomial& p, const HornerScheme& scheme);

// Structural hashing: merges identical subtrees so each distinct subexpression
// occupies one node. Drops nodes unreachable from the roots.
ExpressionDag cse(const ExpressionDag& dag);

// Counts add/multiply nodes reachable from the roots, each exactly once.
OpCount count_ops(const ExpressionDag& dag);

// Exact value of the single root at an integer point.
BigInt evaluate(const ExpressionDag& dag, const std::vector<BigInt>& point);

}  // namespace ps::poly
