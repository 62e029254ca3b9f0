#include "pipesearch/dag.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace ps::poly {

std::int32_t ExpressionDag::check(std::int32_t id) const {
    if (id < 0 || id >= static_cast<std::int32_t>(nodes_.size())) {
        throw std::invalid_argument("ExpressionDag: operand out of range");
    }
    return id;
}

std::int32_t ExpressionDag::add_constant(const BigInt& v) {
    std::string key = v.to_decimal();
    auto it = const_cache_.find(key);
    if (it != const_cache_.end()) return it->second;
    std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    DagNode n;
    n.kind = NodeKind::constant;
    n.value = v;
    nodes_.push_back(std::move(n));
    const_cache_.emplace(std::move(key), id);
    return id;
}

std::int32_t ExpressionDag::add_variable(int var) {
    auto it = var_cache_.find(var);
    if (it != var_cache_.end()) return it->second;
    std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    DagNode n;
    n.kind = NodeKind::variable;
    n.var = var;
    nodes_.push_back(std::move(n));
    var_cache_.emplace(var, id);
    return id;
}

std::int32_t ExpressionDag::add_add(std::int32_t a, std::int32_t b) {
    DagNode n;
    n.kind = NodeKind::add;
    n.a = check(a);
    n.b = check(b);
    nodes_.push_back(std::move(n));
    return static_cast<std::int32_t>(nodes_.size()) - 1;
}

std::int32_t ExpressionDag::add_multiply(std::int32_t a, std::int32_t b) {
    DagNode n;
    n.kind = NodeKind::multiply;
    n.a = check(a);
    n.b = check(b);
    nodes_.push_back(std::move(n));
    return static_cast<std::int32_t>(nodes_.size()) - 1;
}

namespace {

// One Horner level: group the terms by the exponent of the factored variable.
// Sub-polynomials keep canonical term order, so rebuilt sums are deterministic.
std::int32_t transform_terms(ExpressionDag& dag, const std::vector<Monomial>& terms,
                             const std::vector<int>& order, std::size_t order_pos);

// acc * v^k with every multiplication materialized.
std::int32_t multiply_by_power(ExpressionDag& dag, std::int32_t acc, int var, int k) {
    std::int32_t v = dag.add_variable(var);
    for (int i = 0; i < k; ++i) acc = dag.add_multiply(acc, v);
    return acc;
}

// Trailing power application: 1 * v^k collapses to the bare power chain.
std::int32_t apply_trailing_power(ExpressionDag& dag, std::int32_t acc, int var, int k) {
    if (dag.is_constant_one(acc)) {
        std::int32_t v = dag.add_variable(var);
        std::int32_t out = v;
        for (int i = 1; i < k; ++i) out = dag.add_multiply(out, v);
        return out;
    }
    return multiply_by_power(dag, acc, var, k);
}

std::int32_t transform_terms(ExpressionDag& dag, const std::vector<Monomial>& terms,
                             const std::vector<int>& order, std::size_t order_pos) {
    if (terms.empty()) return dag.add_constant(BigInt(0));
    if (terms.size() == 1 && terms[0].exponents.empty()) {
        return dag.add_constant(terms[0].coefficient);
    }

    // next scheme variable that actually occurs in these terms
    int var = -1;
    while (order_pos < order.size()) {
        int candidate = order[order_pos++];
        bool occurs = std::any_of(terms.begin(), terms.end(), [&](const Monomial& m) {
            return m.exponents.count(candidate) != 0;
        });
        if (occurs) {
            var = candidate;
            break;
        }
    }
    if (var < 0) {
        throw std::invalid_argument("horner_transform: incomplete order");
    }

    // group by exponent of var, descending, preserving term order inside groups
    std::map<int, std::vector<Monomial>, std::greater<int>> groups;
    for (const auto& m : terms) {
        auto it = m.exponents.find(var);
        int e = it == m.exponents.end() ? 0 : it->second;
        Monomial stripped = m;
        stripped.exponents.erase(var);
        groups[e].push_back(std::move(stripped));
    }

    auto git = groups.begin();
    int prev_exp = git->first;
    std::int32_t acc = transform_terms(dag, git->second, order, order_pos);
    for (++git; git != groups.end(); ++git) {
        acc = multiply_by_power(dag, acc, var, prev_exp - git->first);
        std::int32_t rhs = transform_terms(dag, git->second, order, order_pos);
        acc = dag.add_add(acc, rhs);
        prev_exp = git->first;
    }
    if (prev_exp > 0) acc = apply_trailing_power(dag, acc, var, prev_exp);
    return acc;
}

}  // namespace

ExpressionDag horner_transform(const Polynomial& p, const HornerScheme& scheme) {
    // order must be a complete permutation of 0..nvars-1
    if (static_cast<int>(scheme.order.size()) != p.nvars) {
        throw std::invalid_argument("horner_transform: incomplete order");
    }
    std::vector<bool> seen(p.nvars, false);
    for (int v : scheme.order) {
        if (v < 0 || v >= p.nvars || seen[v]) {
            throw std::invalid_argument("horner_transform: order is not a permutation");
        }
        seen[v] = true;
    }

    ExpressionDag dag;
    dag.set_root(transform_terms(dag, p.terms, scheme.order, 0));
    return dag;
}

namespace {

std::string node_key(const DagNode& n, const std::vector<std::int32_t>& remap) {
    switch (n.kind) {
        case NodeKind::constant:
            return "c" + n.value.to_decimal();
        case NodeKind::variable:
            return "v" + std::to_string(n.var);
        case NodeKind::add:
            return "+" + std::to_string(remap[n.a]) + "," + std::to_string(remap[n.b]);
        case NodeKind::multiply:
            return "*" + std::to_string(remap[n.a]) + "," + std::to_string(remap[n.b]);
    }
    return {};
}

std::vector<bool> reachable_set(const ExpressionDag& dag) {
    const auto& nodes = dag.nodes();
    std::vector<bool> reach(nodes.size(), false);
    std::vector<std::int32_t> stack(dag.roots().begin(), dag.roots().end());
    while (!stack.empty()) {
        std::int32_t id = stack.back();
        stack.pop_back();
        if (id < 0 || reach[id]) continue;
        reach[id] = true;
        const DagNode& n = nodes[id];
        if (n.kind == NodeKind::add || n.kind == NodeKind::multiply) {
            stack.push_back(n.a);
            stack.push_back(n.b);
        }
    }
    return reach;
}

}  // namespace

ExpressionDag cse(const ExpressionDag& dag) {
    const auto& nodes = dag.nodes();
    std::vector<bool> reach = reachable_set(dag);

    ExpressionDag out;
    std::vector<std::int32_t> remap(nodes.size(), -1);
    std::unordered_map<std::string, std::int32_t> dedup;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!reach[i]) continue;
        const DagNode& n = nodes[i];
        std::string key = node_key(n, remap);
        auto it = dedup.find(key);
        if (it != dedup.end()) {
            remap[i] = it->second;
            continue;
        }
        std::int32_t id;
        switch (n.kind) {
            case NodeKind::constant:
                id = out.add_constant(n.value);
                break;
            case NodeKind::variable:
                id = out.add_variable(n.var);
                break;
            case NodeKind::add:
                id = out.add_add(remap[n.a], remap[n.b]);
                break;
            case NodeKind::multiply:
            default:
                id = out.add_multiply(remap[n.a], remap[n.b]);
                break;
        }
        remap[i] = id;
        dedup.emplace(std::move(key), id);
    }
    for (std::int32_t r : dag.roots()) out.add_root(remap[r]);
    return out;
}

OpCount count_ops(const ExpressionDag& dag) {
    std::vector<bool> reach = reachable_set(dag);
    OpCount oc;
    const auto& nodes = dag.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!reach[i]) continue;
        if (nodes[i].kind == NodeKind::add) ++oc.additions;
        if (nodes[i].kind == NodeKind::multiply) ++oc.multiplications;
    }
    oc.total = oc.additions + oc.multiplications;
    return oc;
}

BigInt evaluate(const ExpressionDag& dag, const std::vector<BigInt>& point) {
    if (dag.roots().size() != 1) {
        throw std::invalid_argument("ExpressionDag evaluate: expected a single root");
    }
    const auto& nodes = dag.nodes();
    std::vector<bool> reach = reachable_set(dag);
    std::vector<BigInt> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!reach[i]) continue;
        const DagNode& n = nodes[i];
        switch (n.kind) {
            case NodeKind::constant:
                vals[i] = n.value;
                break;
            case NodeKind::variable:
                if (n.var < 0 || n.var >= static_cast<int>(point.size())) {
                    throw std::invalid_argument("evaluate: missing variable assignment");
                }
                vals[i] = point[n.var];
                break;
            case NodeKind::add:
                vals[i] = vals[n.a] + vals[n.b];
                break;
            case NodeKind::multiply:
                vals[i] = vals[n.a] * vals[n.b];
                break;
        }
    }
    return vals[dag.roots()[0]];
}

}  // namespace ps::poly
