#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "pipesearch/dag.hpp"
#include "pipesearch/poly.hpp"
#include "pipesearch/rng.hpp"

using namespace ps;
using namespace ps::poly;

namespace {

// Independent op-count oracle: recursive walk from the roots, visiting each
// node id once, tallying adds and multiplies.
OpCount oracle_count(const ExpressionDag& dag) {
    std::set<std::int32_t> seen;
    OpCount oc;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        if (!seen.insert(id).second) return;
        const DagNode& n = dag.nodes()[id];
        if (n.kind == NodeKind::add) {
            ++oc.additions;
            walk(n.a);
            walk(n.b);
        } else if (n.kind == NodeKind::multiply) {
            ++oc.multiplications;
            walk(n.a);
            walk(n.b);
        }
    };
    for (std::int32_t r : dag.roots()) walk(r);
    oc.total = oc.additions + oc.multiplications;
    return oc;
}

// Brute-force structural-hashing oracle: serialize every reachable subtree to
// its full expression string and count distinct op strings. That is the op
// count a perfect subexpression-sharing pass must reach.
std::int64_t oracle_distinct_ops(const ExpressionDag& dag) {
    std::map<std::int32_t, std::string> repr;
    std::set<std::int32_t> seen;
    std::set<std::string> distinct_ops;
    std::function<void(std::int32_t)> walk = [&](std::int32_t id) {
        if (repr.count(id)) return;
        const DagNode& n = dag.nodes()[id];
        switch (n.kind) {
            case NodeKind::constant:
                repr[id] = n.value.to_decimal();
                break;
            case NodeKind::variable:
                repr[id] = "v" + std::to_string(n.var);
                break;
            case NodeKind::add:
                walk(n.a);
                walk(n.b);
                repr[id] = "(" + repr[n.a] + "+" + repr[n.b] + ")";
                distinct_ops.insert(repr[id]);
                break;
            case NodeKind::multiply:
                walk(n.a);
                walk(n.b);
                repr[id] = "(" + repr[n.a] + "*" + repr[n.b] + ")";
                distinct_ops.insert(repr[id]);
                break;
        }
    };
    for (std::int32_t r : dag.roots()) walk(r);
    return static_cast<std::int64_t>(distinct_ops.size());
}

std::vector<BigInt> random_point(int nvars, SplitMix64& rng) {
    std::vector<BigInt> point;
    point.reserve(nvars);
    for (int i = 0; i < nvars; ++i) {
        point.emplace_back(static_cast<std::int64_t>(rng.next() % 19) - 9);
    }
    return point;
}

std::vector<int> random_order(int nvars, SplitMix64& rng) {
    std::vector<int> order(nvars);
    for (int i = 0; i < nvars; ++i) order[i] = i;
    shuffle(order, rng);
    return order;
}

std::vector<int> identity_order(int nvars) {
    std::vector<int> order(nvars);
    for (int i = 0; i < nvars; ++i) order[i] = i;
    return order;
}

}  // namespace

TEST_CASE("horner: dense cubic costs 2n ops") {
    Polynomial p = parse_polynomial("x^3 + 2*x^2 + 3*x + 4");
    ExpressionDag dag = horner_transform(p, HornerScheme{{0}});
    OpCount oc = count_ops(dag);
    CHECK(oc.multiplications == 3);
    CHECK(oc.additions == 3);
    CHECK(oc.total == 6);
    CHECK(oracle_count(dag) == oc);
    // value preserved at the oracle point
    CHECK(evaluate(dag, {BigInt(2)}) == BigInt(26));
}

TEST_CASE("horner: constant polynomial is a single constant node") {
    Polynomial p = parse_polynomial("7");
    ExpressionDag dag = horner_transform(p, HornerScheme{{}});
    CHECK(count_ops(dag).total == 0);
    REQUIRE(dag.nodes().size() == 1);
    CHECK(dag.nodes()[0].kind == NodeKind::constant);
    CHECK(evaluate(dag, {}) == BigInt(7));
}

TEST_CASE("horner: zero polynomial") {
    Polynomial p = parse_polynomial("x - x");
    ExpressionDag dag = horner_transform(p, HornerScheme{{}});
    CHECK(count_ops(dag).total == 0);
    CHECK(evaluate(dag, {}) == BigInt(0));
}

TEST_CASE("horner: x^2*y + x*y + y under order [x,y]") {
    Polynomial p = parse_polynomial("x^2*y + x*y + y");
    SplitMix64 rng(11);
    ExpressionDag dag = horner_transform(p, HornerScheme{identity_order(p.nvars)});
    // op count checked by the independent walker
    OpCount oc = count_ops(dag);
    CHECK(oracle_count(dag) == oc);
    CHECK(oc.total == 4);  // two chain multiplications, two additions
    for (int i = 0; i < 20; ++i) {
        auto point = random_point(p.nvars, rng);
        CHECK(evaluate(dag, point) == evaluate(p, point));
    }
}

TEST_CASE("horner: dense univariate degree n costs exactly 2n, monic included") {
    SplitMix64 rng(99);
    for (int n = 1; n <= 12; ++n) {
        std::vector<Monomial> terms;
        for (int e = 0; e <= n; ++e) {
            std::int64_t c = 1 + static_cast<std::int64_t>(rng.next() % 9);
            Monomial m;
            m.coefficient = BigInt(rng.next() % 2 == 0 ? c : -c);
            if (e > 0) m.exponents[0] = e;
            terms.push_back(std::move(m));
        }
        // force the monic case half the time
        if (n % 2 == 0) terms[0].coefficient = BigInt(1);
        Polynomial p = make_canonical({"x"}, terms);
        REQUIRE(static_cast<int>(p.terms.size()) == n + 1);
        OpCount oc = count_ops(horner_transform(p, HornerScheme{{0}}));
        CAPTURE(n);
        CHECK(oc.multiplications == n);
        CHECK(oc.additions == n);
        CHECK(oc.total == 2 * n);
    }
}

TEST_CASE("horner: sparse power gaps become multiplication chains") {
    // x^2 costs a chain of one multiplication
    ExpressionDag sq = horner_transform(parse_polynomial("x^2"), HornerScheme{{0}});
    CHECK(count_ops(sq) == OpCount{1, 0, 1});
    // 5*x^4 costs 4 multiplications
    ExpressionDag quart = horner_transform(parse_polynomial("5*x^4"), HornerScheme{{0}});
    CHECK(count_ops(quart) == OpCount{4, 0, 4});
    CHECK(evaluate(quart, {BigInt(3)}) == BigInt(405));
}

TEST_CASE("horner: incomplete or invalid orders are errors") {
    Polynomial p = parse_polynomial("x*y");
    CHECK_THROWS_AS(horner_transform(p, HornerScheme{{0}}), std::invalid_argument);
    CHECK_THROWS_AS(horner_transform(p, HornerScheme{{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(horner_transform(p, HornerScheme{{0, 2}}), std::invalid_argument);
    CHECK_NOTHROW(horner_transform(p, HornerScheme{{1, 0}}));
}

TEST_CASE("cse: shared product of equal sums") {
    // (x+y)*(x+y) built with two separate add subtrees
    ExpressionDag dag;
    std::int32_t x = dag.add_variable(0);
    std::int32_t y = dag.add_variable(1);
    std::int32_t s1 = dag.add_add(x, y);
    std::int32_t s2 = dag.add_add(x, y);
    dag.set_root(dag.add_multiply(s1, s2));
    CHECK(count_ops(dag).total == 3);

    ExpressionDag shared = cse(dag);
    CHECK(count_ops(shared).total == 2);
    CHECK(count_ops(shared).total == oracle_distinct_ops(dag));
    SplitMix64 rng(3);
    for (int i = 0; i < 10; ++i) {
        auto point = random_point(2, rng);
        CHECK(evaluate(shared, point) == evaluate(dag, point));
    }
}

TEST_CASE("cse: no repeats means identical op count") {
    Polynomial p = parse_polynomial("x^3 + 2*x^2 + 3*x + 4");
    ExpressionDag dag = horner_transform(p, HornerScheme{{0}});
    CHECK(count_ops(cse(dag)) == count_ops(dag));
}

TEST_CASE("cse: (x+y)^2 + (x+y) shares the sum") {
    ExpressionDag dag;
    std::int32_t x = dag.add_variable(0);
    std::int32_t y = dag.add_variable(1);
    std::int32_t s1 = dag.add_add(x, y);
    std::int32_t s2 = dag.add_add(x, y);
    std::int32_t sq = dag.add_multiply(s1, s2);
    std::int32_t s3 = dag.add_add(x, y);
    dag.set_root(dag.add_add(sq, s3));
    CHECK(count_ops(dag).total == 5);

    ExpressionDag shared = cse(dag);
    // by hand: T = x+y, T*T, (T*T)+T -> one mul, two adds
    OpCount oc = count_ops(shared);
    CHECK(oc.multiplications == 1);
    CHECK(oc.additions == 2);
    CHECK(oc.total == 3);
    CHECK(oc.total == oracle_distinct_ops(dag));
}

TEST_CASE("count_ops: trivial cases") {
    ExpressionDag dag;
    dag.set_root(dag.add_constant(BigInt(5)));
    CHECK(count_ops(dag) == OpCount{0, 0, 0});
}

TEST_CASE("count_ops: Eq-(3)-shaped degree-n forms count {n, n, 2n}") {
    for (int n : {1, 4, 9}) {
        std::vector<Monomial> terms;
        for (int e = 0; e <= n; ++e) {
            Monomial m;
            m.coefficient = BigInt(e + 2);
            if (e > 0) m.exponents[0] = e;
            terms.push_back(std::move(m));
        }
        Polynomial p = make_canonical({"x"}, terms);
        OpCount oc = count_ops(horner_transform(p, HornerScheme{{0}}));
        CHECK(oc == OpCount{n, n, 2 * n});
    }
}

TEST_CASE("count_ops: unreachable nodes are not counted") {
    ExpressionDag dag;
    std::int32_t x = dag.add_variable(0);
    std::int32_t y = dag.add_variable(1);
    dag.add_add(x, y);  // never rooted
    dag.set_root(dag.add_multiply(x, x));
    CHECK(count_ops(dag) == OpCount{1, 0, 1});
}

TEST_CASE("property: semantic preservation through horner + cse") {
    SplitMix64 rng(2718);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int nvars = 1 + static_cast<int>(seed % 6);
        const int want = 1 + static_cast<int>((seed * 7) % 12);
        const int nterms = nvars == 1 ? std::min(want, 4) : want;
        Polynomial p = random_polynomial(nvars, nterms, 4, seed);
        ExpressionDag dag = horner_transform(p, HornerScheme{random_order(p.nvars, rng)});
        ExpressionDag shared = cse(dag);
        CAPTURE(seed);
        // a few polynomials get the full 100-point treatment, the rest 10
        const int points = seed % 13 == 0 ? 100 : 10;
        for (int i = 0; i < points; ++i) {
            auto point = random_point(p.nvars, rng);
            BigInt direct = evaluate(p, point);
            CHECK(evaluate(dag, point) == direct);
            CHECK(evaluate(shared, point) == direct);
        }
    }
}

TEST_CASE("property: cse is monotone, idempotent and matches the oracle") {
    SplitMix64 rng(1618);
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        const int nvars = 1 + static_cast<int>(seed % 5);
        const int want = 1 + static_cast<int>(seed % 17);
        const int nterms = nvars == 1 ? std::min(want, 5) : want;
        Polynomial p = random_polynomial(nvars, nterms, 5, seed);
        ExpressionDag dag = horner_transform(p, HornerScheme{random_order(p.nvars, rng)});
        ExpressionDag once = cse(dag);
        CAPTURE(seed);
        CHECK(count_ops(once).total <= count_ops(dag).total);
        CHECK(count_ops(once).total == oracle_distinct_ops(dag));
        CHECK(count_ops(cse(once)).total == count_ops(once).total);
    }
}
