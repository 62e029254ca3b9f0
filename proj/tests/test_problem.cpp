#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "pipesearch/problem.hpp"
#include "pipesearch/rng.hpp"

using namespace ps;
using namespace ps::problem;

namespace {

// Canonical 15-variable fixture; identity-order Horner+CSE cost frozen from a
// one-time run (multiplications 1746, additions 99).
constexpr std::int64_t kFixtureBaselineOps = 1845;

HornerProblem fixture_problem() {
    return HornerProblem(poly::random_polynomial(15, 100, 5, 42));
}

}  // namespace

TEST_CASE("horner state: untried moves are the unchosen variables") {
    HornerProblem prob(poly::parse_polynomial("a*b + b*c + c*a"));
    auto s = prob.root_state();
    REQUIRE(s->untried_moves() == std::vector<Move>{0, 1, 2});
    s->set_move(1);
    CHECK(s->untried_moves() == std::vector<Move>{0, 2});
    s->set_move(0);
    s->set_move(2);
    CHECK(s->untried_moves().empty());
    CHECK(s->is_terminal());
}

TEST_CASE("horner state: illegal moves are errors") {
    HornerProblem prob(poly::parse_polynomial("a*b"));
    auto s = prob.root_state();
    s->set_move(1);
    CHECK_THROWS_AS(s->set_move(1), std::invalid_argument);  // duplicate variable
    CHECK_THROWS_AS(s->set_move(7), std::invalid_argument);  // out of range
    CHECK_THROWS_AS(s->set_move(-1), std::invalid_argument);
}

TEST_CASE("horner state: terminality") {
    HornerProblem prob(poly::parse_polynomial("a*b"));
    auto s = prob.root_state();
    CHECK_FALSE(s->is_terminal());
    s->set_move(0);
    CHECK_FALSE(s->is_terminal());
    s->set_move(1);
    CHECK(s->is_terminal());
}

TEST_CASE("horner state: evaluate is baseline over ops, clamped") {
    auto prob = fixture_problem();
    CHECK(prob.baseline_ops() == kFixtureBaselineOps);

    // identity order reproduces the baseline exactly: delta == 1
    auto s = prob.root_state();
    for (int v = 0; v < prob.polynomial().nvars; ++v) s->set_move(v);
    CHECK(s->terminal_cost() == kFixtureBaselineOps);
    CHECK(s->evaluate() == doctest::Approx(1.0));

    // any complete order: delta == min(1, baseline/ops)
    SplitMix64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        auto t = prob.root_state();
        std::vector<Move> order(prob.polynomial().nvars);
        for (int v = 0; v < prob.polynomial().nvars; ++v) order[v] = v;
        shuffle(order, rng);
        for (Move m : order) t->set_move(m);
        const double delta = t->evaluate();
        const double expect = std::min(
            1.0, static_cast<double>(kFixtureBaselineOps) / static_cast<double>(t->terminal_cost()));
        CHECK(delta == doctest::Approx(expect));
        CHECK(delta >= 0.0);
        CHECK(delta <= 1.0);
    }
}

TEST_CASE("horner state: evaluate requires a terminal state") {
    HornerProblem prob(poly::parse_polynomial("a*b"));
    auto s = prob.root_state();
    CHECK_THROWS_AS(s->evaluate(), std::invalid_argument);
    CHECK_THROWS_AS(s->terminal_cost(), std::invalid_argument);
}

TEST_CASE("horner state: clones evolve independently") {
    HornerProblem prob(poly::parse_polynomial("a*b + c"));
    auto s = prob.root_state();
    s->set_move(2);
    auto c = s->clone();
    c->set_move(0);
    CHECK(s->history() == std::vector<Move>{2});
    CHECK(c->history() == std::vector<Move>{2, 0});
}

TEST_CASE("horner reward is unchanged under variable renaming") {
    poly::Polynomial p = poly::random_polynomial(6, 10, 4, 9);
    poly::Polynomial renamed = p;
    renamed.names = {"u0", "u1", "u2", "u3", "u4", "u5"};
    HornerProblem a(p);
    HornerProblem b(renamed);
    CHECK(a.baseline_ops() == b.baseline_ops());

    SplitMix64 rng(12);
    std::vector<Move> order{0, 1, 2, 3, 4, 5};
    shuffle(order, rng);
    auto sa = a.root_state();
    auto sb = b.root_state();
    for (Move m : order) {
        sa->set_move(m);
        sb->set_move(m);
    }
    CHECK(sa->evaluate() == doctest::Approx(sb->evaluate()));
    CHECK(sa->terminal_cost() == sb->terminal_cost());
}

TEST_CASE("synthetic state: moves, terminality, errors") {
    SyntheticState s(2, 3, 17);
    CHECK(s.untried_moves() == std::vector<Move>{0, 1});
    s.set_move(0);
    s.set_move(1);
    CHECK(s.untried_moves() == std::vector<Move>{0, 1});
    CHECK_FALSE(s.is_terminal());
    s.set_move(1);
    CHECK(s.is_terminal());
    CHECK(s.untried_moves().empty());
    CHECK_THROWS_AS(s.set_move(0), std::invalid_argument);

    SyntheticState t(3, 2, 5);
    CHECK_THROWS_AS(t.set_move(3), std::invalid_argument);
    CHECK_THROWS_AS(t.evaluate(), std::invalid_argument);
}

TEST_CASE("synthetic state: payoff is a pure function of the path") {
    SyntheticState a(3, 4, 123);
    SyntheticState b(3, 4, 123);
    for (Move m : {2, 0, 1, 2}) {
        a.set_move(m);
        b.set_move(m);
    }
    CHECK(a.evaluate() == b.evaluate());
    CHECK(a.evaluate() == a.evaluate());
    CHECK(a.terminal_cost() == b.terminal_cost());
    CHECK(a.evaluate() >= 0.0);
    CHECK(a.evaluate() < 1.0);

    // a different seed moves the payoff
    SyntheticState c(3, 4, 124);
    for (Move m : {2, 0, 1, 2}) c.set_move(m);
    CHECK(a.payoff_hash() != c.payoff_hash());
}

TEST_CASE("synthetic state: cost orders inversely to the payoff hash") {
    SplitMix64 rng(31);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t h1 = rng.next();
        const std::uint64_t h2 = rng.next();
        if (h1 == h2) continue;
        CHECK((SyntheticState::cost_from_hash(h1) < SyntheticState::cost_from_hash(h2)) ==
              (h1 > h2));
        CHECK(SyntheticState::cost_from_hash(h1) >= 0);
    }
}

TEST_CASE("synthetic enumeration: b=2,d=2 payoffs match state evaluation") {
    SyntheticProblem prob(2, 2, 71);
    // walk all four leaves through the state interface as the oracle
    double best = -1.0;
    std::vector<Move> best_path;
    for (Move m0 : {0, 1}) {
        for (Move m1 : {0, 1}) {
            auto s = prob.root_state();
            s->set_move(m0);
            s->set_move(m1);
            const double r = s->evaluate();
            if (r > best) {
                best = r;
                best_path = {m0, m1};
            }
        }
    }
    SyntheticOptimum opt = enumerate_synthetic(prob);
    CHECK(opt.unique);
    CHECK(opt.reward == doctest::Approx(best));
    CHECK(opt.path == best_path);

    // the optimum cost is what a state on that path reports
    auto s = prob.root_state();
    for (Move m : opt.path) s->set_move(m);
    CHECK(s->terminal_cost() == opt.cost);
}

TEST_CASE("synthetic enumeration: unique argmax across fixture seeds") {
    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL, 1000ULL}) {
        SyntheticProblem prob(3, 5, seed);
        SyntheticOptimum opt = enumerate_synthetic(prob);
        CHECK(opt.unique);
        CHECK(static_cast<int>(opt.path.size()) == 5);
    }
}

TEST_CASE("selector: synthetic") {
    auto prob = parse_selector("synthetic:b=3,d=5,seed=9");
    auto s = prob->root_state();
    CHECK(s->untried_moves().size() == 3);
    CHECK_THROWS_AS(parse_selector("synthetic:b=3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_selector("synthetic:b=3,d=2,seed=1,bogus=4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_selector("nope:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_selector("plain"), std::invalid_argument);
    CHECK_NOTHROW(parse_selector("synthetic:b=2,d=2,seed=1,spin_us=100"));
}

TEST_CASE("selector: horner reads a polynomial file") {
    const char* path = "selector_test.poly";
    {
        std::ofstream out(path);
        out << "x^2*y + 3*x + y\n";
    }
    auto prob = parse_selector(std::string("horner:") + path);
    auto s = prob->root_state();
    CHECK(s->untried_moves().size() == 2);
    std::remove(path);
    CHECK_THROWS_AS(parse_selector("horner:does_not_exist.poly"), std::runtime_error);
}

TEST_CASE("synthetic evaluation spin burns at least the configured time") {
    SyntheticProblem prob(2, 2, 3, 2000);  // 2 ms
    auto s = prob.root_state();
    s->set_move(0);
    s->set_move(1);
    const auto t0 = std::chrono::steady_clock::now();
    s->evaluate();
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration<double>(elapsed).count() >= 0.002);
    // payoff unchanged by the spin
    SyntheticProblem fast(2, 2, 3, 0);
    auto f = fast.root_state();
    f->set_move(0);
    f->set_move(1);
    CHECK(f->evaluate() == s->evaluate());
}
