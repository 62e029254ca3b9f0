#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pipesearch/dag.hpp"
#include "pipesearch/poly.hpp"

namespace ps::problem {

using Move = int;

// Abstract search state walked by the MCTS stages. A state is owned by exactly
// one token at a time; clones evolve independently. evaluate()/terminal_cost()
// are pure functions of the move history (they may cache internally, which is
// safe under the single-owner rule).
class SearchState {
public:
    virtual ~SearchState() = default;

    virtual std::unique_ptr<SearchState> clone() const = 0;
    // legal moves not yet taken from this state, deterministic order
    virtual std::vector<Move> untried_moves() const = 0;
    // appends a move to the history; throws std::invalid_argument on illegal moves
    virtual void set_move(Move m) = 0;
    virtual bool is_terminal() const = 0;
    // reward in [0, 1], higher is better; requires is_terminal()
    virtual double evaluate() const = 0;
    // integer objective, lower is better; requires is_terminal()
    virtual std::int64_t terminal_cost() const = 0;
    virtual const std::vector<Move>& history() const = 0;
};

// ---------------------------------------------------------------------------
// Horner variable-ordering problem: a move picks the next variable of the
// scheme; a terminal state is a complete order. Reward is baseline_ops/ops,
// where ops counts the additions and multiplications of the Horner+CSE form
// and baseline_ops is the identity-order cost of the same polynomial.
// ---------------------------------------------------------------------------

class HornerProblem;

class HornerState final : public SearchState {
public:
    std::unique_ptr<SearchState> clone() const override;
    std::vector<Move> untried_moves() const override;
    void set_move(Move m) override;
    bool is_terminal() const override;
    double evaluate() const override;
    std::int64_t terminal_cost() const override;
    const std::vector<Move>& history() const override { return chosen_; }

    const std::vector<Move>& chosen() const { return chosen_; }

private:
    friend class HornerProblem;
    struct Shared {
        poly::Polynomial polynomial;
        std::int64_t baseline_ops = 0;
    };
    explicit HornerState(std::shared_ptr<const Shared> shared) : shared_(std::move(shared)) {}

    std::shared_ptr<const Shared> shared_;
    std::vector<Move> chosen_;
    mutable std::int64_t cached_cost_ = -1;
};

// ---------------------------------------------------------------------------
// Synthetic oracle problem: a complete b-ary path of depth d. The payoff is a
// seeded hash of the path, so every leaf value is enumerable exactly. An
// optional busy-spin makes the evaluation stage artificially expensive for
// scheduler benchmarks.
// ---------------------------------------------------------------------------

class SyntheticState final : public SearchState {
public:
    SyntheticState(int branching, int depth, std::uint64_t seed, std::int64_t spin_us = 0);

    std::unique_ptr<SearchState> clone() const override;
    std::vector<Move> untried_moves() const override;
    void set_move(Move m) override;
    bool is_terminal() const override;
    double evaluate() const override;
    std::int64_t terminal_cost() const override;
    const std::vector<Move>& history() const override { return path_; }

    // full-width payoff hash for the current (terminal) path
    std::uint64_t payoff_hash() const;

    static double reward_from_hash(std::uint64_t h);
    static std::int64_t cost_from_hash(std::uint64_t h);

private:
    int branching_;
    int depth_;
    std::uint64_t seed_;
    std::int64_t spin_us_;
    std::vector<Move> path_;
};

// ---------------------------------------------------------------------------
// Problem factories + the CLI selector grammar:
//   "horner:<path>"                                  polynomial file, one per file
//   "synthetic:b=<int>,d=<int>,seed=<int>[,spin_us=<int>]"
// ---------------------------------------------------------------------------

class Problem {
public:
    virtual ~Problem() = default;
    virtual std::unique_ptr<SearchState> root_state() const = 0;
    virtual std::string name() const = 0;
};

class HornerProblem final : public Problem {
public:
    explicit HornerProblem(poly::Polynomial p);

    std::unique_ptr<SearchState> root_state() const override;
    std::string name() const override;

    const poly::Polynomial& polynomial() const { return shared_->polynomial; }
    std::int64_t baseline_ops() const { return shared_->baseline_ops; }

private:
    std::shared_ptr<const HornerState::Shared> shared_;
};

class SyntheticProblem final : public Problem {
public:
    SyntheticProblem(int branching, int depth, std::uint64_t seed, std::int64_t spin_us = 0);

    std::unique_ptr<SearchState> root_state() const override;
    std::string name() const override;

    int branching() const { return branching_; }
    int depth() const { return depth_; }
    std::uint64_t seed() const { return seed_; }

private:
    int branching_;
    int depth_;
    std::uint64_t seed_;
    std::int64_t spin_us_;
};

// Exhaustive walk of all b^d terminal paths. unique is false when the best
// payoff is not a strict argmax (such seeds are rejected as test fixtures).
struct SyntheticOptimum {
    std::vector<Move> path;
    double reward = 0.0;
    std::int64_t cost = 0;
    bool unique = true;
};
SyntheticOptimum enumerate_synthetic(const SyntheticProblem& p);

// Parses a problem selector string; throws std::invalid_argument on bad syntax
// and std::runtime_error when a polynomial file cannot be read.
std::unique_ptr<Problem> parse_selector(const std::string& selector);

}  // namespace ps::problem
