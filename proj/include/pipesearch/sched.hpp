#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>

#include "pipesearch/mcts.hpp"

namespace ps::sched {

struct PipelineConfig {
    std::int64_t token_limit = 1;  // upper bound on in-flight tokens
    int worker_threads = 1;
    double cp = 1.0;
    std::uint64_t seed = 0;
    mcts::SearchBudget budget;
    bool linear_pipeline = false;  // every stage serial, for the scalability ceiling demo
    mcts::StopTarget target;
    double drain_timeout_seconds = 300.0;  // max seconds without a completed playout
};

// Observability for the scheduler invariants: serial stages never overlap,
// backups run in issue order, in-flight tokens never exceed the limit.
struct PipelineStats {
    std::int64_t issued = 0;
    std::int64_t completed = 0;
    std::int64_t max_in_flight = 0;
    int max_select_concurrency = 0;
    int max_backup_concurrency = 0;
    std::int64_t backup_order_violations = 0;
};

struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sequential baseline; identical output to mcts::uct_search for the same seed.
mcts::SearchResult run_sequential(const problem::SearchState& root_state,
                                  const PipelineConfig& config);

// Iteration-level tree parallelization: worker_threads workers run whole
// iterations against the shared lock-free tree; an atomic counter enforces
// exactly budget.max_playouts completed playouts.
mcts::SearchResult run_tree_parallel(const problem::SearchState& root_state,
                                     const PipelineConfig& config);

// Five-stage pipeline: Select -> Expand -> RandomSimulation -> Evaluation ->
// Backup with at most token_limit tokens in flight. Select and Backup process
// one token at a time in issue order; the middle stages run concurrently
// (unless linear_pipeline marks them serial too).
mcts::SearchResult run_pipeline(const problem::SearchState& root_state,
                                const PipelineConfig& config, PipelineStats* stats = nullptr);

// The engine behind run_pipeline, exposed so stop/drain semantics can be
// exercised directly.
class Pipeline {
public:
    Pipeline(mcts::SearchContext& ctx, const PipelineConfig& config);
    ~Pipeline();

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    // Spawns the workers and begins issuing tokens.
    void start();

    // No further tokens are selected; already-issued tokens keep flowing.
    void signal_stop();

    // Blocks until every in-flight token has completed backup. Throws
    // TimeoutError when no token retires for timeout_seconds (a stuck
    // stage); zero or negative waits forever. Idempotent: draining a
    // drained pipeline returns immediately.
    void drain(double timeout_seconds);

    // drain + worker shutdown; returns completed playouts.
    std::int64_t finish();

    std::int64_t issued() const;
    std::int64_t completed() const;
    bool finished() const;
    PipelineStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ps::sched
