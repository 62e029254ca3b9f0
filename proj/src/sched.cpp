#include "pipesearch/sched.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <thread>
#include <vector>

namespace ps::sched {

namespace {

constexpr int kSelectStage = 0;
constexpr int kExpandStage = 1;
constexpr int kSimulateStage = 2;
constexpr int kEvaluateStage = 3;
constexpr int kBackupStage = 4;
constexpr int kNumStages = 5;

void validate(const PipelineConfig& config) {
    if (config.token_limit < 1) throw std::invalid_argument("token_limit must be >= 1");
    if (config.worker_threads < 1) throw std::invalid_argument("worker_threads must be >= 1");
    if (config.budget.max_playouts < 1) throw std::invalid_argument("budget must be >= 1");
}

template <typename T>
void update_max(std::atomic<T>& slot, T value) {
    T prev = slot.load(std::memory_order_relaxed);
    while (value > prev &&
           !slot.compare_exchange_weak(prev, value, std::memory_order_relaxed)) {
    }
}

mcts::SearchResult collect_result(mcts::SearchContext& ctx,
                                  std::unique_ptr<tree::SearchTree> tree,
                                  std::int64_t completed) {
    mcts::SearchResult result;
    result.best_move = mcts::best_child_move(tree->root());
    result.playouts = completed;
    result.best_cost = ctx.best_cost();
    result.best_reward = ctx.best_reward();
    result.best_path = ctx.best_path();
    result.target_hit = ctx.target_hit();
    result.tree = std::move(tree);
    return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline engine
// ---------------------------------------------------------------------------

struct Pipeline::Impl {
    mcts::SearchContext& ctx;
    PipelineConfig cfg;

    // Pre-allocated token ring: ids are stable across reuse, slots return to
    // the tail after backup, so with in-order backups the pool cycles
    // round-robin like a circular buffer.
    std::vector<std::unique_ptr<mcts::Token>> tokens;
    std::mutex pool_mu;
    std::deque<mcts::Token*> free_tokens;
    bool select_pending = false;  // a select is waiting for a free token

    // issue state; written only inside the serialized select section
    std::atomic<std::int64_t> issued_count{0};
    std::atomic<bool> closed{false};
    std::atomic<std::int64_t> in_flight{0};
    std::atomic<std::int64_t> completed_count{0};

    std::atomic<bool> done{false};
    std::mutex done_mu;
    std::condition_variable done_cv;

    struct WorkItem {
        mcts::Token* token = nullptr;  // null: run the select stage
        int stage = kSelectStage;
    };
    std::mutex queue_mu;
    std::condition_variable queue_cv;
    std::deque<WorkItem> queue;
    bool shutdown = false;

    // Serial in-order gates keyed by issue ordinal. Tokens park until their
    // ordinal is next; one runner at a time drains consecutive ordinals.
    struct Gate {
        std::mutex mu;
        std::int64_t next = 0;
        bool busy = false;
        std::map<std::int64_t, mcts::Token*> parked;
    };
    Gate gates[kNumStages];

    std::atomic<int> select_occupancy{0};
    std::atomic<int> backup_occupancy{0};
    std::atomic<int> max_select_occupancy{0};
    std::atomic<int> max_backup_occupancy{0};
    std::atomic<std::int64_t> max_in_flight{0};
    std::atomic<std::int64_t> order_violations{0};

    std::vector<std::thread> workers;
    bool started = false;
    bool workers_down = false;

    Impl(mcts::SearchContext& c, const PipelineConfig& f) : ctx(c), cfg(f) {
        tokens.reserve(static_cast<std::size_t>(cfg.token_limit));
        for (std::int64_t i = 0; i < cfg.token_limit; ++i) {
            auto t = std::make_unique<mcts::Token>();
            t->id = static_cast<int>(i);
            free_tokens.push_back(t.get());
            tokens.push_back(std::move(t));
        }
    }

    bool serial_stage(int stage) const {
        return stage == kSelectStage || stage == kBackupStage || cfg.linear_pipeline;
    }

    void post(WorkItem item) {
        {
            std::lock_guard<std::mutex> lock(queue_mu);
            queue.push_back(item);
        }
        queue_cv.notify_one();
    }

    void maybe_finish() {
        if (!closed.load() || in_flight.load() != 0) return;
        {
            std::lock_guard<std::mutex> lock(done_mu);
            done.store(true);
        }
        done_cv.notify_all();
    }

    // The select stage. Serialized by construction: exactly one outstanding
    // select item exists at any time (chained below, revived on release).
    void try_select() {
        if (!closed.load() &&
            (ctx.stop_requested() || issued_count.load() >= cfg.budget.max_playouts)) {
            closed.store(true);
        }
        if (closed.load()) {
            maybe_finish();
            return;
        }
        mcts::Token* t = nullptr;
        {
            std::lock_guard<std::mutex> lock(pool_mu);
            if (free_tokens.empty()) {
                select_pending = true;
                return;
            }
            t = free_tokens.front();
            free_tokens.pop_front();
        }

        const int occ = select_occupancy.fetch_add(1) + 1;
        update_max(max_select_occupancy, occ);
        const std::int64_t ordinal = issued_count.fetch_add(1);
        ctx.issue(*t, t->id, ordinal);
        update_max(max_in_flight, in_flight.fetch_add(1) + 1);
        mcts::select(*t, ctx);
        select_occupancy.fetch_sub(1);

        // next select may start while this token rides the middle stages
        post(WorkItem{});
        forward(kSelectStage, t);
    }

    void forward(int stage, mcts::Token* t) {
        if (cfg.linear_pipeline) {
            post(WorkItem{t, stage + 1});
            return;
        }
        // bind-to-item: carry the token through the parallel middle stages,
        // then hand it to the backup gate
        int next = stage + 1;
        while (next != kBackupStage) {
            run_stage_fn(next, t);
            ++next;
        }
        submit_serial(kBackupStage, t);
    }

    void run_stage_fn(int stage, mcts::Token* t) {
        switch (stage) {
            case kExpandStage:
                mcts::expand(*t);
                break;
            case kSimulateStage:
                mcts::random_simulation(*t);
                break;
            case kEvaluateStage:
                mcts::evaluation(*t);
                ctx.record(*t);
                break;
            case kBackupStage: {
                const int occ = backup_occupancy.fetch_add(1) + 1;
                update_max(max_backup_occupancy, occ);
                mcts::backup(*t);
                backup_occupancy.fetch_sub(1);
                break;
            }
            default:
                break;
        }
    }

    void submit_serial(int stage, mcts::Token* t) {
        Gate& gate = gates[stage];
        std::unique_lock<std::mutex> lock(gate.mu);
        gate.parked.emplace(t->ordinal, t);
        drain_gate(gate, stage, lock);
    }

    void drain_gate(Gate& gate, int stage, std::unique_lock<std::mutex>& lock) {
        for (;;) {
            if (gate.busy) return;
            auto it = gate.parked.begin();
            if (it == gate.parked.end() || it->first != gate.next) return;
            mcts::Token* t = it->second;
            gate.parked.erase(it);
            if (t->ordinal != gate.next) order_violations.fetch_add(1);
            gate.busy = true;
            lock.unlock();

            run_stage_fn(stage, t);
            if (stage == kBackupStage) {
                complete_token(t);
            } else {
                post(WorkItem{t, stage + 1});
            }

            lock.lock();
            gate.busy = false;
            ++gate.next;
        }
    }

    void complete_token(mcts::Token* t) {
        completed_count.fetch_add(1);
        in_flight.fetch_sub(1);
        bool revive = false;
        {
            std::lock_guard<std::mutex> lock(pool_mu);
            free_tokens.push_back(t);
            if (select_pending) {
                select_pending = false;
                revive = true;
            }
        }
        if (revive) post(WorkItem{});
        maybe_finish();
    }

    void process(WorkItem item) {
        if (item.token == nullptr) {
            try_select();
        } else if (serial_stage(item.stage)) {
            submit_serial(item.stage, item.token);
        } else {
            run_stage_fn(item.stage, item.token);
            forward(item.stage, item.token);
        }
    }

    void worker_loop() {
        for (;;) {
            WorkItem item;
            {
                std::unique_lock<std::mutex> lock(queue_mu);
                queue_cv.wait(lock, [&] { return shutdown || !queue.empty(); });
                if (queue.empty()) return;
                item = queue.front();
                queue.pop_front();
            }
            process(item);
        }
    }

    void start() {
        if (started) return;
        started = true;
        workers.reserve(static_cast<std::size_t>(cfg.worker_threads));
        for (int i = 0; i < cfg.worker_threads; ++i) {
            workers.emplace_back([this] { worker_loop(); });
        }
        post(WorkItem{});
    }

    void signal_stop() {
        closed.store(true);
        maybe_finish();
    }

    // timeout_seconds bounds the time without a completed backup, not the
    // whole drain: long runs keep refreshing the deadline as tokens retire.
    void drain(double timeout_seconds) {
        std::unique_lock<std::mutex> lock(done_mu);
        if (timeout_seconds <= 0.0) {
            done_cv.wait(lock, [&] { return done.load(); });
            return;
        }
        // system_clock deadlines keep the wait on pthread_cond_timedwait,
        // which sanitizers model (steady_clock waits go through
        // pthread_cond_clockwait and confuse tsan)
        const auto slice = std::chrono::duration_cast<std::chrono::system_clock::duration>(
            std::chrono::duration<double>(timeout_seconds));
        std::int64_t last_progress = completed_count.load();
        auto deadline = std::chrono::system_clock::now() + slice;
        for (;;) {
            if (done_cv.wait_until(lock, deadline, [&] { return done.load(); })) {
                return;
            }
            const std::int64_t progressed = completed_count.load();
            if (progressed == last_progress) {
                throw TimeoutError("pipeline drain timed out: a stage appears stuck");
            }
            last_progress = progressed;
            deadline = std::chrono::system_clock::now() + slice;
        }
    }

    void shutdown_workers() {
        if (workers_down) return;
        {
            std::lock_guard<std::mutex> lock(queue_mu);
            shutdown = true;
        }
        queue_cv.notify_all();
        for (auto& w : workers) w.join();
        workers.clear();
        workers_down = true;
    }
};

Pipeline::Pipeline(mcts::SearchContext& ctx, const PipelineConfig& config) {
    validate(config);
    impl_ = std::make_unique<Impl>(ctx, config);
}

Pipeline::~Pipeline() {
    impl_->signal_stop();
    if (impl_->started) {
        // wait for in-flight tokens, then take the workers down
        try {
            impl_->drain(0.0);
        } catch (...) {
        }
        impl_->shutdown_workers();
    }
}

void Pipeline::start() { impl_->start(); }
void Pipeline::signal_stop() { impl_->signal_stop(); }
void Pipeline::drain(double timeout_seconds) { impl_->drain(timeout_seconds); }

std::int64_t Pipeline::finish() {
    impl_->drain(impl_->cfg.drain_timeout_seconds);
    impl_->shutdown_workers();
    return impl_->completed_count.load();
}

std::int64_t Pipeline::issued() const { return impl_->issued_count.load(); }
std::int64_t Pipeline::completed() const { return impl_->completed_count.load(); }
bool Pipeline::finished() const { return impl_->done.load(); }

PipelineStats Pipeline::stats() const {
    PipelineStats s;
    s.issued = impl_->issued_count.load();
    s.completed = impl_->completed_count.load();
    s.max_in_flight = impl_->max_in_flight.load();
    s.max_select_concurrency = impl_->max_select_occupancy.load();
    s.max_backup_concurrency = impl_->max_backup_occupancy.load();
    s.backup_order_violations = impl_->order_violations.load();
    return s;
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

mcts::SearchResult run_sequential(const problem::SearchState& root_state,
                                  const PipelineConfig& config) {
    validate(config);
    return mcts::uct_search(root_state, config.budget, config.cp, config.seed, config.target);
}

mcts::SearchResult run_tree_parallel(const problem::SearchState& root_state,
                                     const PipelineConfig& config) {
    validate(config);
    if (root_state.is_terminal()) {
        throw std::invalid_argument("run_tree_parallel: root state is terminal");
    }

    auto tree = std::make_unique<tree::SearchTree>();
    mcts::SearchContext ctx(*tree, root_state, config.cp, config.seed, config.target);

    std::atomic<std::int64_t> next_ordinal{0};
    std::atomic<std::int64_t> completed{0};

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(config.worker_threads));
    for (int w = 0; w < config.worker_threads; ++w) {
        workers.emplace_back([&, w] {
            mcts::Token token;
            for (;;) {
                if (ctx.stop_requested()) break;
                const std::int64_t ordinal = next_ordinal.fetch_add(1);
                if (ordinal >= config.budget.max_playouts) break;
                ctx.issue(token, w, ordinal);
                mcts::select(token, ctx);
                mcts::expand(token);
                mcts::random_simulation(token);
                mcts::evaluation(token);
                ctx.record(token);
                mcts::backup(token);
                completed.fetch_add(1);
            }
        });
    }
    for (auto& w : workers) w.join();

    return collect_result(ctx, std::move(tree), completed.load());
}

mcts::SearchResult run_pipeline(const problem::SearchState& root_state,
                                const PipelineConfig& config, PipelineStats* stats) {
    validate(config);
    if (root_state.is_terminal()) {
        throw std::invalid_argument("run_pipeline: root state is terminal");
    }

    auto tree = std::make_unique<tree::SearchTree>();
    mcts::SearchContext ctx(*tree, root_state, config.cp, config.seed, config.target);

    Pipeline pipeline(ctx, config);
    pipeline.start();
    const std::int64_t completed = pipeline.finish();
    if (stats != nullptr) *stats = pipeline.stats();

    return collect_result(ctx, std::move(tree), completed);
}

}  // namespace ps::sched
