#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pipesearch/problem.hpp"
#include "pipesearch/sched.hpp"

namespace ps::bench {

enum class Scheduler { sequential, tree_parallel, pipeline };

std::string to_string(Scheduler s);
Scheduler scheduler_from_string(const std::string& s);  // throws std::invalid_argument

// One measurement. budget holds the completed playouts of the run, which in
// first-hit mode is the playouts needed to reach the target (or the cap).
struct RunRecord {
    std::string scheduler;
    int worker_threads = 1;
    std::int64_t token_limit = 1;
    std::int64_t budget = 0;
    double wall_time = 0.0;  // seconds, monotonic clock around the run only
    int best_move = -1;
    std::int64_t best_ops = 0;
    std::uint64_t seed = 0;
    int repeat_index = 0;

    bool operator==(const RunRecord&) const = default;
};

enum class OutputFormat { csv, json };

struct BenchmarkConfig {
    std::string problem_selector;
    std::vector<Scheduler> schedulers{Scheduler::sequential};
    std::vector<std::int64_t> token_limits{1};
    std::vector<int> thread_counts{1};
    std::int64_t playouts = 1024;
    double cp = 0.1;
    int repeats = 1;
    std::uint64_t seed = 0;
    bool linear_pipeline = false;
    std::optional<std::int64_t> target_ops;  // enables first-hit mode
    bool warmup = true;
};

// Runs every scheduler x thread x token combination, repeats times each, one
// cell at a time. Schedulers ignore the axes they do not use (sequential runs
// once per repeat; tree parallelization ignores the token axis). Repeat r of
// every cell uses the same derived seed, so baselines pair up.
std::vector<RunRecord> run_matrix(const BenchmarkConfig& config);

struct SpeedupRow {
    Scheduler scheduler = Scheduler::pipeline;
    int worker_threads = 1;
    std::int64_t token_limit = 1;
    int samples = 0;
    double sequential_mean = 0.0;
    double parallel_mean = 0.0;
    double parallel_stddev = 0.0;
    double speedup = 0.0;
};

// Playout speedup per parallel configuration: mean sequential wall time over
// mean parallel wall time. Throws std::invalid_argument when no sequential
// baseline is present.
std::vector<SpeedupRow> playout_speedup(const std::vector<RunRecord>& records);

struct OverheadRow {
    Scheduler scheduler = Scheduler::pipeline;
    int worker_threads = 1;
    std::int64_t token_limit = 1;
    int samples = 0;       // uncensored runs
    int censored = 0;      // runs that never reached the target
    double parallel_mean_playouts = 0.0;
    double sequential_mean_playouts = 0.0;
    double overhead = 0.0;
};

// Search overhead per parallel configuration: mean playouts-to-target in
// parallel over sequential, minus one. Runs with best_ops above the target
// are censored. Throws std::invalid_argument when everything is censored or
// the baseline is missing.
std::vector<OverheadRow> search_overhead(const std::vector<RunRecord>& records,
                                         std::int64_t target_ops);

void emit(const std::vector<RunRecord>& records, OutputFormat format, std::ostream& out);
void emit_file(const std::vector<RunRecord>& records, OutputFormat format,
               const std::string& path);  // throws std::runtime_error on unwritable path

std::vector<RunRecord> parse_csv(std::istream& in);
std::vector<RunRecord> parse_json(std::istream& in);

}  // namespace ps::bench
