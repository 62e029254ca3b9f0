#include "pipesearch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pipesearch/rng.hpp"

namespace ps::bench {

std::string to_string(Scheduler s) {
    switch (s) {
        case Scheduler::sequential: return "seq";
        case Scheduler::tree_parallel: return "treepar";
        case Scheduler::pipeline: return "pipeline";
    }
    return "?";
}

Scheduler scheduler_from_string(const std::string& s) {
    if (s == "seq") return Scheduler::sequential;
    if (s == "treepar") return Scheduler::tree_parallel;
    if (s == "pipeline") return Scheduler::pipeline;
    throw std::invalid_argument("unknown scheduler '" + s + "' (want seq|treepar|pipeline)");
}

namespace {

constexpr const char* kCsvHeader =
    "scheduler,worker_threads,token_limit,budget,wall_time,best_move,best_ops,seed,repeat_index";

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Cell {
    Scheduler scheduler;
    int threads;
    std::int64_t tokens;
};

std::vector<Cell> expand_cells(const BenchmarkConfig& config) {
    std::vector<Cell> cells;
    for (Scheduler s : config.schedulers) {
        switch (s) {
            case Scheduler::sequential:
                cells.push_back({s, 1, 1});
                break;
            case Scheduler::tree_parallel:
                for (int t : config.thread_counts) cells.push_back({s, t, 1});
                break;
            case Scheduler::pipeline:
                for (int t : config.thread_counts) {
                    for (std::int64_t k : config.token_limits) cells.push_back({s, t, k});
                }
                break;
        }
    }
    return cells;
}

mcts::SearchResult run_cell(const Cell& cell, const problem::SearchState& root,
                            const BenchmarkConfig& config, std::uint64_t seed) {
    sched::PipelineConfig pc;
    pc.token_limit = cell.tokens;
    pc.worker_threads = cell.threads;
    pc.cp = config.cp;
    pc.seed = seed;
    pc.budget.max_playouts = config.playouts;
    pc.linear_pipeline = config.linear_pipeline;
    if (config.target_ops) {
        pc.target.kind = mcts::StopTarget::Kind::cost_at_most;
        pc.target.cost = *config.target_ops;
    }
    switch (cell.scheduler) {
        case Scheduler::sequential: return sched::run_sequential(root, pc);
        case Scheduler::tree_parallel: return sched::run_tree_parallel(root, pc);
        case Scheduler::pipeline: default: return sched::run_pipeline(root, pc);
    }
}

}  // namespace

std::vector<RunRecord> run_matrix(const BenchmarkConfig& config) {
    if (config.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    auto prob = problem::parse_selector(config.problem_selector);
    auto root = prob->root_state();

    std::vector<RunRecord> records;
    for (const Cell& cell : expand_cells(config)) {
        if (config.warmup) {
            run_cell(cell, *root, config, mix64(config.seed, 0x7761726dULL));  // "warm"
        }
        for (int r = 0; r < config.repeats; ++r) {
            // repeat r uses the same seed in every cell so baselines pair up
            const std::uint64_t seed = mix64(config.seed, static_cast<std::uint64_t>(r));
            const auto t0 = std::chrono::steady_clock::now();
            mcts::SearchResult result = run_cell(cell, *root, config, seed);
            const auto t1 = std::chrono::steady_clock::now();

            RunRecord rec;
            rec.scheduler = to_string(cell.scheduler);
            rec.worker_threads = cell.threads;
            rec.token_limit = cell.tokens;
            rec.budget = result.playouts;
            rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
            rec.best_move = result.best_move;
            rec.best_ops = result.best_cost;
            rec.seed = seed;
            rec.repeat_index = r;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

namespace {

struct CellKey {
    std::string scheduler;
    int threads;
    std::int64_t tokens;
    auto operator<=>(const CellKey&) const = default;
};

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::map<CellKey, std::vector<const RunRecord*>> group_records(
    const std::vector<RunRecord>& records) {
    std::map<CellKey, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) {
        groups[CellKey{r.scheduler, r.worker_threads, r.token_limit}].push_back(&r);
    }
    return groups;
}

}  // namespace

std::vector<SpeedupRow> playout_speedup(const std::vector<RunRecord>& records) {
    auto groups = group_records(records);

    std::vector<double> seq_times;
    for (const auto& [key, recs] : groups) {
        if (key.scheduler == to_string(Scheduler::sequential)) {
            for (const RunRecord* r : recs) seq_times.push_back(r->wall_time);
        }
    }
    if (seq_times.empty()) {
        throw std::invalid_argument("playout_speedup: missing sequential baseline");
    }
    const double seq_mean = mean(seq_times);

    std::vector<SpeedupRow> rows;
    for (const auto& [key, recs] : groups) {
        std::vector<double> times;
        for (const RunRecord* r : recs) times.push_back(r->wall_time);
        SpeedupRow row;
        row.scheduler = scheduler_from_string(key.scheduler);
        row.worker_threads = key.threads;
        row.token_limit = key.tokens;
        row.samples = static_cast<int>(times.size());
        row.sequential_mean = seq_mean;
        row.parallel_mean = mean(times);
        row.parallel_stddev = sample_stddev(times);
        row.speedup = seq_mean / row.parallel_mean;
        rows.push_back(row);
    }
    return rows;
}

std::vector<OverheadRow> search_overhead(const std::vector<RunRecord>& records,
                                         std::int64_t target_ops) {
    auto groups = group_records(records);

    std::vector<double> seq_playouts;
    int seq_censored = 0;
    for (const auto& [key, recs] : groups) {
        if (key.scheduler != to_string(Scheduler::sequential)) continue;
        for (const RunRecord* r : recs) {
            if (r->best_ops <= target_ops) {
                seq_playouts.push_back(static_cast<double>(r->budget));
            } else {
                ++seq_censored;
            }
        }
    }
    if (seq_playouts.empty() && seq_censored == 0) {
        throw std::invalid_argument("search_overhead: missing sequential baseline");
    }
    if (seq_playouts.empty()) {
        throw std::invalid_argument("search_overhead: every sequential run is censored");
    }
    const double seq_mean = mean(seq_playouts);

    std::vector<OverheadRow> rows;
    for (const auto& [key, recs] : groups) {
        if (key.scheduler == to_string(Scheduler::sequential)) continue;
        OverheadRow row;
        row.scheduler = scheduler_from_string(key.scheduler);
        row.worker_threads = key.threads;
        row.token_limit = key.tokens;
        std::vector<double> playouts;
        for (const RunRecord* r : recs) {
            if (r->best_ops <= target_ops) {
                playouts.push_back(static_cast<double>(r->budget));
            } else {
                ++row.censored;
            }
        }
        if (playouts.empty()) {
            throw std::invalid_argument("search_overhead: every run censored for " +
                                        key.scheduler);
        }
        row.samples = static_cast<int>(playouts.size());
        row.parallel_mean_playouts = mean(playouts);
        row.sequential_mean_playouts = seq_mean;
        row.overhead = row.parallel_mean_playouts / seq_mean - 1.0;
        rows.push_back(row);
    }
    return rows;
}

void emit(const std::vector<RunRecord>& records, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::csv) {
        out << kCsvHeader << "\n";
        for (const RunRecord& r : records) {
            out << r.scheduler << ',' << r.worker_threads << ',' << r.token_limit << ','
                << r.budget << ',' << format_double(r.wall_time) << ',' << r.best_move << ','
                << r.best_ops << ',' << r.seed << ',' << r.repeat_index << "\n";
        }
        return;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const RunRecord& r : records) {
        arr.push_back({{"scheduler", r.scheduler},
                       {"worker_threads", r.worker_threads},
                       {"token_limit", r.token_limit},
                       {"budget", r.budget},
                       {"wall_time", r.wall_time},
                       {"best_move", r.best_move},
                       {"best_ops", r.best_ops},
                       {"seed", r.seed},
                       {"repeat_index", r.repeat_index}});
    }
    out << arr.dump(2) << "\n";
}

void emit_file(const std::vector<RunRecord>& records, OutputFormat format,
               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    emit(records, format, out);
    out.flush();
    if (!out) throw std::runtime_error("error writing output file '" + path + "'");
}

std::vector<RunRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
    if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header: " + line);
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) throw std::invalid_argument("bad CSV row: " + line);
        RunRecord r;
        r.scheduler = fields[0];
        r.worker_threads = std::stoi(fields[1]);
        r.token_limit = std::stoll(fields[2]);
        r.budget = std::stoll(fields[3]);
        r.wall_time = std::stod(fields[4]);
        r.best_move = std::stoi(fields[5]);
        r.best_ops = std::stoll(fields[6]);
        r.seed = std::stoull(fields[7]);
        r.repeat_index = std::stoi(fields[8]);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RunRecord> parse_json(std::istream& in) {
    nlohmann::json arr = nlohmann::json::parse(in);
    if (!arr.is_array()) throw std::invalid_argument("JSON records: expected an array");
    std::vector<RunRecord> records;
    for (const auto& item : arr) {
        RunRecord r;
        r.scheduler = item.at("scheduler").get<std::string>();
        r.worker_threads = item.at("worker_threads").get<int>();
        r.token_limit = item.at("token_limit").get<std::int64_t>();
        r.budget = item.at("budget").get<std::int64_t>();
        r.wall_time = item.at("wall_time").get<double>();
        r.best_move = item.at("best_move").get<int>();
        r.best_ops = item.at("best_ops").get<std::int64_t>();
        r.seed = item.at("seed").get<std::uint64_t>();
        r.repeat_index = item.at("repeat_index").get<int>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace ps::bench
