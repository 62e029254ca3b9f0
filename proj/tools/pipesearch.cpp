// pipesearch: parallel MCTS search over Horner variable orderings (or the
// synthetic oracle problem) with three interchangeable schedulers, plus a
// benchmark harness for playout-speedup and search-overhead measurements.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pipesearch/bench.hpp"
#include "pipesearch/problem.hpp"
#include "pipesearch/sched.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitIoError = 2;

std::vector<ps::bench::Scheduler> parse_scheduler_list(const std::string& arg) {
    std::vector<ps::bench::Scheduler> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(ps::bench::scheduler_from_string(item));
    }
    if (out.empty()) throw std::invalid_argument("empty scheduler list");
    return out;
}

void print_tree_summary(const ps::mcts::SearchResult& result, std::ostream& os) {
    const ps::tree::Node& root = result.tree->root();
    os << "tree: root n=" << root.visits();
    if (root.expandable()) {
        os << ", children:";
        for (int i = 0; i < root.num_children(); ++i) {
            const ps::tree::Node* c = root.child(i);
            const double m = c->visits() > 0
                                 ? static_cast<double>(c->reward_raw()) /
                                       (static_cast<double>(c->visits()) * ps::tree::kRewardScale)
                                 : 0.0;
            os << " [move " << c->move() << " n=" << c->visits() << " mean=" << m << "]";
        }
    }
    os << "\n";
}

int run_solve(const std::string& problem_selector, const std::string& scheduler_name,
              std::int64_t tokens, int threads, std::int64_t playouts, double cp,
              std::uint64_t seed, bool linear, std::optional<std::int64_t> target_ops) {
    auto prob = ps::problem::parse_selector(problem_selector);
    auto root = prob->root_state();

    ps::sched::PipelineConfig config;
    config.token_limit = tokens;
    config.worker_threads = threads;
    config.cp = cp;
    config.seed = seed;
    config.budget.max_playouts = playouts;
    config.linear_pipeline = linear;
    if (target_ops) {
        config.target.kind = ps::mcts::StopTarget::Kind::cost_at_most;
        config.target.cost = *target_ops;
    }

    ps::mcts::SearchResult result;
    switch (ps::bench::scheduler_from_string(scheduler_name)) {
        case ps::bench::Scheduler::sequential:
            result = ps::sched::run_sequential(*root, config);
            break;
        case ps::bench::Scheduler::tree_parallel:
            result = ps::sched::run_tree_parallel(*root, config);
            break;
        case ps::bench::Scheduler::pipeline:
            result = ps::sched::run_pipeline(*root, config);
            break;
    }

    std::cout << "problem: " << prob->name() << "\n";
    std::cout << "playouts: " << result.playouts << "\n";
    std::cout << "best move: " << result.best_move << "\n";
    std::cout << "best ops: " << result.best_cost << "\n";
    std::cout << "best order:";
    for (int m : result.best_path) std::cout << " " << m;
    std::cout << "\n";
    if (target_ops) {
        std::cout << "target hit: " << (result.target_hit ? "yes" : "no") << "\n";
    }
    print_tree_summary(result, std::cout);
    return kExitOk;
}

int run_bench(ps::bench::BenchmarkConfig config, const std::string& out_path,
              const std::string& format_name) {
    ps::bench::OutputFormat format;
    if (format_name == "csv") {
        format = ps::bench::OutputFormat::csv;
    } else if (format_name == "json") {
        format = ps::bench::OutputFormat::json;
    } else {
        throw std::invalid_argument("format must be csv or json");
    }

    std::vector<ps::bench::RunRecord> records = ps::bench::run_matrix(config);
    if (out_path.empty() || out_path == "-") {
        ps::bench::emit(records, format, std::cout);
    } else {
        ps::bench::emit_file(records, format, out_path);
        std::cerr << "wrote " << records.size() << " records to " << out_path << "\n";
    }

    const bool have_seq = std::any_of(records.begin(), records.end(), [](const auto& r) {
        return r.scheduler == ps::bench::to_string(ps::bench::Scheduler::sequential);
    });
    if (have_seq && records.size() > 1) {
        std::cerr << "\nplayout speedup (vs sequential mean):\n";
        for (const auto& row : ps::bench::playout_speedup(records)) {
            std::fprintf(stderr, "  %-8s threads=%-3d tokens=%-4lld speedup=%.3f (par %.4fs +/- %.4fs, n=%d)\n",
                         ps::bench::to_string(row.scheduler).c_str(), row.worker_threads,
                         static_cast<long long>(row.token_limit), row.speedup, row.parallel_mean,
                         row.parallel_stddev, row.samples);
        }
        if (config.target_ops) {
            std::cerr << "\nsearch overhead (playouts to target vs sequential):\n";
            for (const auto& row : ps::bench::search_overhead(records, *config.target_ops)) {
                std::fprintf(stderr,
                             "  %-8s threads=%-3d tokens=%-4lld overhead=%.3f (censored %d/%d)\n",
                             ps::bench::to_string(row.scheduler).c_str(), row.worker_threads,
                             static_cast<long long>(row.token_limit), row.overhead, row.censored,
                             row.censored + row.samples);
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel MCTS over polynomial Horner orderings"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run one search configuration");
    std::string problem_selector;
    std::string scheduler_name = "seq";
    std::int64_t tokens = 0;
    int threads = 0;
    std::int64_t playouts = 1024;
    double cp = 0.1;
    std::uint64_t seed = 0;
    bool linear = false;
    std::int64_t target_ops_value = -1;
    solve->add_option("--problem", problem_selector, "horner:<path> or synthetic:b=..,d=..,seed=..")
        ->required();
    solve->add_option("--scheduler", scheduler_name, "seq|treepar|pipeline");
    solve->add_option("--tokens", tokens, "pipeline token limit (default: 2x threads)");
    solve->add_option("--threads", threads, "worker threads (default: available cores)");
    solve->add_option("--playouts", playouts, "search budget in playouts");
    solve->add_option("--cp", cp, "UCT exploration constant");
    solve->add_option("--seed", seed, "root random seed");
    solve->add_flag("--linear-pipeline", linear, "make every pipeline stage serial");
    solve->add_option("--target-ops", target_ops_value, "stop when best ops <= target");

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark matrix");
    ps::bench::BenchmarkConfig bc;
    std::string scheduler_list = "seq";
    std::string out_path;
    std::string format_name = "csv";
    std::int64_t bench_target_ops = -1;
    bool no_warmup = false;
    bench->add_option("--problem", bc.problem_selector, "problem selector")->required();
    bench->add_option("--scheduler", scheduler_list, "comma list of seq|treepar|pipeline");
    bench->add_option("--tokens", bc.token_limits, "token limits to sweep")->delimiter(',');
    bench->add_option("--threads", bc.thread_counts, "thread counts to sweep")->delimiter(',');
    bench->add_option("--playouts", bc.playouts, "budget per run");
    bench->add_option("--cp", bc.cp, "UCT exploration constant");
    bench->add_option("--seed", bc.seed, "master seed");
    bench->add_option("--repeats", bc.repeats, "repeats per cell");
    bench->add_option("--out", out_path, "output path (default stdout)");
    bench->add_option("--format", format_name, "csv|json");
    bench->add_flag("--linear-pipeline", bc.linear_pipeline, "make every pipeline stage serial");
    bench->add_option("--target-ops", bench_target_ops,
                      "first-hit mode: stop each run when best ops <= target");
    bench->add_flag("--no-warmup", no_warmup, "skip the untimed warmup run per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (solve->parsed()) {
            if (threads <= 0) {
                const unsigned hw = std::thread::hardware_concurrency();
                threads = hw == 0 ? 1 : static_cast<int>(hw);
            }
            if (tokens <= 0) tokens = 2 * static_cast<std::int64_t>(threads);
            std::optional<std::int64_t> target;
            if (target_ops_value >= 0) target = target_ops_value;
            return run_solve(problem_selector, scheduler_name, tokens, threads, playouts, cp, seed,
                             linear, target);
        }
        bc.schedulers = parse_scheduler_list(scheduler_list);
        if (bench_target_ops >= 0) bc.target_ops = bench_target_ops;
        bc.warmup = !no_warmup;
        return run_bench(bc, out_path, format_name);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}
