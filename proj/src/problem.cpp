#include "pipesearch/problem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pipesearch/rng.hpp"

namespace ps::problem {

namespace {

std::int64_t horner_cse_cost(const poly::Polynomial& p, const std::vector<int>& order) {
    poly::HornerScheme scheme{order};
    return poly::count_ops(poly::cse(poly::horner_transform(p, scheme))).total;
}

std::vector<int> identity_order(int nvars) {
    std::vector<int> order(nvars);
    for (int i = 0; i < nvars; ++i) order[i] = i;
    return order;
}

}  // namespace

// --- HornerState -----------------------------------------------------------

std::unique_ptr<SearchState> HornerState::clone() const {
    return std::unique_ptr<SearchState>(new HornerState(*this));
}

std::vector<Move> HornerState::untried_moves() const {
    const int nvars = shared_->polynomial.nvars;
    std::vector<bool> taken(nvars, false);
    for (Move m : chosen_) taken[m] = true;
    std::vector<Move> moves;
    moves.reserve(nvars - chosen_.size());
    for (int v = 0; v < nvars; ++v) {
        if (!taken[v]) moves.push_back(v);
    }
    return moves;
}

void HornerState::set_move(Move m) {
    const int nvars = shared_->polynomial.nvars;
    if (m < 0 || m >= nvars) {
        throw std::invalid_argument("HornerState: move out of range");
    }
    if (std::find(chosen_.begin(), chosen_.end(), m) != chosen_.end()) {
        throw std::invalid_argument("HornerState: variable already chosen");
    }
    chosen_.push_back(m);
    cached_cost_ = -1;
}

bool HornerState::is_terminal() const {
    return static_cast<int>(chosen_.size()) == shared_->polynomial.nvars;
}

std::int64_t HornerState::terminal_cost() const {
    if (!is_terminal()) {
        throw std::invalid_argument("HornerState: cost of a non-terminal state");
    }
    if (cached_cost_ < 0) {
        cached_cost_ = horner_cse_cost(shared_->polynomial, chosen_);
    }
    return cached_cost_;
}

double HornerState::evaluate() const {
    const std::int64_t ops = terminal_cost();
    const double delta =
        static_cast<double>(shared_->baseline_ops) / static_cast<double>(std::max<std::int64_t>(ops, 1));
    return std::clamp(delta, 0.0, 1.0);
}

// --- SyntheticState ---------------------------------------------------------

SyntheticState::SyntheticState(int branching, int depth, std::uint64_t seed, std::int64_t spin_us)
    : branching_(branching), depth_(depth), seed_(seed), spin_us_(spin_us) {
    if (branching < 1 || depth < 1) {
        throw std::invalid_argument("SyntheticState: branching and depth must be >= 1");
    }
}

std::unique_ptr<SearchState> SyntheticState::clone() const {
    return std::make_unique<SyntheticState>(*this);
}

std::vector<Move> SyntheticState::untried_moves() const {
    if (static_cast<int>(path_.size()) >= depth_) return {};
    std::vector<Move> moves(branching_);
    for (int i = 0; i < branching_; ++i) moves[i] = i;
    return moves;
}

void SyntheticState::set_move(Move m) {
    if (static_cast<int>(path_.size()) >= depth_) {
        throw std::invalid_argument("SyntheticState: move on a terminal state");
    }
    if (m < 0 || m >= branching_) {
        throw std::invalid_argument("SyntheticState: branch out of range");
    }
    path_.push_back(m);
}

bool SyntheticState::is_terminal() const {
    return static_cast<int>(path_.size()) == depth_;
}

std::uint64_t SyntheticState::payoff_hash() const {
    // Geometrically weighted average of one uniform draw per path prefix,
    // folded back into a 64-bit scalar. Prefixes shared by two paths
    // contribute identical summands, so subtree payoff means correlate with
    // subtree maxima and the landscape has gradients a mean-backup search
    // can follow, while every leaf value stays a deterministic, enumerable
    // function of (seed, path).
    if (path_.empty()) return 0;
    std::uint64_t h = mix64(seed_, 0x53594e5448ULL);  // "SYNTH"
    const int top = std::min(depth_, 48);
    unsigned __int128 sum = 0;
    unsigned __int128 weight_total = 0;
    for (std::size_t k = 0; k < path_.size(); ++k) {
        h = mix64(h, static_cast<std::uint64_t>(path_[k]) + 1);
        const int exp = std::max(0, top - static_cast<int>(k) - 1);
        sum += static_cast<unsigned __int128>(h) << exp;
        weight_total += static_cast<unsigned __int128>(1) << exp;
    }
    return static_cast<std::uint64_t>(sum / weight_total);
}

double SyntheticState::reward_from_hash(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::int64_t SyntheticState::cost_from_hash(std::uint64_t h) {
    return static_cast<std::int64_t>(~h >> 1);
}

double SyntheticState::evaluate() const {
    if (!is_terminal()) {
        throw std::invalid_argument("SyntheticState: evaluate on a non-terminal state");
    }
    if (spin_us_ > 0) {
        // busy work standing in for an expensive playout evaluation
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::microseconds(spin_us_);
        std::uint64_t sink = seed_;
        do {
            for (int i = 0; i < 64; ++i) sink = mix64(sink);
        } while (std::chrono::steady_clock::now() < deadline);
        if (sink == 0x5eed) return 0.0;  // keep the loop alive
    }
    return reward_from_hash(payoff_hash());
}

std::int64_t SyntheticState::terminal_cost() const {
    if (!is_terminal()) {
        throw std::invalid_argument("SyntheticState: cost of a non-terminal state");
    }
    return cost_from_hash(payoff_hash());
}

// --- Problems ----------------------------------------------------------------

HornerProblem::HornerProblem(poly::Polynomial p) {
    auto shared = std::make_shared<HornerState::Shared>();
    shared->polynomial = std::move(p);
    if (shared->polynomial.nvars < 1) {
        throw std::invalid_argument("HornerProblem: polynomial has no variables");
    }
    shared->baseline_ops =
        horner_cse_cost(shared->polynomial, identity_order(shared->polynomial.nvars));
    shared_ = std::move(shared);
}

std::unique_ptr<SearchState> HornerProblem::root_state() const {
    return std::unique_ptr<SearchState>(new HornerState(shared_));
}

std::string HornerProblem::name() const {
    std::ostringstream os;
    os << "horner(nvars=" << shared_->polynomial.nvars
       << ",terms=" << shared_->polynomial.terms.size() << ",baseline=" << shared_->baseline_ops
       << ")";
    return os.str();
}

SyntheticProblem::SyntheticProblem(int branching, int depth, std::uint64_t seed,
                                   std::int64_t spin_us)
    : branching_(branching), depth_(depth), seed_(seed), spin_us_(spin_us) {
    if (branching < 1 || depth < 1) {
        throw std::invalid_argument("SyntheticProblem: branching and depth must be >= 1");
    }
}

std::unique_ptr<SearchState> SyntheticProblem::root_state() const {
    return std::make_unique<SyntheticState>(branching_, depth_, seed_, spin_us_);
}

std::string SyntheticProblem::name() const {
    std::ostringstream os;
    os << "synthetic(b=" << branching_ << ",d=" << depth_ << ",seed=" << seed_ << ")";
    return os.str();
}

SyntheticOptimum enumerate_synthetic(const SyntheticProblem& p) {
    double leaves = std::pow(static_cast<double>(p.branching()), p.depth());
    if (leaves > 4e6) {
        throw std::invalid_argument("enumerate_synthetic: state space too large to enumerate");
    }
    SyntheticOptimum best;
    std::uint64_t best_hash = 0;
    bool have = false;

    std::vector<Move> path(p.depth(), 0);
    SyntheticState probe(p.branching(), p.depth(), p.seed());
    for (;;) {
        SyntheticState leaf = probe;
        for (Move m : path) leaf.set_move(m);
        std::uint64_t h = leaf.payoff_hash();
        if (!have || h > best_hash) {
            best.path = path;
            best_hash = h;
            best.unique = true;
            have = true;
        } else if (h == best_hash) {
            best.unique = false;
        }
        // odometer increment
        int i = p.depth() - 1;
        while (i >= 0 && ++path[i] == p.branching()) path[i--] = 0;
        if (i < 0) break;
    }
    best.reward = SyntheticState::reward_from_hash(best_hash);
    best.cost = SyntheticState::cost_from_hash(best_hash);
    return best;
}

namespace {

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
}

std::unique_ptr<Problem> parse_synthetic_selector(const std::string& args) {
    std::int64_t b = -1, d = -1, spin_us = 0;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::stringstream ss(args);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("synthetic selector: expected key=value, got '" + kv + "'");
        }
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (key == "b") {
            b = static_cast<std::int64_t>(parse_u64(value));
        } else if (key == "d") {
            d = static_cast<std::int64_t>(parse_u64(value));
        } else if (key == "seed") {
            seed = parse_u64(value);
            have_seed = true;
        } else if (key == "spin_us") {
            spin_us = static_cast<std::int64_t>(parse_u64(value));
        } else {
            throw std::invalid_argument("synthetic selector: unknown key '" + key + "'");
        }
    }
    if (b < 1 || d < 1 || !have_seed) {
        throw std::invalid_argument("synthetic selector: need b=<int>,d=<int>,seed=<int>");
    }
    return std::make_unique<SyntheticProblem>(static_cast<int>(b), static_cast<int>(d), seed,
                                              spin_us);
}

}  // namespace

std::unique_ptr<Problem> parse_selector(const std::string& selector) {
    auto colon = selector.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("problem selector must be horner:<path> or synthetic:...");
    }
    std::string kind = selector.substr(0, colon);
    std::string rest = selector.substr(colon + 1);
    if (kind == "horner") {
        std::ifstream in(rest);
        if (!in) throw std::runtime_error("cannot open polynomial file '" + rest + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return std::make_unique<HornerProblem>(poly::parse_polynomial(buf.str()));
    }
    if (kind == "synthetic") {
        return parse_synthetic_selector(rest);
    }
    throw std::invalid_argument("unknown problem kind '" + kind + "'");
}

}  // namespace ps::problem
