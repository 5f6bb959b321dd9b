#include "banditlab/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace banditlab {

namespace {

// Arm tuples pack into one u32 per arm; counts stay far below 2^16 for any
// horizon this project runs.
struct TupleKey {
    std::vector<std::uint32_t> packed;
    bool operator==(const TupleKey&) const = default;
};

struct TupleHash {
    std::size_t operator()(const TupleKey& key) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the packed words
        for (std::uint32_t w : key.packed) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

TupleKey make_key(const std::vector<ArmPosterior>& arms) {
    TupleKey key;
    key.packed.reserve(arms.size());
    for (const ArmPosterior& arm : arms) {
        if (arm.alpha >= 0x10000 || arm.beta >= 0x10000) {
            throw std::invalid_argument("lookahead: arm counts exceed the packed key range");
        }
        key.packed.push_back(static_cast<std::uint32_t>(arm.alpha) << 16 |
                             static_cast<std::uint32_t>(arm.beta));
    }
    return key;
}

// Expectimax over the merged outcome DAG. Arms are mutated in place while
// recursing; states are memoized by their arm tuple (the level is implied
// by the total pull count, so tuples cannot collide across levels).
class Expectimax {
  public:
    Expectimax(const TableList& tables, std::span<const double> rewards)
        : tables_(tables), rewards_(rewards) {}

    double q_of(std::vector<ArmPosterior>& arms, int arm, int remaining) {
        const double p = success_probability(arms[arm]);
        arms[arm].alpha += 1;
        const double v_succ = value(arms, remaining - 1);
        arms[arm].alpha -= 1;
        arms[arm].beta += 1;
        const double v_fail = value(arms, remaining - 1);
        arms[arm].beta -= 1;
        return p * (rewards_[arm] + v_succ) + (1.0 - p) * v_fail;
    }

    double value(std::vector<ArmPosterior>& arms, int remaining) {
        const TupleKey key = make_key(arms);
        auto& memo = remaining == 0 ? frontier_ : internal_;
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        double result;
        if (remaining == 0) {
            result = separable_value(tables_, std::span<const ArmPosterior>(arms));
        } else {
            result = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
                result = std::max(result, q_of(arms, a, remaining));
            }
        }
        memo.emplace(key, result);
        return result;
    }

    std::size_t internal_count() const { return internal_.size(); }
    std::size_t frontier_count() const { return frontier_.size(); }

  private:
    const TableList& tables_;
    std::span<const double> rewards_;
    std::unordered_map<TupleKey, double, TupleHash> internal_;
    std::unordered_map<TupleKey, double, TupleHash> frontier_;
};

void check_choose_args(const BanditState& state, const TableList& tables,
                       std::span<const double> rewards) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    if (tables.size() != static_cast<std::size_t>(state.n_arms())) {
        throw std::invalid_argument("lookahead: table count does not match the arm count");
    }
    if (rewards.size() != static_cast<std::size_t>(state.n_arms())) {
        throw std::invalid_argument("lookahead: rewards size does not match the arm count");
    }
}

}

double q_value(const BanditState& state, int arm_index, const TableList& tables,
               std::span<const double> rewards) {
    check_choose_args(state, tables, rewards);
    if (arm_index < 0 || arm_index >= state.n_arms()) {
        throw std::invalid_argument("q_value: arm index out of range");
    }
    Expectimax search(tables, rewards);
    std::vector<ArmPosterior> arms = state.arms;
    return search.q_of(arms, arm_index, 1);
}

int lookahead_choose(const BanditState& state, int depth, const TableList& frontier_tables,
                     std::span<const double> rewards, LookaheadStats* stats) {
    check_choose_args(state, frontier_tables, rewards);
    if (depth < 1) throw std::invalid_argument("lookahead depth must be >= 1");
    if (depth == 1) {
        // One-step decisions dominate the benchmark inner loops, and their
        // successors go straight to the tables, so skip the memo machinery.
        // The arithmetic matches Expectimax::q_of term for term, keeping
        // the choice bitwise identical to the general path.
        std::vector<ArmPosterior> arms = state.arms;
        std::vector<double> q(arms.size());
        for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
            const double p = success_probability(arms[a]);
            arms[a].alpha += 1;
            const double v_succ =
                separable_value(frontier_tables, std::span<const ArmPosterior>(arms));
            arms[a].alpha -= 1;
            arms[a].beta += 1;
            const double v_fail =
                separable_value(frontier_tables, std::span<const ArmPosterior>(arms));
            arms[a].beta -= 1;
            q[a] = p * (rewards[a] + v_succ) + (1.0 - p) * v_fail;
        }
        if (stats) {
            stats->expanded = 1;                       // the root itself
            stats->frontier_states = 2 * arms.size();  // every one-step successor is distinct
        }
        return argmax_near_ties(q);
    }
    Expectimax search(frontier_tables, rewards);
    std::vector<ArmPosterior> arms = state.arms;
    std::vector<double> q(arms.size());
    for (int a = 0; a < static_cast<int>(arms.size()); ++a) {
        q[a] = search.q_of(arms, a, depth);
    }
    if (stats) {
        stats->expanded = search.internal_count() + 1;  // +1 for the root itself
        stats->frontier_states = search.frontier_count();
    }
    return argmax_near_ties(q);
}

ConstrainedMeans constrained_posterior_means(const BanditState& state, RandomStream& rng,
                                             int sample_count, int min_accepted) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    if (min_accepted < 1) throw std::invalid_argument("min_accepted must be >= 1");
    const int n = state.n_arms();

    ConstrainedMeans result;
    std::vector<double> sums(n, 0.0);
    std::vector<double> draw(n);
    for (int s = 0; s < sample_count; ++s) {
        bool ordered = true;
        for (int i = 0; i < n; ++i) {
            draw[i] = rng.beta(state.arms[i].alpha, state.arms[i].beta);
            if (i > 0 && draw[i] > draw[i - 1]) ordered = false;
        }
        if (ordered) {
            result.accepted += 1;
            for (int i = 0; i < n; ++i) sums[i] += draw[i];
        }
    }
    result.means.resize(n);
    if (result.accepted >= min_accepted) {
        for (int i = 0; i < n; ++i) sums[i] /= result.accepted;
        result.means = sums;
    } else {
        result.fallback = true;
        for (int i = 0; i < n; ++i) result.means[i] = success_probability(state.arms[i]);
    }
    return result;
}

int constrained_lookahead_choose(const BanditState& state, const TableList& tables,
                                 std::span<const double> rewards, RandomStream& rng,
                                 const PlannerConfig& config, ConstrainedMeans* means_out) {
    check_choose_args(state, tables, rewards);
    const ConstrainedMeans means =
        constrained_posterior_means(state, rng, config.sample_count, config.min_accepted);
    if (means_out) *means_out = means;

    std::vector<ArmPosterior> arms = state.arms;
    std::vector<double> q(arms.size());
    for (int a = 0; a < state.n_arms(); ++a) {
        arms[a].alpha += 1;
        const double v_succ = separable_value(tables, std::span<const ArmPosterior>(arms));
        arms[a].alpha -= 1;
        arms[a].beta += 1;
        const double v_fail = separable_value(tables, std::span<const ArmPosterior>(arms));
        arms[a].beta -= 1;
        q[a] = means.means[a] * (rewards[a] + v_succ) + (1.0 - means.means[a]) * v_fail;
    }
    return argmax_near_ties(q);
}

}
