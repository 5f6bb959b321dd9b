#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "banditlab/elsv.hpp"

namespace banditlab {

/// Action value of pulling `arm_index` at `state` under per-arm value
/// tables:  p * (reward + v(success state)) + (1-p) * v(failure state),
/// where v is the separable table value of the full successor.
double q_value(const BanditState& state, int arm_index, const TableList& tables,
               std::span<const double> rewards);

struct LookaheadStats {
    std::size_t expanded = 0;          // distinct internal states max-backed-up
    std::size_t frontier_states = 0;   // distinct depth-n states evaluated
};

/**
 * n-step expectimax from `state`: outcome branches are merged by arm-state
 * tuple (pull order does not matter, only counts), rewards accumulate along
 * the tree, and frontier states are scored by the separable value under
 * `frontier_tables` — which must be the tables for decision time
 * state.t + depth - 1 so that depth 1 is exactly the one-step rule.
 * Returns the 0-based arm maximizing the root q, ties as argmax_near_ties.
 */
int lookahead_choose(const BanditState& state, int depth, const TableList& frontier_tables,
                     std::span<const double> rewards, LookaheadStats* stats = nullptr);

struct PlannerConfig {
    int depth = 1;
    int sample_count = 10000;  // posterior draws per decision (constrained rule)
    int min_accepted = 100;    // fallback threshold for the rejection sampler
};

struct ConstrainedMeans {
    std::vector<double> means;
    int accepted = 0;
    bool fallback = false;  // true when the unconstrained means were used
};

/// Rejection estimate of E[mu | data, mu_1 >= ... >= mu_N]: draws
/// sample_count posterior vectors, keeps those satisfying the ordering,
/// and averages. Falls back to the unconstrained posterior means (flagged)
/// when fewer than min_accepted survive.
ConstrainedMeans constrained_posterior_means(const BanditState& state, RandomStream& rng,
                                             int sample_count, int min_accepted);

/// One-step lookahead with the rejection-estimated constrained means
/// substituted for the per-arm success probabilities:
///   q_i = m_i * (r_i + v(success)) + (1 - m_i) * v(failure).
/// Tables are the decision-time tables for state.t.
int constrained_lookahead_choose(const BanditState& state, const TableList& tables,
                                 std::span<const double> rewards, RandomStream& rng,
                                 const PlannerConfig& config,
                                 ConstrainedMeans* means_out = nullptr);

}
