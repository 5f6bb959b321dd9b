#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "banditlab/bandit.hpp"
#include "banditlab/gittins.hpp"
#include "banditlab/indices.hpp"

namespace banditlab {

/// Exploration bonus b(alpha, beta, t) feeding a value-table build.
using BonusFn = std::function<double(int alpha, int beta, int t)>;

struct BonusSpec {
    std::string name;  // stable id used in table headers and cache keys
    BonusFn fn;
};

BonusSpec zero_bonus();
BonusSpec ucb_bonus(double ucb_alpha);
BonusSpec gittins_bonus(std::shared_ptr<const GittinsTable> table);
/// Generic adapter: bonus of any decomposable index.
BonusSpec index_bonus(std::shared_ptr<const IndexFunction> index);

/**
 * Per-arm value table over the triangle alpha+beta-2 <= t-1.
 *
 * Built backwards from the outermost diagonal (pinned to zero) by
 *   v(alpha,beta) = p * v(alpha+1,beta) + (1-p) * v(alpha,beta+1) - b(alpha,beta)
 * with p the posterior mean, so every interior state satisfies the
 * one-step identity  E[v(S')] - v(s) = b(s)  by construction. Only value
 * *differences* matter to the induced policy.
 */
struct ValueTable {
    int t = 0;               // triangle covers alpha+beta-2 <= t-1
    int bonus_time = 0;      // time the bonus was evaluated at
    std::string bonus_name;
    std::vector<double> values;
    std::uint64_t updates = 0;  // recurrence applications spent building it

    /// Range-checked lookup; throws std::out_of_range naming the state.
    double at(int alpha, int beta) const;
    int max_depth() const noexcept { return t - 1; }
};

/// Builds the table for time index t with the bonus evaluated at t.
/// Throws ComputationError naming the state if the bonus is non-finite.
ValueTable compute_value_table(int t, const BonusFn& bonus);

/// Same, with the bonus evaluated at an explicit time (used when a table's
/// triangle must extend past the step its bonus belongs to).
ValueTable compute_value_table(int t, const BonusFn& bonus, int bonus_time);

using TableList = std::vector<std::shared_ptr<const ValueTable>>;

/// Sum of per-arm table values at the state's arm posteriors; the linearly
/// separable stand-in for the value of the joint state.
double separable_value(const TableList& tables, const BanditState& state);
double separable_value(const TableList& tables, std::span<const ArmPosterior> arms);

/**
 * Plot-friendly shift: adds per-diagonal constants, increasing inwards by
 * the fixed step  delta = max over interior states of
 * (posterior mean * success_reward + table-implied bonus),  so that the
 * shifted table satisfies  v(s) >= mean(s)*reward + E[v(S')]  everywhere a
 * value function would. The increment is constant across diagonals, so
 * every cross-arm q difference — and hence the induced policy — is
 * unchanged; applying it twice is a no-op up to rounding.
 */
ValueTable normalize_for_plot(const ValueTable& table, double success_reward);

/// Writes "mean,pulls,value" rows (header first) for contour plotting.
void export_contour_csv(const ValueTable& table, const std::string& path);

/// Writes "#elsv-table v1", a parameter line, then "alpha,beta,value" rows
/// sorted by (alpha+beta, alpha); round-trips bitwise.
void save_value_table(const ValueTable& table, const std::string& path);
ValueTable load_value_table(const std::string& path);

/**
 * Thread-safe memo of the tables consumed by lookahead policies.
 *
 * The table consumed at decision time t must (a) cover successor states one
 * step deeper than any reachable arm state and (b) carry the bonus
 * evaluated at t — that pairing is what makes one-step lookahead reproduce
 * the source index policy. decision_table(t) therefore builds the triangle
 * for time t+1 (+ extra prior depth) with bonus_time = t.
 */
class TableCache {
  public:
    explicit TableCache(BonusSpec bonus, int prior_extra_depth = 0);

    std::shared_ptr<const ValueTable> decision_table(int t);
    /// The same table shared by all n_arms arms.
    TableList decision_tables(int t, int n_arms);

    const std::string& bonus_name() const noexcept { return bonus_.name; }
    const BonusFn& bonus_fn() const noexcept { return bonus_.fn; }

  private:
    BonusSpec bonus_;
    int extra_;
    std::mutex mutex_;
    std::map<int, std::shared_ptr<const ValueTable>> cache_;
};

}
