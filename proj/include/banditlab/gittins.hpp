#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/bandit.hpp"
#include "banditlab/indices.hpp"

namespace banditlab {

struct GittinsParams {
    double gamma = 0.99;        // discount factor in (0, 1)
    int horizon = 1000;         // truncation depth of the retirement recursion
    double lambda_step = 1e-3;  // resolution of the retirement-rate grid
    int max_pulls = 200;        // deepest tabulated state, alpha+beta-2 <= max_pulls

    friend bool operator==(const GittinsParams&, const GittinsParams&) = default;
};

/**
 * Tabulated dynamic-allocation indices for Beta-Bernoulli arms.
 *
 * values is triangular over alpha+beta-2 <= max_pulls. Each entry is the
 * largest grid rate lambda at which continuing to sample the arm is weakly
 * preferred over retiring on lambda/(1-gamma) forever, i.e. the calibrated
 * per-pull value of the arm's state.
 */
struct GittinsTable {
    GittinsParams params;
    std::vector<double> values;

    /// Range-checked lookup; throws std::out_of_range naming the state.
    double at(int alpha, int beta) const;
    std::size_t state_count() const noexcept { return values.size(); }
};

inline constexpr std::uint64_t kDefaultGittinsBudget = 20'000'000'000ull;

/// Builds the table by sweeping the lambda grid; each grid value runs one
/// backward induction of the retirement problem over the full triangle up
/// to `horizon` (terminal diagonal pinned to the retirement value) and
/// marks which tabulated states still prefer continuation. Parallel over
/// grid points when OpenMP is available; bitwise identical to the serial
/// reference. Refuses configurations whose grid x state-space work exceeds
/// `budget` sweeps-times-states. Requires horizon > max_pulls.
GittinsTable compute_gittins_table(const GittinsParams& params,
                                   std::uint64_t budget = kDefaultGittinsBudget);

/// Serial reference implementation of the same computation.
GittinsTable compute_gittins_table_serial(const GittinsParams& params,
                                          std::uint64_t budget = kDefaultGittinsBudget);

/// Independent oracle for a single state: bisects the lambda grid, solving
/// the retirement recursion only on the subtree rooted at (alpha, beta)
/// (truncated at the same absolute depth). Agrees exactly with the swept
/// table entry.
double gittins_index_bisection(int alpha, int beta, const GittinsParams& params);

/// Table lookup as an index value.
double gittins_index(const GittinsTable& table, const ArmPosterior& arm);

/// Index-function adapter; the index ignores t and the bonus is
/// index - posterior mean.
class GittinsIndex final : public IndexFunction {
  public:
    explicit GittinsIndex(std::shared_ptr<const GittinsTable> table);
    double index(const ArmPosterior& arm, int t) const override;
    double bonus(const ArmPosterior& arm, int t) const override;
    std::string name() const override;
    const GittinsTable& table() const noexcept { return *table_; }

  private:
    std::shared_ptr<const GittinsTable> table_;
};

/// Writes "#gittins-table v1", a parameter line, then one
/// "alpha,beta,index" row per state sorted by (alpha+beta, alpha), at full
/// double precision (round-trips bitwise).
void save_table(const GittinsTable& table, const std::string& path);

/// Parses a saved table; malformed files throw IoError naming the line.
GittinsTable load_table(const std::string& path);

/// As above, but additionally requires the header parameters to equal
/// `expected` (mismatches throw IoError spelling out both sides).
GittinsTable load_table(const std::string& path, const GittinsParams& expected);

}
