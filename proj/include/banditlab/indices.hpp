#pragma once

#include <memory>
#include <span>
#include <string>

#include "banditlab/bandit.hpp"

namespace banditlab {

struct UcbParams {
    double ucb_alpha = 1.0;  // exploration weight inside the square root
};

/// Optimistic index: posterior mean + sqrt(ucb_alpha * log(t) / pulls),
/// with the pull count floored at 1 so unexplored arms get a finite bonus.
/// t may be any real >= 1 (policies pass the integer decision step).
double ucb_index(const ArmPosterior& arm, double t, const UcbParams& params = {});

/// The exploration bonus alone (index minus posterior mean, closed form).
double ucb_bonus_value(const ArmPosterior& arm, double t, const UcbParams& params = {});

/// Upper posterior quantile index: the Beta(alpha, beta) quantile at level
/// 1 - 1/(t * log(horizon)^c), clamped to [0.5, 1 - 1e-12]. Requires
/// 1 <= t <= horizon.
double bayes_ucb_index(const ArmPosterior& arm, int t, int horizon, double c = 0.0);

/**
 * A per-arm index z(arm, t) decomposable as posterior mean + bonus.
 * Implementations keep index == mean + bonus exact by construction (one
 * side is defined in terms of the other).
 */
class IndexFunction {
  public:
    virtual ~IndexFunction() = default;
    virtual double index(const ArmPosterior& arm, int t) const = 0;
    virtual double bonus(const ArmPosterior& arm, int t) const = 0;
    virtual std::string name() const = 0;
};

class UcbIndex final : public IndexFunction {
  public:
    explicit UcbIndex(UcbParams params = {}) : params_(params) {}
    double index(const ArmPosterior& arm, int t) const override;
    double bonus(const ArmPosterior& arm, int t) const override;
    std::string name() const override;

  private:
    UcbParams params_;
};

class BayesUcbIndex final : public IndexFunction {
  public:
    BayesUcbIndex(int horizon, double c = 0.0) : horizon_(horizon), c_(c) {}
    double index(const ArmPosterior& arm, int t) const override;
    double bonus(const ArmPosterior& arm, int t) const override;
    std::string name() const override;

  private:
    int horizon_;
    double c_;
};

/// Zero bonus: the index is the posterior mean (greedy).
class GreedyIndex final : public IndexFunction {
  public:
    double index(const ArmPosterior& arm, int t) const override;
    double bonus(const ArmPosterior&, int) const override { return 0.0; }
    std::string name() const override { return "greedy"; }
};

/// Deterministic argmax with a measured-noise tie rule: a candidate must
/// beat the running best by more than 1e-10 * (1 + |best|) to replace it,
/// so the lowest index wins among near-ties. Table values carry
/// accumulated rounding on that order, and grid-quantized indices produce
/// exact cross-state ties that plain comparison would break arbitrarily.
/// Every chooser in the library routes through this one rule so that
/// policies proven equal-valued pick identical arms.
int argmax_near_ties(std::span<const double> values);

/// Chooses argmax_i index(arm_i, state.t); ties (and near-ties, see
/// argmax_near_ties) go to the lowest arm index. Returns a 0-based arm.
int index_policy_choose(const BanditState& state, const IndexFunction& index);

/// Revenue-weighted variant: argmax_i rewards[i] * index(arm_i, t).
/// Identical to the plain form when every reward is 1.
int index_policy_choose(const BanditState& state, const IndexFunction& index,
                        std::span<const double> rewards);

/// Thompson sampling: one Beta draw per arm (in arm order), argmax of the
/// samples, ties to the lowest index.
int thompson_choose(const BanditState& state, RandomStream& rng);

/// Revenue-weighted Thompson sampling: argmax_i rewards[i] * theta_i.
int thompson_choose(const BanditState& state, RandomStream& rng,
                    std::span<const double> rewards);

}
