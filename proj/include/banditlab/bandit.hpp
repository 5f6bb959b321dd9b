#pragma once

#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

/// Beta posterior counts for one arm: alpha-1 successes and beta-1 failures
/// observed on top of the uniform Beta(1,1) prior. Both counts stay >= 1.
struct ArmPosterior {
    int alpha = 1;
    int beta = 1;

    int pulls() const noexcept { return alpha + beta - 2; }
    friend bool operator==(const ArmPosterior&, const ArmPosterior&) = default;
};

/// Posterior mean alpha / (alpha + beta). Throws std::invalid_argument for
/// counts below 1.
double success_probability(const ArmPosterior& arm);

enum class Outcome : int { failure = 0, success = 1 };

/// Bandit MDP state: ordered per-arm posteriors plus the decision step
/// t >= 1. States reached from the prior by pulling one arm per step
/// satisfy sum_i pulls(arm_i) == t - 1.
struct BanditState {
    std::vector<ArmPosterior> arms;
    int t = 1;

    int n_arms() const noexcept { return static_cast<int>(arms.size()); }
};

/// Successor state: the chosen arm's alpha (success) or beta (failure) is
/// incremented and t advances by one. Arm indices are 0-based; out-of-range
/// indices throw std::invalid_argument.
BanditState transition(const BanditState& state, int arm_index, Outcome outcome);

/// Hidden truth of one simulated problem. prior_alpha/prior_beta record the
/// belief counts an episode starts from.
struct ProblemInstance {
    std::vector<double> mu;
    std::vector<double> rewards;
    int horizon = 0;
    bool constrained = false;
    std::vector<int> prior_alpha;
    std::vector<int> prior_beta;

    int n_arms() const noexcept { return static_cast<int>(mu.size()); }
};

/// Experiment prior: arm count, the ordering-constraint flag, per-arm
/// success rewards, and per-arm prior Beta counts.
struct PriorSpec {
    int n_arms = 2;
    bool constrained = false;
    std::vector<double> rewards;   // empty means all ones
    std::vector<int> prior_alpha;  // empty means all ones
    std::vector<int> prior_beta;
};

/// Convenience constructor filling reward/prior defaults.
PriorSpec make_prior(int n_arms, bool constrained = false, std::vector<double> rewards = {});

/// Throws std::invalid_argument when sizes disagree, counts are below 1,
/// rewards are not positive, or the constrained flags' requirements are
/// violated (strictly increasing rewards, identical per-arm priors).
void validate_prior(const PriorSpec& prior);

/// Belief state at t = 1 with every arm at its prior counts.
BanditState initial_state(const PriorSpec& prior);

/// Largest prior evidence depth max_i(alpha0_i + beta0_i - 2); zero for the
/// uniform prior. Value tables consumed at decision time t must cover this
/// much extra depth beyond t.
int prior_extra_depth(const PriorSpec& prior);

/// Draws the hidden success probabilities. Unconstrained arms are
/// independent Beta(prior_alpha_i, prior_beta_i); the constrained case
/// draws i.i.d. and sorts descending, which is exactly the prior
/// conditioned on the ordering event mu_1 >= ... >= mu_N.
ProblemInstance sample_instance(const PriorSpec& prior, RandomStream& rng, int horizon = 0);

/// One Bernoulli(mu[arm]) pull.
Outcome pull(const ProblemInstance& instance, int arm_index, RandomStream& rng);

/// All (alpha, beta) with alpha, beta >= 1 and alpha+beta-2 <= t-1, sorted
/// by (alpha+beta, alpha); exactly t(t+1)/2 states.
std::vector<ArmPosterior> enumerate_arm_states(int t);

/// Triangular-array indexing shared by the table types: states at evidence
/// depth d = alpha+beta-2 occupy slots offset(d) .. offset(d)+d.
namespace tri {
constexpr std::size_t offset(int depth) noexcept {
    return static_cast<std::size_t>(depth) * (depth + 1) / 2;
}
constexpr std::size_t size(int max_depth) noexcept { return offset(max_depth + 1); }
}

}
