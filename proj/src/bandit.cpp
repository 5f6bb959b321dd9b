#include "banditlab/bandit.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace banditlab {

namespace {
void check_counts(const ArmPosterior& arm) {
    if (arm.alpha < 1 || arm.beta < 1) {
        throw std::invalid_argument("arm posterior counts must be >= 1, got (alpha=" +
                                    std::to_string(arm.alpha) + ", beta=" +
                                    std::to_string(arm.beta) + ")");
    }
}

void check_arm_index(const BanditState& state, int arm_index) {
    if (arm_index < 0 || arm_index >= state.n_arms()) {
        throw std::invalid_argument("arm index " + std::to_string(arm_index) +
                                    " outside [0, " + std::to_string(state.n_arms()) + ")");
    }
}
}

double success_probability(const ArmPosterior& arm) {
    check_counts(arm);
    return static_cast<double>(arm.alpha) / (arm.alpha + arm.beta);
}

BanditState transition(const BanditState& state, int arm_index, Outcome outcome) {
    check_arm_index(state, arm_index);
    check_counts(state.arms[arm_index]);
    BanditState next = state;
    if (outcome == Outcome::success) {
        next.arms[arm_index].alpha += 1;
    } else {
        next.arms[arm_index].beta += 1;
    }
    next.t = state.t + 1;
    return next;
}

PriorSpec make_prior(int n_arms, bool constrained, std::vector<double> rewards) {
    PriorSpec prior;
    prior.n_arms = n_arms;
    prior.constrained = constrained;
    prior.rewards = std::move(rewards);
    if (prior.rewards.empty()) prior.rewards.assign(n_arms, 1.0);
    prior.prior_alpha.assign(n_arms, 1);
    prior.prior_beta.assign(n_arms, 1);
    validate_prior(prior);
    return prior;
}

void validate_prior(const PriorSpec& prior) {
    if (prior.n_arms < 1) {
        throw std::invalid_argument("prior needs at least one arm");
    }
    const auto n = static_cast<std::size_t>(prior.n_arms);
    if (!prior.rewards.empty() && prior.rewards.size() != n) {
        throw std::invalid_argument("rewards size " + std::to_string(prior.rewards.size()) +
                                    " != n_arms " + std::to_string(prior.n_arms));
    }
    for (double r : prior.rewards) {
        if (!(r > 0.0)) throw std::invalid_argument("success rewards must be positive");
    }
    if (prior.prior_alpha.size() != prior.prior_beta.size() ||
        (!prior.prior_alpha.empty() && prior.prior_alpha.size() != n)) {
        throw std::invalid_argument("per-arm prior count vectors must both have n_arms entries");
    }
    for (std::size_t i = 0; i < prior.prior_alpha.size(); ++i) {
        if (prior.prior_alpha[i] < 1 || prior.prior_beta[i] < 1) {
            throw std::invalid_argument("prior counts must be >= 1");
        }
    }
    if (prior.constrained) {
        if (!prior.rewards.empty()) {
            for (std::size_t i = 1; i < prior.rewards.size(); ++i) {
                if (!(prior.rewards[i] > prior.rewards[i - 1])) {
                    throw std::invalid_argument(
                        "constrained priors require strictly increasing rewards");
                }
            }
        }
        // Sorting iid draws only matches the conditioned prior when the
        // draws are exchangeable.
        for (std::size_t i = 1; i < prior.prior_alpha.size(); ++i) {
            if (prior.prior_alpha[i] != prior.prior_alpha[0] ||
                prior.prior_beta[i] != prior.prior_beta[0]) {
                throw std::invalid_argument(
                    "constrained priors require identical per-arm prior counts");
            }
        }
    }
}

BanditState initial_state(const PriorSpec& prior) {
    validate_prior(prior);
    BanditState state;
    state.t = 1;
    state.arms.reserve(prior.n_arms);
    for (int i = 0; i < prior.n_arms; ++i) {
        const int a = prior.prior_alpha.empty() ? 1 : prior.prior_alpha[i];
        const int b = prior.prior_beta.empty() ? 1 : prior.prior_beta[i];
        state.arms.push_back(ArmPosterior{a, b});
    }
    return state;
}

int prior_extra_depth(const PriorSpec& prior) {
    int extra = 0;
    for (std::size_t i = 0; i < prior.prior_alpha.size(); ++i) {
        extra = std::max(extra, prior.prior_alpha[i] + prior.prior_beta[i] - 2);
    }
    return extra;
}

ProblemInstance sample_instance(const PriorSpec& prior, RandomStream& rng, int horizon) {
    validate_prior(prior);
    ProblemInstance instance;
    instance.horizon = horizon;
    instance.constrained = prior.constrained;
    instance.rewards = prior.rewards.empty() ? std::vector<double>(prior.n_arms, 1.0)
                                             : prior.rewards;
    instance.prior_alpha = prior.prior_alpha.empty() ? std::vector<int>(prior.n_arms, 1)
                                                     : prior.prior_alpha;
    instance.prior_beta = prior.prior_beta.empty() ? std::vector<int>(prior.n_arms, 1)
                                                   : prior.prior_beta;
    instance.mu.resize(prior.n_arms);
    for (int i = 0; i < prior.n_arms; ++i) {
        instance.mu[i] = rng.beta(instance.prior_alpha[i], instance.prior_beta[i]);
    }
    if (prior.constrained) {
        std::sort(instance.mu.begin(), instance.mu.end(), std::greater<double>());
    }
    return instance;
}

Outcome pull(const ProblemInstance& instance, int arm_index, RandomStream& rng) {
    if (arm_index < 0 || arm_index >= instance.n_arms()) {
        throw std::invalid_argument("arm index " + std::to_string(arm_index) +
                                    " outside [0, " + std::to_string(instance.n_arms()) + ")");
    }
    return rng.bernoulli(instance.mu[arm_index]) ? Outcome::success : Outcome::failure;
}

std::vector<ArmPosterior> enumerate_arm_states(int t) {
    if (t < 1) throw std::invalid_argument("enumerate_arm_states: t must be >= 1");
    std::vector<ArmPosterior> states;
    states.reserve(tri::size(t - 1));
    for (int depth = 0; depth <= t - 1; ++depth) {
        for (int i = 0; i <= depth; ++i) {
            states.push_back(ArmPosterior{1 + i, 1 + depth - i});
        }
    }
    return states;
}

}
