#include "banditlab/indices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "banditlab/beta_math.hpp"

namespace banditlab {

double ucb_bonus_value(const ArmPosterior& arm, double t, const UcbParams& params) {
    if (!(t >= 1.0)) throw std::invalid_argument("ucb index needs t >= 1");
    if (!(params.ucb_alpha >= 0.0)) throw std::invalid_argument("ucb_alpha must be >= 0");
    const int pulls = std::max(arm.pulls(), 1);  // unexplored arms: finite bonus
    return std::sqrt(params.ucb_alpha * std::log(t) / pulls);
}

double ucb_index(const ArmPosterior& arm, double t, const UcbParams& params) {
    return success_probability(arm) + ucb_bonus_value(arm, t, params);
}

double bayes_ucb_index(const ArmPosterior& arm, int t, int horizon, double c) {
    if (t < 1 || horizon < t) {
        throw std::invalid_argument("bayes_ucb index needs 1 <= t <= horizon");
    }
    (void)success_probability(arm);  // validates the counts
    double level = 1.0 - 1.0 / (t * std::pow(std::log(static_cast<double>(horizon)), c));
    level = std::clamp(level, 0.5, 1.0 - 1e-12);
    return beta_quantile(level, arm.alpha, arm.beta);
}

double UcbIndex::index(const ArmPosterior& arm, int t) const {
    // mean + bonus with the same bonus expression bonus() returns, so the
    // decomposition is exact rather than merely close.
    return success_probability(arm) + ucb_bonus_value(arm, t, params_);
}

double UcbIndex::bonus(const ArmPosterior& arm, int t) const {
    return ucb_bonus_value(arm, t, params_);
}

std::string UcbIndex::name() const {
    std::string a = std::to_string(params_.ucb_alpha);
    a.erase(a.find_last_not_of('0') + 1);
    if (!a.empty() && a.back() == '.') a.pop_back();
    return "ucb(" + a + ")";
}

double BayesUcbIndex::index(const ArmPosterior& arm, int t) const {
    return bayes_ucb_index(arm, t, horizon_, c_);
}

double BayesUcbIndex::bonus(const ArmPosterior& arm, int t) const {
    return index(arm, t) - success_probability(arm);
}

std::string BayesUcbIndex::name() const {
    std::string c = std::to_string(c_);
    c.erase(c.find_last_not_of('0') + 1);
    if (!c.empty() && c.back() == '.') c.pop_back();
    return "bayes_ucb(c=" + c + ")";
}

double GreedyIndex::index(const ArmPosterior& arm, int) const {
    return success_probability(arm);
}

int argmax_near_ties(std::span<const double> values) {
    constexpr double kTieEps = 1e-10;
    if (values.empty()) throw std::invalid_argument("argmax of an empty range");
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best] + kTieEps * (1.0 + std::fabs(values[best]))) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

int index_policy_choose(const BanditState& state, const IndexFunction& index) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    std::vector<double> z(static_cast<std::size_t>(state.n_arms()));
    for (int i = 0; i < state.n_arms(); ++i) z[i] = index.index(state.arms[i], state.t);
    return argmax_near_ties(z);
}

int index_policy_choose(const BanditState& state, const IndexFunction& index,
                        std::span<const double> rewards) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    if (rewards.size() != static_cast<std::size_t>(state.n_arms())) {
        throw std::invalid_argument("rewards size does not match the arm count");
    }
    std::vector<double> z(static_cast<std::size_t>(state.n_arms()));
    for (int i = 0; i < state.n_arms(); ++i) {
        z[i] = rewards[i] * index.index(state.arms[i], state.t);
    }
    return argmax_near_ties(z);
}

int thompson_choose(const BanditState& state, RandomStream& rng) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    int best = 0;
    double best_draw = -1.0;
    for (int i = 0; i < state.n_arms(); ++i) {
        const ArmPosterior& arm = state.arms[i];
        (void)success_probability(arm);  // validates counts
        const double theta = rng.beta(arm.alpha, arm.beta);
        if (theta > best_draw) {
            best_draw = theta;
            best = i;
        }
    }
    return best;
}

int thompson_choose(const BanditState& state, RandomStream& rng,
                    std::span<const double> rewards) {
    if (state.arms.empty()) throw std::invalid_argument("state has no arms");
    if (rewards.size() != static_cast<std::size_t>(state.n_arms())) {
        throw std::invalid_argument("rewards size does not match the arm count");
    }
    int best = 0;
    double best_draw = -1.0;
    for (int i = 0; i < state.n_arms(); ++i) {
        const ArmPosterior& arm = state.arms[i];
        (void)success_probability(arm);
        const double weighted = rewards[i] * rng.beta(arm.alpha, arm.beta);
        if (weighted > best_draw) {
            best_draw = weighted;
            best = i;
        }
    }
    return best;
}

}
