#include "banditlab/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "banditlab/errors.hpp"

namespace banditlab {

namespace {

std::vector<double> effective_rewards(const PriorSpec& prior) {
    if (!prior.rewards.empty()) return prior.rewards;
    return std::vector<double>(static_cast<std::size_t>(prior.n_arms), 1.0);
}

// Deepest arm state (alpha+beta-2) whose dynamic-allocation index any part
// of the configured policy can query, plus a little slack.
int needed_max_pulls(const ExperimentConfig& config) {
    const int depth = config.policy.kind == PolicyKind::elsv ? config.policy.depth : 1;
    return config.horizon + depth + prior_extra_depth(config.prior);
}

std::shared_ptr<const GittinsTable> acquire_gittins_table(
    const ExperimentConfig& config, std::shared_ptr<const GittinsTable> provided) {
    const int needed = needed_max_pulls(config);
    if (provided) {
        if (provided->params.max_pulls < needed) {
            throw ConfigError("provided index table covers max_pulls=" +
                              std::to_string(provided->params.max_pulls) +
                              " but the experiment reaches states needing " +
                              std::to_string(needed));
        }
        return provided;
    }
    if (!config.gittins.table_path.empty()) {
        GittinsTable loaded = load_table(config.gittins.table_path);
        if (loaded.params.max_pulls < needed) {
            throw ConfigError("index table '" + config.gittins.table_path +
                              "' covers max_pulls=" + std::to_string(loaded.params.max_pulls) +
                              " but the experiment reaches states needing " +
                              std::to_string(needed));
        }
        return std::make_shared<const GittinsTable>(std::move(loaded));
    }
    GittinsParams params;
    params.gamma = config.gittins.gamma;
    params.lambda_step = config.gittins.lambda_step;
    params.max_pulls = config.gittins.max_pulls.value_or(needed);
    if (params.max_pulls < needed) {
        throw ConfigError("gittins_max_pulls=" + std::to_string(params.max_pulls) +
                          " does not cover the experiment (needs >= " + std::to_string(needed) +
                          ")");
    }
    // Keep the truncation margin of the defaults (1000 vs 200) when the
    // table has to grow past them.
    params.horizon = std::max(config.gittins.horizon, params.max_pulls + 800);
    return std::make_shared<const GittinsTable>(compute_gittins_table(params));
}

BonusSpec bonus_spec_from(const ExperimentConfig& config,
                          std::shared_ptr<const GittinsTable> gittins_table) {
    switch (config.policy.bonus) {
        case BonusKind::zero: return zero_bonus();
        case BonusKind::ucb: return ucb_bonus(config.policy.ucb_alpha);
        case BonusKind::gittins:
            return gittins_bonus(acquire_gittins_table(config, std::move(gittins_table)));
    }
    throw ConfigError("unhandled bonus kind");
}

class IndexPolicy final : public Policy {
  public:
    IndexPolicy(std::string name, std::unique_ptr<const IndexFunction> index,
                std::vector<double> rewards)
        : name_(std::move(name)), index_(std::move(index)), rewards_(std::move(rewards)) {}

    int choose(const BanditState& state, RandomStream&) override {
        return index_policy_choose(state, *index_, rewards_);
    }
    std::string name() const override { return name_; }

  private:
    std::string name_;
    std::unique_ptr<const IndexFunction> index_;
    std::vector<double> rewards_;
};

class ThompsonPolicy final : public Policy {
  public:
    ThompsonPolicy(std::string name, std::vector<double> rewards)
        : name_(std::move(name)), rewards_(std::move(rewards)) {}

    int choose(const BanditState& state, RandomStream& rng) override {
        return thompson_choose(state, rng, rewards_);
    }
    std::string name() const override { return name_; }

  private:
    std::string name_;
    std::vector<double> rewards_;
};

// Posterior sampling from the order-constrained posterior: keep the first
// of up to `sample_count` joint draws that satisfies mu_1 >= ... >= mu_N.
// When none does (posterior mass concentrated against the ordering), the
// last draw stands in so the policy always acts.
class ThompsonConstrainedPolicy final : public Policy {
  public:
    ThompsonConstrainedPolicy(std::string name, std::vector<double> rewards, int sample_count)
        : name_(std::move(name)), rewards_(std::move(rewards)), sample_count_(sample_count) {}

    int choose(const BanditState& state, RandomStream& rng) override {
        const int n = state.n_arms();
        std::vector<double> theta(static_cast<std::size_t>(n));
        for (int trial = 0; trial < sample_count_; ++trial) {
            bool ordered = true;
            for (int i = 0; i < n; ++i) {
                theta[i] = rng.beta(state.arms[i].alpha, state.arms[i].beta);
                if (i > 0 && theta[i] > theta[i - 1]) ordered = false;
            }
            if (ordered) break;
        }
        int best = 0;
        for (int i = 1; i < n; ++i) {
            if (rewards_[i] * theta[i] > rewards_[best] * theta[best]) best = i;
        }
        return best;
    }
    std::string name() const override { return name_; }
    bool requires_constrained_prior() const override { return true; }

  private:
    std::string name_;
    std::vector<double> rewards_;
    int sample_count_;
};

class ElsvPolicy final : public Policy {
  public:
    ElsvPolicy(std::string name, BonusSpec bonus, int prior_extra, int depth,
               std::vector<double> rewards)
        : name_(std::move(name)),
          cache_(std::move(bonus), prior_extra),
          depth_(depth),
          rewards_(std::move(rewards)) {}

    int choose(const BanditState& state, RandomStream&) override {
        const TableList tables = cache_.decision_tables(state.t + depth_ - 1, state.n_arms());
        return lookahead_choose(state, depth_, tables, rewards_);
    }
    std::string name() const override { return name_; }

  private:
    std::string name_;
    TableCache cache_;
    int depth_;
    std::vector<double> rewards_;
};

class ElsvConstrainedPolicy final : public Policy {
  public:
    ElsvConstrainedPolicy(std::string name, BonusSpec bonus, int prior_extra,
                          PlannerConfig planner, std::vector<double> rewards)
        : name_(std::move(name)),
          cache_(std::move(bonus), prior_extra),
          planner_(planner),
          rewards_(std::move(rewards)) {}

    int choose(const BanditState& state, RandomStream& rng) override {
        const TableList tables = cache_.decision_tables(state.t, state.n_arms());
        return constrained_lookahead_choose(state, tables, rewards_, rng, planner_);
    }
    std::string name() const override { return name_; }
    bool requires_constrained_prior() const override { return true; }

  private:
    std::string name_;
    TableCache cache_;
    PlannerConfig planner_;
    std::vector<double> rewards_;
};

}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config,
                                    std::shared_ptr<const GittinsTable> gittins_table) {
    config.validate();
    std::vector<double> rewards = effective_rewards(config.prior);
    const std::string name = config.policy.name();
    switch (config.policy.kind) {
        case PolicyKind::ucb:
            return std::make_unique<IndexPolicy>(
                name, std::make_unique<UcbIndex>(UcbParams{config.policy.ucb_alpha}),
                std::move(rewards));
        case PolicyKind::bayes_ucb:
            return std::make_unique<IndexPolicy>(
                name, std::make_unique<BayesUcbIndex>(config.horizon, config.policy.bayes_ucb_c),
                std::move(rewards));
        case PolicyKind::thompson:
            return std::make_unique<ThompsonPolicy>(name, std::move(rewards));
        case PolicyKind::thompson_constrained:
            return std::make_unique<ThompsonConstrainedPolicy>(name, std::move(rewards),
                                                               config.policy.sample_count);
        case PolicyKind::gittins:
            return std::make_unique<IndexPolicy>(
                name,
                std::make_unique<GittinsIndex>(
                    acquire_gittins_table(config, std::move(gittins_table))),
                std::move(rewards));
        case PolicyKind::elsv:
            return std::make_unique<ElsvPolicy>(
                name, bonus_spec_from(config, std::move(gittins_table)),
                prior_extra_depth(config.prior), config.policy.depth, std::move(rewards));
        case PolicyKind::elsv_constrained: {
            PlannerConfig planner;
            planner.depth = 1;
            planner.sample_count = config.policy.sample_count;
            planner.min_accepted = config.policy.min_accepted;
            return std::make_unique<ElsvConstrainedPolicy>(
                name, bonus_spec_from(config, std::move(gittins_table)),
                prior_extra_depth(config.prior), planner, std::move(rewards));
        }
    }
    throw ConfigError("unhandled policy kind");
}

std::vector<double> run_episode(Policy& policy, const ProblemInstance& instance,
                                RandomStream& rng) {
    if (policy.requires_constrained_prior() && !instance.constrained) {
        throw ConfigError("policy '" + policy.name() +
                          "' needs an ordering-constrained instance");
    }
    const int n = instance.n_arms();
    if (n < 1) throw ConfigError("instance has no arms");
    if (instance.horizon < 1) throw ConfigError("instance horizon must be >= 1");
    std::vector<double> rewards = instance.rewards;
    if (rewards.empty()) rewards.assign(static_cast<std::size_t>(n), 1.0);
    if (rewards.size() != static_cast<std::size_t>(n)) {
        throw ConfigError("instance rewards/mu size mismatch");
    }

    BanditState state;
    state.t = 1;
    state.arms.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        state.arms[i].alpha =
            instance.prior_alpha.empty() ? 1 : instance.prior_alpha[static_cast<std::size_t>(i)];
        state.arms[i].beta =
            instance.prior_beta.empty() ? 1 : instance.prior_beta[static_cast<std::size_t>(i)];
    }

    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) best = std::max(best, instance.mu[i] * rewards[i]);

    std::vector<double> regret(static_cast<std::size_t>(instance.horizon));
    for (int step = 0; step < instance.horizon; ++step) {
        const int arm = policy.choose(state, rng);
        if (arm < 0 || arm >= n) {
            throw ComputationError("policy '" + policy.name() + "' chose arm " +
                                   std::to_string(arm) + " of " + std::to_string(n));
        }
        regret[static_cast<std::size_t>(step)] = best - instance.mu[arm] * rewards[arm];
        state = transition(state, arm, pull(instance, arm, rng));
    }
    return regret;
}

namespace {

RegretCurve bayes_regret_impl(const ExperimentConfig& config,
                              std::shared_ptr<const GittinsTable> gittins_table, bool parallel) {
    config.validate();
    const std::unique_ptr<Policy> policy = make_policy(config, std::move(gittins_table));
    const int n = config.n_instances;
    const int horizon = config.horizon;

    // Per-instance regret traces, row k filled from the stream derived from
    // (master_seed, k); the schedule never touches the numbers.
    std::vector<double> traces(static_cast<std::size_t>(n) * horizon);
    std::atomic<bool> failed{false};
    int failed_index = std::numeric_limits<int>::max();
    std::string failure;

    auto run_one = [&](int k) {
        RandomStream rng = RandomStream::for_instance(config.master_seed, k);
        const ProblemInstance instance = sample_instance(config.prior, rng, horizon);
        const std::vector<double> trace = run_episode(*policy, instance, rng);
        std::copy(trace.begin(), trace.end(),
                  traces.begin() + static_cast<std::size_t>(k) * horizon);
    };

#ifdef _OPENMP
    const int max_threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) if (parallel) num_threads(max_threads)
    for (int k = 0; k < n; ++k) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            run_one(k);
        } catch (const std::exception& e) {
#pragma omp critical(banditlab_regret_failure)
            {
                if (k < failed_index) {
                    failed_index = k;
                    failure = e.what();
                }
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
#else
    (void)parallel;
    for (int k = 0; k < n && !failed.load(std::memory_order_relaxed); ++k) {
        try {
            run_one(k);
        } catch (const std::exception& e) {
            failed_index = k;
            failure = e.what();
            failed.store(true, std::memory_order_relaxed);
        }
    }
#endif
    if (failed.load()) {
        throw ComputationError("instance " + std::to_string(failed_index) + ": " + failure);
    }

    // Serial reduction in instance order: identical for every thread count.
    for (int k = 0; k < n; ++k) {
        double running = 0.0;
        double* row = traces.data() + static_cast<std::size_t>(k) * horizon;
        for (int t = 0; t < horizon; ++t) {
            running += row[t];
            row[t] = running;
        }
    }

    RegretCurve curve;
    curve.policy_name = policy->name();
    curve.master_seed = config.master_seed;
    curve.horizon = horizon;
    curve.n_instances = n;
    curve.single_instance = (n == 1);
    curve.ci_valid = (n >= 30);
    curve.mean_cum.assign(static_cast<std::size_t>(horizon), 0.0);
    curve.ci_half.assign(static_cast<std::size_t>(horizon), 0.0);

    for (int k = 0; k < n; ++k) {
        const double* row = traces.data() + static_cast<std::size_t>(k) * horizon;
        for (int t = 0; t < horizon; ++t) curve.mean_cum[static_cast<std::size_t>(t)] += row[t];
    }
    for (double& m : curve.mean_cum) m /= n;
    if (curve.ci_valid) {
        std::vector<double> ss(static_cast<std::size_t>(horizon), 0.0);
        for (int k = 0; k < n; ++k) {
            const double* row = traces.data() + static_cast<std::size_t>(k) * horizon;
            for (int t = 0; t < horizon; ++t) {
                const double d = row[t] - curve.mean_cum[static_cast<std::size_t>(t)];
                ss[static_cast<std::size_t>(t)] += d * d;
            }
        }
        for (int t = 0; t < horizon; ++t) {
            const double sd = std::sqrt(ss[static_cast<std::size_t>(t)] / (n - 1));
            curve.ci_half[static_cast<std::size_t>(t)] = 1.96 * sd / std::sqrt(double(n));
        }
    }
    return curve;
}

}

RegretCurve bayes_regret(const ExperimentConfig& config,
                         std::shared_ptr<const GittinsTable> gittins_table) {
    return bayes_regret_impl(config, std::move(gittins_table), true);
}

RegretCurve bayes_regret_serial(const ExperimentConfig& config,
                                std::shared_ptr<const GittinsTable> gittins_table) {
    return bayes_regret_impl(config, std::move(gittins_table), false);
}

void export_regret_csv(const RegretCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "t,mean_cum_regret,ci_low,ci_high,n\n";
    char buf[160];
    for (int t = 0; t < curve.horizon; ++t) {
        const double mean = curve.mean_cum[static_cast<std::size_t>(t)];
        const double hw = curve.ci_half[static_cast<std::size_t>(t)];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", t + 1, mean, mean - hw,
                      mean + hw, curve.n_instances);
        out << buf;
    }
    out.flush();
    if (!out) throw IoError("failed while writing '" + path + "'");
}

RegretCurve load_regret_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,mean_cum_regret,ci_low,ci_high,n") {
        throw IoError(path + ":1: expected header 't,mean_cum_regret,ci_low,ci_high,n'");
    }
    RegretCurve curve;
    int line_no = 1;
    int expected_t = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 5> fields;
        std::size_t start = 0;
        for (int f = 0; f < 5; ++f) {
            const std::size_t comma = line.find(',', start);
            if (f < 4 && comma == std::string::npos) {
                throw IoError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
            }
            if (f == 4 && comma != std::string::npos) {
                throw IoError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
            }
            fields[static_cast<std::size_t>(f)] =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        try {
            const int t = std::stoi(fields[0]);
            if (t != expected_t) {
                throw IoError(path + ":" + std::to_string(line_no) + ": expected t=" +
                              std::to_string(expected_t) + ", found " + fields[0]);
            }
            ++expected_t;
            const double mean = std::stod(fields[1]);
            const double lo = std::stod(fields[2]);
            const double hi = std::stod(fields[3]);
            curve.mean_cum.push_back(mean);
            curve.ci_half.push_back((hi - lo) / 2.0);
            curve.n_instances = std::stoi(fields[4]);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception&) {
            throw IoError(path + ":" + std::to_string(line_no) + ": malformed row '" + line +
                          "'");
        }
    }
    curve.horizon = static_cast<int>(curve.mean_cum.size());
    curve.single_instance = (curve.n_instances == 1);
    curve.ci_valid = (curve.n_instances >= 30);
    if (curve.horizon == 0) throw IoError(path + ": no data rows");
    return curve;
}

double residual_phi(std::span<const double> mu, const BanditState& state, int arm,
                    const TableList& tables, std::span<const double> rewards) {
    if (arm < 0 || arm >= state.n_arms()) {
        throw std::invalid_argument("residual_phi: arm index out of range");
    }
    const double q = q_value(state, arm, tables, rewards);
    const double v = separable_value(tables, state.arms);
    return q - (mu[static_cast<std::size_t>(arm)] * rewards[static_cast<std::size_t>(arm)] + v);
}

ResidualReport verify_decomposition(const ExperimentConfig& config,
                                    std::shared_ptr<const GittinsTable> gittins_table) {
    config.validate();
    if (config.policy.kind != PolicyKind::elsv || config.policy.depth != 1) {
        throw ConfigError(
            "the regret decomposition check applies to one-step table policies only "
            "(policy=elsv, depth=1)");
    }
    const std::vector<double> rewards = effective_rewards(config.prior);
    TableCache cache(bonus_spec_from(config, std::move(gittins_table)),
                     prior_extra_depth(config.prior));
    const int n = config.n_instances;
    const int horizon = config.horizon;
    const int n_arms = config.prior.n_arms;

    ResidualReport report;
    report.n_instances = n;
    report.mean_phi_policy.assign(static_cast<std::size_t>(horizon), 0.0);
    report.mean_phi_best.assign(static_cast<std::size_t>(horizon), 0.0);

    std::vector<double> diffs(static_cast<std::size_t>(n));
    double sum_regret = 0.0;
    double sum_bound = 0.0;
    for (int k = 0; k < n; ++k) {
        RandomStream rng = RandomStream::for_instance(config.master_seed, k);
        const ProblemInstance instance = sample_instance(config.prior, rng, horizon);
        int best_arm = 0;
        for (int i = 1; i < n_arms; ++i) {
            if (instance.mu[i] * rewards[i] > instance.mu[best_arm] * rewards[best_arm]) {
                best_arm = i;
            }
        }
        const double best = instance.mu[best_arm] * rewards[best_arm];

        BanditState state = initial_state(config.prior);
        double regret = 0.0;
        double phi_policy = 0.0;
        double phi_best = 0.0;
        for (int t = 1; t <= horizon; ++t) {
            const TableList tables = cache.decision_tables(t, n_arms);
            const int arm = lookahead_choose(state, 1, tables, rewards);
            regret += best - instance.mu[arm] * rewards[arm];
            const double pp = residual_phi(instance.mu, state, arm, tables, rewards);
            const double pb = residual_phi(instance.mu, state, best_arm, tables, rewards);
            phi_policy += pp;
            phi_best += pb;
            report.mean_phi_policy[static_cast<std::size_t>(t - 1)] += pp;
            report.mean_phi_best[static_cast<std::size_t>(t - 1)] += pb;
            state = transition(state, arm, pull(instance, arm, rng));
        }
        const double bound = phi_policy - phi_best;
        diffs[static_cast<std::size_t>(k)] = regret - bound;
        sum_regret += regret;
        sum_bound += bound;
    }

    report.mean_regret = sum_regret / n;
    report.mean_bound = sum_bound / n;
    double mean_diff = 0.0;
    for (double d : diffs) mean_diff += d;
    mean_diff /= n;
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean_diff) * (d - mean_diff);
    const double se = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(double(n)) : 0.0;
    report.diff_mean = mean_diff;
    report.diff_se = se;
    report.holds = mean_diff <= 3.0 * se;
    for (double& v : report.mean_phi_policy) v /= n;
    for (double& v : report.mean_phi_best) v /= n;
    return report;
}

}
