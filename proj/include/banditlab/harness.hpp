#pragma once

#include <memory>
#include <string>
#include <vector>

#include "banditlab/config.hpp"
#include "banditlab/planner.hpp"

namespace banditlab {

/// A bandit policy driven step by step. choose() may consume randomness
/// from the episode's stream; implementations share only immutable or
/// internally synchronized state so one object can serve parallel episodes.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual int choose(const BanditState& state, RandomStream& rng) = 0;
    virtual std::string name() const = 0;
    virtual bool requires_constrained_prior() const { return false; }
};

/// Builds the configured policy. Policies that need the dynamic-allocation
/// index table either receive `gittins_table` or load/compute one per the
/// config's GittinsOptions (sized to cover the experiment horizon).
std::unique_ptr<Policy> make_policy(const ExperimentConfig& config,
                                    std::shared_ptr<const GittinsTable> gittins_table = nullptr);

/// Plays one episode and returns the per-step expected regret trace
/// max_i mu_i r_i - mu_a r_a for the chosen arms (length
/// instance.horizon). Throws ConfigError if the policy requires an
/// ordering-constrained prior and the instance is unconstrained.
std::vector<double> run_episode(Policy& policy, const ProblemInstance& instance,
                                RandomStream& rng);

/// Mean cumulative regret per step with a normal 95% confidence band.
struct RegretCurve {
    std::string policy_name;
    std::uint64_t master_seed = 0;
    int horizon = 0;
    int n_instances = 0;
    bool single_instance = false;  // n_instances == 1
    bool ci_valid = false;         // n_instances >= 30
    std::vector<double> mean_cum;  // index t-1 holds the mean at step t
    std::vector<double> ci_half;   // zero when ci_valid is false

    double final_mean() const { return mean_cum.empty() ? 0.0 : mean_cum.back(); }
    double final_ci_half() const { return ci_half.empty() ? 0.0 : ci_half.back(); }
};

/// Monte Carlo Bayesian regret: instance k draws its problem and plays its
/// episode on the stream derived from (master_seed, k), so results do not
/// depend on scheduling; instances run under OpenMP and are reduced in
/// index order, making reruns bitwise identical for any thread count.
RegretCurve bayes_regret(const ExperimentConfig& config,
                         std::shared_ptr<const GittinsTable> gittins_table = nullptr);

/// Serial reference of the same computation (bitwise identical).
RegretCurve bayes_regret_serial(const ExperimentConfig& config,
                                std::shared_ptr<const GittinsTable> gittins_table = nullptr);

/// Writes "t,mean_cum_regret,ci_low,ci_high,n" rows at full precision.
void export_regret_csv(const RegretCurve& curve, const std::string& path);
RegretCurve load_regret_csv(const std::string& path);

/// One-step optimism residual of action `arm` at `state` given the true
/// means: q(state, arm) - (mu_arm * r_arm + v(state)), with q and v under
/// the same decision-time tables.
double residual_phi(std::span<const double> mu, const BanditState& state, int arm,
                    const TableList& tables, std::span<const double> rewards);

struct ResidualReport {
    int n_instances = 0;
    double mean_regret = 0.0;        // measured cumulative regret
    double mean_bound = 0.0;         // sum phi(chosen) - sum phi(best arm)
    double diff_mean = 0.0;          // regret - bound, per-instance pairing
    double diff_se = 0.0;
    bool holds = false;              // diff_mean <= 3 * diff_se
    std::vector<double> mean_phi_policy;  // per-step averages
    std::vector<double> mean_phi_best;
};

/// Monte Carlo check of the regret decomposition bound for a one-step
/// table policy: cumulative regret must not exceed the summed residual gap
/// by more than 3 standard errors of the paired difference. Refuses
/// configs whose policy is not a depth-1 table policy (ConfigError); a
/// violated bound in the data raises nothing here — `holds` reports it.
ResidualReport verify_decomposition(const ExperimentConfig& config,
                                    std::shared_ptr<const GittinsTable> gittins_table = nullptr);

}
