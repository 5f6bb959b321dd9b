#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "banditlab/bandit.hpp"
#include "banditlab/gittins.hpp"

namespace banditlab {

enum class PolicyKind {
    ucb,
    bayes_ucb,
    thompson,
    thompson_constrained,
    gittins,
    elsv,
    elsv_constrained,
};

enum class BonusKind { zero, ucb, gittins };

std::string to_string(PolicyKind kind);
std::string to_string(BonusKind kind);
PolicyKind policy_kind_from_string(const std::string& s);  // ConfigError on unknown
BonusKind bonus_kind_from_string(const std::string& s);

struct PolicySpec {
    PolicyKind kind = PolicyKind::ucb;
    double ucb_alpha = 1.0;           // ucb and the ucb bonus
    double bayes_ucb_c = 0.0;         // quantile-level exponent
    BonusKind bonus = BonusKind::ucb; // elsv / elsv_constrained
    int depth = 1;                    // elsv lookahead depth
    int sample_count = 10000;         // elsv_constrained / thompson_constrained
    int min_accepted = 100;

    std::string name() const;  // human-readable id used in curve metadata
};

/// Where the dynamic-allocation index table comes from when a policy needs
/// one: loaded from table_path when set, otherwise computed with these
/// parameters (max_pulls sized automatically from the experiment).
struct GittinsOptions {
    double gamma = 0.99;
    int horizon = 1000;
    double lambda_step = 1e-3;
    std::optional<int> max_pulls;  // unset: derived from horizon and depth
    std::string table_path;
};

struct ExperimentConfig {
    PriorSpec prior;
    PolicySpec policy;
    int horizon = 200;          // decision steps T per episode
    int n_instances = 1000;     // Monte Carlo problem draws
    std::uint64_t master_seed = 0;
    std::string output_path;    // regret CSV destination ("" = don't write)
    GittinsOptions gittins;
    int threads = 0;            // 0 = runtime default

    /// Throws ConfigError on inconsistent settings (sizes, ranges,
    /// constrained policy on an unconstrained prior, ...).
    void validate() const;
};

/// Flat "key=value" text (one pair per line, '#' comments, vectors
/// comma-separated). Unknown keys throw ConfigError naming the key.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin = "<string>");

ExperimentConfig experiment_from_key_values(const std::map<std::string, std::string>& kv,
                                            const std::string& origin = "<config>");

/// Reads and parses a config file (IoError if unreadable).
ExperimentConfig load_experiment_config(const std::string& path);

/// Serializations round-trip through parse_key_values.
std::string to_config_text(const PriorSpec& prior);
PriorSpec prior_from_key_values(const std::map<std::string, std::string>& kv);

std::string to_config_text(const ProblemInstance& instance);
ProblemInstance instance_from_config_text(const std::string& text);

}
