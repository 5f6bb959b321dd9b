#include "banditlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "banditlab/errors.hpp"

namespace banditlab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : split_commas(value)) out.push_back(parse_double(item, key));
    return out;
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    for (const std::string& item : split_commas(value)) {
        out.push_back(static_cast<int>(parse_int(item, key)));
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Display-only formatting (policy names); file serialization stays %.17g.
std::string format_double_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

// Expands single-entry vectors to n entries so "prior_alpha=1" covers all arms.
template <typename T>
std::vector<T> broadcast(std::vector<T> values, int n, const std::string& key) {
    if (values.size() == 1) values.assign(n, values[0]);
    if (values.size() != static_cast<std::size_t>(n)) {
        throw ConfigError("key '" + key + "' needs 1 or n_arms entries");
    }
    return values;
}

}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::ucb: return "ucb";
        case PolicyKind::bayes_ucb: return "bayes_ucb";
        case PolicyKind::thompson: return "thompson";
        case PolicyKind::thompson_constrained: return "thompson_constrained";
        case PolicyKind::gittins: return "gittins";
        case PolicyKind::elsv: return "elsv";
        case PolicyKind::elsv_constrained: return "elsv_constrained";
    }
    return "?";
}

std::string to_string(BonusKind kind) {
    switch (kind) {
        case BonusKind::zero: return "zero";
        case BonusKind::ucb: return "ucb";
        case BonusKind::gittins: return "gittins";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
    for (PolicyKind k : {PolicyKind::ucb, PolicyKind::bayes_ucb, PolicyKind::thompson,
                         PolicyKind::thompson_constrained, PolicyKind::gittins, PolicyKind::elsv,
                         PolicyKind::elsv_constrained}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown policy '" + s +
                      "' (expected ucb, bayes_ucb, thompson, thompson_constrained, gittins, "
                      "elsv, or elsv_constrained)");
}

BonusKind bonus_kind_from_string(const std::string& s) {
    for (BonusKind k : {BonusKind::zero, BonusKind::ucb, BonusKind::gittins}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown bonus '" + s + "' (expected zero, ucb, or gittins)");
}

std::string PolicySpec::name() const {
    switch (kind) {
        case PolicyKind::ucb: return "ucb(" + format_double_short(ucb_alpha) + ")";
        case PolicyKind::bayes_ucb:
            return "bayes_ucb(c=" + format_double_short(bayes_ucb_c) + ")";
        case PolicyKind::thompson: return "thompson";
        case PolicyKind::thompson_constrained: return "thompson_constrained";
        case PolicyKind::gittins: return "gittins";
        case PolicyKind::elsv:
            return "elsv(" + to_string(bonus) +
                   (bonus == BonusKind::ucb ? "[" + format_double_short(ucb_alpha) + "]" : "") +
                   ", depth=" + std::to_string(depth) + ")";
        case PolicyKind::elsv_constrained:
            return "elsv_constrained(" + to_string(bonus) +
                   (bonus == BonusKind::ucb ? "[" + format_double_short(ucb_alpha) + "]" : "") +
                   ", samples=" + std::to_string(sample_count) + ")";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    try {
        validate_prior(prior);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (n_instances < 1) throw ConfigError("instances must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (policy.depth < 1) throw ConfigError("depth must be >= 1");
    if (policy.sample_count < 1) throw ConfigError("sample_count must be >= 1");
    if (policy.min_accepted < 1) throw ConfigError("min_accepted must be >= 1");
    if (!(policy.ucb_alpha >= 0.0)) throw ConfigError("ucb_alpha must be >= 0");
    const bool needs_constrained = policy.kind == PolicyKind::thompson_constrained ||
                                   policy.kind == PolicyKind::elsv_constrained;
    if (needs_constrained && !prior.constrained) {
        throw ConfigError("policy '" + to_string(policy.kind) +
                          "' exploits the ordering constraint but the prior is unconstrained");
    }
    if (!(gittins.gamma > 0.0 && gittins.gamma < 1.0)) {
        throw ConfigError("gittins_gamma must lie in (0,1)");
    }
    if (!(gittins.lambda_step > 0.0 && gittins.lambda_step <= 1.0)) {
        throw ConfigError("gittins_step must lie in (0,1]");
    }
    if (gittins.horizon < 1) throw ConfigError("gittins_horizon must be >= 1");
}

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (kv.count(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        }
        kv[key] = trim(stripped.substr(eq + 1));
    }
    return kv;
}

ExperimentConfig experiment_from_key_values(const std::map<std::string, std::string>& kv,
                                            const std::string& origin) {
    static const std::set<std::string> known = {
        "n_arms",        "constrained",    "rewards",        "prior_alpha",
        "prior_beta",    "policy",         "ucb_alpha",      "bayes_ucb_c",
        "bonus",         "depth",          "sample_count",   "min_accepted",
        "horizon",       "instances",      "seed",           "out",
        "gittins_gamma", "gittins_horizon", "gittins_step",  "gittins_max_pulls",
        "gittins_table", "threads",
    };
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!known.count(key)) {
            throw ConfigError(origin + ": unknown key '" + key + "'");
        }
    }
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;
    if (const auto* v = get("n_arms")) cfg.prior.n_arms = static_cast<int>(parse_int(*v, "n_arms"));
    if (const auto* v = get("constrained")) cfg.prior.constrained = parse_bool(*v, "constrained");
    if (const auto* v = get("rewards")) cfg.prior.rewards = parse_double_list(*v, "rewards");
    if (cfg.prior.rewards.empty()) {
        cfg.prior.rewards.assign(cfg.prior.n_arms, 1.0);
    } else {
        cfg.prior.rewards = broadcast(cfg.prior.rewards, cfg.prior.n_arms, "rewards");
    }
    cfg.prior.prior_alpha.assign(cfg.prior.n_arms, 1);
    cfg.prior.prior_beta.assign(cfg.prior.n_arms, 1);
    if (const auto* v = get("prior_alpha")) {
        cfg.prior.prior_alpha = broadcast(parse_int_list(*v, "prior_alpha"), cfg.prior.n_arms,
                                          "prior_alpha");
    }
    if (const auto* v = get("prior_beta")) {
        cfg.prior.prior_beta = broadcast(parse_int_list(*v, "prior_beta"), cfg.prior.n_arms,
                                         "prior_beta");
    }

    if (const auto* v = get("policy")) cfg.policy.kind = policy_kind_from_string(*v);
    if (const auto* v = get("ucb_alpha")) cfg.policy.ucb_alpha = parse_double(*v, "ucb_alpha");
    if (const auto* v = get("bayes_ucb_c")) cfg.policy.bayes_ucb_c = parse_double(*v, "bayes_ucb_c");
    if (const auto* v = get("bonus")) cfg.policy.bonus = bonus_kind_from_string(*v);
    if (const auto* v = get("depth")) cfg.policy.depth = static_cast<int>(parse_int(*v, "depth"));
    if (const auto* v = get("sample_count")) {
        cfg.policy.sample_count = static_cast<int>(parse_int(*v, "sample_count"));
    }
    if (const auto* v = get("min_accepted")) {
        cfg.policy.min_accepted = static_cast<int>(parse_int(*v, "min_accepted"));
    }

    if (const auto* v = get("horizon")) cfg.horizon = static_cast<int>(parse_int(*v, "horizon"));
    if (const auto* v = get("instances")) {
        cfg.n_instances = static_cast<int>(parse_int(*v, "instances"));
    }
    if (const auto* v = get("seed")) {
        cfg.master_seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));
    }
    if (const auto* v = get("out")) cfg.output_path = *v;
    if (const auto* v = get("gittins_gamma")) {
        cfg.gittins.gamma = parse_double(*v, "gittins_gamma");
    }
    if (const auto* v = get("gittins_horizon")) {
        cfg.gittins.horizon = static_cast<int>(parse_int(*v, "gittins_horizon"));
    }
    if (const auto* v = get("gittins_step")) {
        cfg.gittins.lambda_step = parse_double(*v, "gittins_step");
    }
    if (const auto* v = get("gittins_max_pulls")) {
        cfg.gittins.max_pulls = static_cast<int>(parse_int(*v, "gittins_max_pulls"));
    }
    if (const auto* v = get("gittins_table")) cfg.gittins.table_path = *v;
    if (const auto* v = get("threads")) cfg.threads = static_cast<int>(parse_int(*v, "threads"));

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return experiment_from_key_values(parse_key_values(buffer.str(), path), path);
}

std::string to_config_text(const PriorSpec& prior) {
    std::ostringstream out;
    out << "n_arms=" << prior.n_arms << "\n";
    out << "constrained=" << (prior.constrained ? "true" : "false") << "\n";
    if (!prior.rewards.empty()) out << "rewards=" << join_doubles(prior.rewards) << "\n";
    if (!prior.prior_alpha.empty()) out << "prior_alpha=" << join_ints(prior.prior_alpha) << "\n";
    if (!prior.prior_beta.empty()) out << "prior_beta=" << join_ints(prior.prior_beta) << "\n";
    return out.str();
}

PriorSpec prior_from_key_values(const std::map<std::string, std::string>& kv) {
    PriorSpec prior;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("n_arms")) prior.n_arms = static_cast<int>(parse_int(*v, "n_arms"));
    if (const auto* v = get("constrained")) prior.constrained = parse_bool(*v, "constrained");
    if (const auto* v = get("rewards")) {
        prior.rewards = broadcast(parse_double_list(*v, "rewards"), prior.n_arms, "rewards");
    } else {
        prior.rewards.assign(prior.n_arms, 1.0);
    }
    prior.prior_alpha.assign(prior.n_arms, 1);
    prior.prior_beta.assign(prior.n_arms, 1);
    if (const auto* v = get("prior_alpha")) {
        prior.prior_alpha = broadcast(parse_int_list(*v, "prior_alpha"), prior.n_arms,
                                      "prior_alpha");
    }
    if (const auto* v = get("prior_beta")) {
        prior.prior_beta = broadcast(parse_int_list(*v, "prior_beta"), prior.n_arms,
                                     "prior_beta");
    }
    try {
        validate_prior(prior);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return prior;
}

std::string to_config_text(const ProblemInstance& instance) {
    std::ostringstream out;
    out << "mu=" << join_doubles(instance.mu) << "\n";
    out << "rewards=" << join_doubles(instance.rewards) << "\n";
    out << "horizon=" << instance.horizon << "\n";
    out << "constrained=" << (instance.constrained ? "true" : "false") << "\n";
    out << "prior_alpha=" << join_ints(instance.prior_alpha) << "\n";
    out << "prior_beta=" << join_ints(instance.prior_beta) << "\n";
    return out.str();
}

ProblemInstance instance_from_config_text(const std::string& text) {
    const auto kv = parse_key_values(text, "<instance>");
    ProblemInstance instance;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("mu")) {
        instance.mu = parse_double_list(*v, "mu");
    } else {
        throw ConfigError("instance text needs 'mu'");
    }
    const int n = instance.n_arms();
    instance.rewards.assign(n, 1.0);
    instance.prior_alpha.assign(n, 1);
    instance.prior_beta.assign(n, 1);
    if (const auto* v = get("rewards")) {
        instance.rewards = broadcast(parse_double_list(*v, "rewards"), n, "rewards");
    }
    if (const auto* v = get("horizon")) instance.horizon = static_cast<int>(parse_int(*v, "horizon"));
    if (const auto* v = get("constrained")) instance.constrained = parse_bool(*v, "constrained");
    if (const auto* v = get("prior_alpha")) {
        instance.prior_alpha = broadcast(parse_int_list(*v, "prior_alpha"), n, "prior_alpha");
    }
    if (const auto* v = get("prior_beta")) {
        instance.prior_beta = broadcast(parse_int_list(*v, "prior_beta"), n, "prior_beta");
    }
    for (double m : instance.mu) {
        if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("instance mu entries must lie in [0,1]");
    }
    return instance;
}

}
