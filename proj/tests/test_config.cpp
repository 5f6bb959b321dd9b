#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "banditlab/config.hpp"
#include "banditlab/errors.hpp"
#include "doctest.h"

using namespace banditlab;

namespace {

std::string error_text(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path(std::filesystem::temp_directory_path() / name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

}

TEST_CASE("flat key=value parsing skips comments and trims whitespace") {
    const auto kv = parse_key_values(
        "# leading comment\n"
        "\n"
        "  horizon = 200  \n"
        "out=results/curve.csv\n"
        "note=a=b\n",
        "demo.cfg");
    CHECK(kv.size() == 3);
    CHECK(kv.at("horizon") == "200");
    CHECK(kv.at("out") == "results/curve.csv");
    CHECK(kv.at("note") == "a=b");  // only the first '=' splits
}

TEST_CASE("malformed lines report the origin and line number") {
    SUBCASE("missing separator") {
        const std::string msg =
            error_text([] { parse_key_values("a=1\nbroken line\n", "demo.cfg"); });
        CHECK(msg.find("demo.cfg:2") != std::string::npos);
        CHECK(msg.find("key=value") != std::string::npos);
    }
    SUBCASE("duplicate key") {
        const std::string msg =
            error_text([] { parse_key_values("a=1\n\na=2\n", "demo.cfg"); });
        CHECK(msg.find("demo.cfg:3") != std::string::npos);
        CHECK(msg.find("duplicate key 'a'") != std::string::npos);
    }
    SUBCASE("empty key") {
        CHECK_THROWS_AS(parse_key_values("=5\n"), ConfigError);
    }
}

TEST_CASE("a full experiment config parses into every field") {
    std::map<std::string, std::string> kv{
        {"n_arms", "3"},
        {"constrained", "true"},
        {"rewards", "0.8,0.9,1.0"},
        {"prior_alpha", "1"},
        {"prior_beta", "1"},
        {"policy", "elsv_constrained"},
        {"ucb_alpha", "0.5"},
        {"bayes_ucb_c", "1"},
        {"bonus", "gittins"},
        {"depth", "2"},
        {"sample_count", "500"},
        {"min_accepted", "50"},
        {"horizon", "100"},
        {"instances", "250"},
        {"seed", "12345"},
        {"out", "curve.csv"},
        {"gittins_gamma", "0.95"},
        {"gittins_horizon", "900"},
        {"gittins_step", "0.002"},
        {"gittins_max_pulls", "150"},
        {"gittins_table", "table.txt"},
        {"threads", "2"},
    };
    const ExperimentConfig cfg = experiment_from_key_values(kv);
    CHECK(cfg.prior.n_arms == 3);
    CHECK(cfg.prior.constrained);
    CHECK(cfg.prior.rewards == std::vector<double>{0.8, 0.9, 1.0});
    CHECK(cfg.prior.prior_alpha == std::vector<int>{1, 1, 1});  // broadcast from one entry
    CHECK(cfg.prior.prior_beta == std::vector<int>{1, 1, 1});
    CHECK(cfg.policy.kind == PolicyKind::elsv_constrained);
    CHECK(cfg.policy.ucb_alpha == 0.5);
    CHECK(cfg.policy.bayes_ucb_c == 1.0);
    CHECK(cfg.policy.bonus == BonusKind::gittins);
    CHECK(cfg.policy.depth == 2);
    CHECK(cfg.policy.sample_count == 500);
    CHECK(cfg.policy.min_accepted == 50);
    CHECK(cfg.horizon == 100);
    CHECK(cfg.n_instances == 250);
    CHECK(cfg.master_seed == 12345);
    CHECK(cfg.output_path == "curve.csv");
    CHECK(cfg.gittins.gamma == 0.95);
    CHECK(cfg.gittins.horizon == 900);
    CHECK(cfg.gittins.lambda_step == 0.002);
    CHECK(cfg.gittins.max_pulls == 150);
    CHECK(cfg.gittins.table_path == "table.txt");
    CHECK(cfg.threads == 2);
}

TEST_CASE("an empty config falls back to the documented defaults") {
    const ExperimentConfig cfg = experiment_from_key_values({});
    CHECK(cfg.prior.n_arms == 2);
    CHECK_FALSE(cfg.prior.constrained);
    CHECK(cfg.prior.rewards == std::vector<double>{1.0, 1.0});
    CHECK(cfg.prior.prior_alpha == std::vector<int>{1, 1});
    CHECK(cfg.policy.kind == PolicyKind::ucb);
    CHECK(cfg.horizon == 200);
    CHECK(cfg.n_instances == 1000);
    CHECK(cfg.master_seed == 0);
    CHECK(cfg.output_path.empty());
    CHECK(cfg.gittins.gamma == 0.99);
    CHECK(cfg.gittins.horizon == 1000);
    CHECK(cfg.gittins.lambda_step == 1e-3);
    CHECK_FALSE(cfg.gittins.max_pulls.has_value());
    CHECK(cfg.threads == 0);
}

TEST_CASE("unknown keys are rejected by name") {
    const std::string msg = error_text(
        [] { experiment_from_key_values({{"policy", "ucb"}, {"frobnicate", "1"}}, "my.cfg"); });
    CHECK(msg.find("my.cfg") != std::string::npos);
    CHECK(msg.find("unknown key 'frobnicate'") != std::string::npos);
}

TEST_CASE("single values broadcast across arms, mismatched lists do not") {
    const ExperimentConfig cfg =
        experiment_from_key_values({{"n_arms", "3"}, {"rewards", "0.5"}, {"prior_beta", "4"}});
    CHECK(cfg.prior.rewards == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(cfg.prior.prior_beta == std::vector<int>{4, 4, 4});

    const std::string msg = error_text(
        [] { experiment_from_key_values({{"n_arms", "3"}, {"prior_alpha", "2,3"}}); });
    CHECK(msg.find("prior_alpha") != std::string::npos);
    CHECK(msg.find("1 or n_arms") != std::string::npos);
}

TEST_CASE("validation rejects inconsistent experiments") {
    SUBCASE("constrained policies demand a constrained prior") {
        for (const char* policy : {"thompson_constrained", "elsv_constrained"}) {
            const std::string msg =
                error_text([&] { experiment_from_key_values({{"policy", policy}}); });
            CHECK(msg.find("unconstrained") != std::string::npos);
        }
    }
    SUBCASE("a constrained prior needs strictly increasing rewards") {
        CHECK_THROWS_AS(experiment_from_key_values({{"constrained", "true"}}), ConfigError);
    }
    SUBCASE("ranges") {
        CHECK_THROWS_AS(experiment_from_key_values({{"depth", "0"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"horizon", "0"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"instances", "0"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"threads", "-1"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"ucb_alpha", "-0.5"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"sample_count", "0"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"gittins_gamma", "1"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"gittins_step", "0"}}), ConfigError);
        CHECK_THROWS_AS(experiment_from_key_values({{"gittins_horizon", "0"}}), ConfigError);
    }
    SUBCASE("unparsable numbers name the key") {
        const std::string msg =
            error_text([] { experiment_from_key_values({{"horizon", "soon"}}); });
        CHECK(msg.find("horizon") != std::string::npos);
        CHECK(msg.find("soon") != std::string::npos);
    }
}

TEST_CASE("policy and bonus identifiers round-trip") {
    for (PolicyKind k : {PolicyKind::ucb, PolicyKind::bayes_ucb, PolicyKind::thompson,
                         PolicyKind::thompson_constrained, PolicyKind::gittins, PolicyKind::elsv,
                         PolicyKind::elsv_constrained}) {
        CHECK(policy_kind_from_string(to_string(k)) == k);
    }
    for (BonusKind k : {BonusKind::zero, BonusKind::ucb, BonusKind::gittins}) {
        CHECK(bonus_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(policy_kind_from_string("ucb1"), ConfigError);
    CHECK_THROWS_AS(bonus_kind_from_string("none"), ConfigError);
}

TEST_CASE("policy display names are compact and parameterized") {
    PolicySpec spec;
    spec.kind = PolicyKind::ucb;
    spec.ucb_alpha = 1.0;
    CHECK(spec.name() == "ucb(1)");
    spec.ucb_alpha = 0.4;
    CHECK(spec.name() == "ucb(0.4)");

    spec.kind = PolicyKind::bayes_ucb;
    spec.bayes_ucb_c = 0.0;
    CHECK(spec.name() == "bayes_ucb(c=0)");

    spec.kind = PolicyKind::thompson;
    CHECK(spec.name() == "thompson");

    spec.kind = PolicyKind::elsv;
    spec.bonus = BonusKind::zero;
    spec.depth = 3;
    CHECK(spec.name() == "elsv(zero, depth=3)");
    spec.bonus = BonusKind::ucb;
    spec.ucb_alpha = 1.0;
    spec.depth = 1;
    CHECK(spec.name() == "elsv(ucb[1], depth=1)");

    spec.kind = PolicyKind::elsv_constrained;
    spec.bonus = BonusKind::gittins;
    spec.sample_count = 2000;
    CHECK(spec.name() == "elsv_constrained(gittins, samples=2000)");
}

TEST_CASE("prior serialization round-trips bitwise") {
    PriorSpec prior;
    prior.n_arms = 3;
    prior.constrained = true;
    prior.rewards = {0.8, 0.9, 1.0};
    prior.prior_alpha = {2, 2, 2};
    prior.prior_beta = {3, 3, 3};

    const PriorSpec back = prior_from_key_values(parse_key_values(to_config_text(prior)));
    CHECK(back.n_arms == prior.n_arms);
    CHECK(back.constrained == prior.constrained);
    CHECK(back.rewards == prior.rewards);
    CHECK(back.prior_alpha == prior.prior_alpha);
    CHECK(back.prior_beta == prior.prior_beta);
}

TEST_CASE("instance serialization round-trips bitwise") {
    ProblemInstance instance;
    instance.mu = {0.25, 1.0 / 3.0};
    instance.rewards = {0.5, 1.0};
    instance.horizon = 77;
    instance.constrained = true;
    instance.prior_alpha = {2, 2};
    instance.prior_beta = {3, 3};

    const ProblemInstance back = instance_from_config_text(to_config_text(instance));
    CHECK(back.mu == instance.mu);
    CHECK(back.rewards == instance.rewards);
    CHECK(back.horizon == instance.horizon);
    CHECK(back.constrained == instance.constrained);
    CHECK(back.prior_alpha == instance.prior_alpha);
    CHECK(back.prior_beta == instance.prior_beta);
}

TEST_CASE("instance text requires mu inside the unit interval") {
    CHECK_THROWS_AS(instance_from_config_text("horizon=10\n"), ConfigError);
    CHECK_THROWS_AS(instance_from_config_text("mu=0.5,1.5\n"), ConfigError);
    const ProblemInstance minimal = instance_from_config_text("mu=0.5,0.25\n");
    CHECK(minimal.rewards == std::vector<double>{1.0, 1.0});  // defaults fill in
    CHECK(minimal.prior_alpha == std::vector<int>{1, 1});
}

TEST_CASE("config files load with path-tagged errors") {
    SUBCASE("a valid file parses") {
        const TempFile file("banditlab_cfg_ok.cfg",
                            "policy=thompson\nhorizon=50\ninstances=10\nseed=9\n");
        const ExperimentConfig cfg = load_experiment_config(file.path.string());
        CHECK(cfg.policy.kind == PolicyKind::thompson);
        CHECK(cfg.horizon == 50);
        CHECK(cfg.n_instances == 10);
        CHECK(cfg.master_seed == 9);
    }
    SUBCASE("a missing file raises an I/O error") {
        CHECK_THROWS_AS(load_experiment_config("/no/such/dir/x.cfg"), IoError);
    }
    SUBCASE("parse errors carry the file path") {
        const TempFile file("banditlab_cfg_bad.cfg", "policy=ucb\nmystery=1\n");
        const std::string msg =
            error_text([&] { load_experiment_config(file.path.string()); });
        CHECK(msg.find("banditlab_cfg_bad.cfg") != std::string::npos);
        CHECK(msg.find("mystery") != std::string::npos);
    }
}
