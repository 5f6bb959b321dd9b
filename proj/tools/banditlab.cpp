// banditlab: Beta-Bernoulli bandit laboratory.
//
// Subcommands:
//   gittins   tabulate dynamic-allocation indices and save them
//   elsv      build a separable value table; save and/or export contours
//   simulate  Monte Carlo Bayesian-regret benchmark of one policy
//   diagnose  check the regret decomposition bound for a table policy
//
// Exit codes: 0 success, 1 configuration/usage error, 2 diagnostic
// failure, 3 file error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "banditlab/elsv.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/gittins.hpp"
#include "banditlab/harness.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct GittinsCli {
    double gamma = 0.99;
    int horizon = 1000;
    double step = 1e-3;
    int max_pulls = 200;
    bool serial = false;
    std::string out;
};

int run_gittins(const GittinsCli& cli) {
    banditlab::GittinsParams params;
    params.gamma = cli.gamma;
    params.horizon = cli.horizon;
    params.lambda_step = cli.step;
    params.max_pulls = cli.max_pulls;
    const auto start = Clock::now();
    const banditlab::GittinsTable table = cli.serial
                                              ? banditlab::compute_gittins_table_serial(params)
                                              : banditlab::compute_gittins_table(params);
    std::printf("computed %zu arm states in %.2fs (gamma=%g, horizon=%d, step=%g)\n",
                table.state_count(), seconds_since(start), params.gamma, params.horizon,
                params.lambda_step);
    banditlab::save_table(table, cli.out);
    std::printf("wrote %s\n", cli.out.c_str());
    return 0;
}

struct ElsvCli {
    int t = 0;
    std::string bonus = "ucb";
    double ucb_alpha = 1.0;
    int bonus_time = -1;  // defaults to t
    std::string gittins_table_path;
    GittinsCli gittins;  // used when no table file is given
    std::string out;
    std::string contour;
    double plot_reward = 1.0;
    bool normalize = false;
};

banditlab::BonusSpec elsv_bonus(const ElsvCli& cli) {
    if (cli.bonus == "zero") return banditlab::zero_bonus();
    if (cli.bonus == "ucb") return banditlab::ucb_bonus(cli.ucb_alpha);
    if (cli.bonus != "gittins") {
        throw banditlab::ConfigError("unknown bonus '" + cli.bonus +
                                     "' (expected zero, ucb, or gittins)");
    }
    const int needed = std::max(cli.t - 2, 0);
    std::shared_ptr<const banditlab::GittinsTable> table;
    if (!cli.gittins_table_path.empty()) {
        table = std::make_shared<const banditlab::GittinsTable>(
            banditlab::load_table(cli.gittins_table_path));
        if (table->params.max_pulls < needed) {
            throw banditlab::ConfigError(
                "index table '" + cli.gittins_table_path + "' covers max_pulls=" +
                std::to_string(table->params.max_pulls) + " but the value table needs " +
                std::to_string(needed));
        }
    } else {
        banditlab::GittinsParams params;
        params.gamma = cli.gittins.gamma;
        params.lambda_step = cli.gittins.step;
        params.max_pulls = std::max(cli.gittins.max_pulls, needed);
        params.horizon = std::max(cli.gittins.horizon, params.max_pulls + 800);
        table = std::make_shared<const banditlab::GittinsTable>(
            banditlab::compute_gittins_table(params));
    }
    return banditlab::gittins_bonus(std::move(table));
}

int run_elsv(const ElsvCli& cli) {
    if (cli.out.empty() && cli.contour.empty()) {
        throw banditlab::ConfigError("nothing to do: pass --out and/or --contour");
    }
    const banditlab::BonusSpec bonus = elsv_bonus(cli);
    const int bonus_time = cli.bonus_time > 0 ? cli.bonus_time : cli.t;
    banditlab::ValueTable table = banditlab::compute_value_table(cli.t, bonus.fn, bonus_time);
    table.bonus_name = bonus.name;
    std::printf("built value table: t=%d, bonus=%s, bonus_time=%d, %zu states, %llu updates\n",
                table.t, table.bonus_name.c_str(), table.bonus_time, table.values.size(),
                static_cast<unsigned long long>(table.updates));
    if (!cli.out.empty()) {
        banditlab::save_value_table(table, cli.out);
        std::printf("wrote %s\n", cli.out.c_str());
    }
    if (!cli.contour.empty()) {
        if (cli.normalize) {
            const banditlab::ValueTable shifted =
                banditlab::normalize_for_plot(table, cli.plot_reward);
            banditlab::export_contour_csv(shifted, cli.contour);
        } else {
            banditlab::export_contour_csv(table, cli.contour);
        }
        std::printf("wrote %s\n", cli.contour.c_str());
    }
    return 0;
}

struct RunCli {
    std::string config_path;
    std::string policy;
    int horizon = -1;
    long long instances = -1;
    long long seed = -1;
    std::string out;
    int threads = -1;
    bool serial = false;
};

banditlab::ExperimentConfig load_with_overrides(const RunCli& cli) {
    std::ifstream in(cli.config_path);
    if (!in) throw banditlab::IoError("cannot open config '" + cli.config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto kv = banditlab::parse_key_values(buffer.str(), cli.config_path);
    if (!cli.policy.empty()) kv["policy"] = cli.policy;
    if (cli.horizon >= 0) kv["horizon"] = std::to_string(cli.horizon);
    if (cli.instances >= 0) kv["instances"] = std::to_string(cli.instances);
    if (cli.seed >= 0) kv["seed"] = std::to_string(cli.seed);
    if (!cli.out.empty()) kv["out"] = cli.out;
    if (cli.threads >= 0) kv["threads"] = std::to_string(cli.threads);
    return banditlab::experiment_from_key_values(kv, cli.config_path);
}

int run_simulate(const RunCli& cli) {
    const banditlab::ExperimentConfig config = load_with_overrides(cli);
    const auto start = Clock::now();
    const banditlab::RegretCurve curve =
        cli.serial ? banditlab::bayes_regret_serial(config) : banditlab::bayes_regret(config);
    std::printf("policy=%s instances=%d horizon=%d seed=%llu elapsed=%.2fs\n",
                curve.policy_name.c_str(), curve.n_instances, curve.horizon,
                static_cast<unsigned long long>(curve.master_seed), seconds_since(start));
    if (curve.ci_valid) {
        std::printf("final mean cumulative regret: %.6f +/- %.6f (95%% CI)\n",
                    curve.final_mean(), curve.final_ci_half());
    } else {
        std::printf("final mean cumulative regret: %.6f (no CI: instances < 30)\n",
                    curve.final_mean());
    }
    if (!config.output_path.empty()) {
        banditlab::export_regret_csv(curve, config.output_path);
        std::printf("wrote %s\n", config.output_path.c_str());
    }
    return 0;
}

int run_diagnose(const RunCli& cli) {
    const banditlab::ExperimentConfig config = load_with_overrides(cli);
    const auto start = Clock::now();
    const banditlab::ResidualReport report = banditlab::verify_decomposition(config);
    std::printf("policy=%s instances=%d horizon=%d elapsed=%.2fs\n",
                config.policy.name().c_str(), report.n_instances, config.horizon,
                seconds_since(start));
    std::printf("mean cumulative regret:  %.6f\n", report.mean_regret);
    std::printf("mean residual bound:     %.6f\n", report.mean_bound);
    std::printf("paired difference:       %.6g (se %.6g)\n", report.diff_mean, report.diff_se);
    if (!report.holds) {
        throw banditlab::DiagnosticError(
            "regret decomposition violated: regret exceeds the residual bound by " +
            std::to_string(report.diff_mean) + " (3*se = " +
            std::to_string(3.0 * report.diff_se) + ")");
    }
    std::printf("decomposition bound holds (diff <= 3*se)\n");
    return 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Beta-Bernoulli bandit laboratory"};
    app.require_subcommand(1);

    GittinsCli gittins_cli;
    CLI::App* gittins = app.add_subcommand(
        "gittins", "Tabulate dynamic-allocation indices over arm states");
    gittins->add_option("--gamma", gittins_cli.gamma, "discount factor in (0,1)")
        ->capture_default_str();
    gittins->add_option("--horizon", gittins_cli.horizon, "recursion truncation depth")
        ->capture_default_str();
    gittins->add_option("--step", gittins_cli.step, "retirement-rate grid step")
        ->capture_default_str();
    gittins->add_option("--max-pulls", gittins_cli.max_pulls, "deepest tabulated arm state")
        ->capture_default_str();
    gittins->add_flag("--serial", gittins_cli.serial, "use the serial reference kernel");
    gittins->add_option("--out", gittins_cli.out, "output table file")->required();

    ElsvCli elsv_cli;
    CLI::App* elsv = app.add_subcommand(
        "elsv", "Build a per-arm separable value table from an exploration bonus");
    elsv->add_option("--t", elsv_cli.t, "time index; the table covers alpha+beta-2 <= t-1")
        ->required();
    elsv->add_option("--bonus", elsv_cli.bonus, "bonus: zero, ucb, or gittins")
        ->capture_default_str();
    elsv->add_option("--ucb-alpha", elsv_cli.ucb_alpha, "ucb exploration weight")
        ->capture_default_str();
    elsv->add_option("--bonus-time", elsv_cli.bonus_time,
                     "evaluate the bonus at this time instead of t");
    elsv->add_option("--gittins-table", elsv_cli.gittins_table_path,
                     "load the index table from this file");
    elsv->add_option("--gamma", elsv_cli.gittins.gamma, "discount when computing the index table")
        ->capture_default_str();
    elsv->add_option("--step", elsv_cli.gittins.step, "grid step when computing the index table")
        ->capture_default_str();
    elsv->add_option("--out", elsv_cli.out, "save the table to this file");
    elsv->add_option("--contour", elsv_cli.contour, "write mean,pulls,value rows for plotting");
    elsv->add_flag("--normalize", elsv_cli.normalize,
                   "shift contour values so they dominate the one-step returns");
    elsv->add_option("--plot-reward", elsv_cli.plot_reward,
                     "success reward used by --normalize")
        ->capture_default_str();

    RunCli simulate_cli;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo Bayesian-regret benchmark of one policy");
    simulate->add_option("--config", simulate_cli.config_path, "experiment config file")
        ->required();
    simulate->add_option("--policy", simulate_cli.policy, "override the configured policy");
    simulate->add_option("--horizon", simulate_cli.horizon, "override the horizon");
    simulate->add_option("--instances", simulate_cli.instances, "override the instance count");
    simulate->add_option("--seed", simulate_cli.seed, "override the master seed");
    simulate->add_option("--out", simulate_cli.out, "override the output csv path");
    simulate->add_option("--threads", simulate_cli.threads, "override the thread count");
    simulate->add_flag("--serial", simulate_cli.serial, "use the serial reference loop");

    RunCli diagnose_cli;
    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "Check the regret decomposition bound for a one-step table policy");
    diagnose->add_option("--config", diagnose_cli.config_path, "experiment config file")
        ->required();
    diagnose->add_option("--instances", diagnose_cli.instances, "override the instance count");
    diagnose->add_option("--horizon", diagnose_cli.horizon, "override the horizon");
    diagnose->add_option("--seed", diagnose_cli.seed, "override the master seed");

    try {
        app.parse(argc, argv);
        if (gittins->parsed()) return run_gittins(gittins_cli);
        if (elsv->parsed()) return run_elsv(elsv_cli);
        if (simulate->parsed()) return run_simulate(simulate_cli);
        if (diagnose->parsed()) return run_diagnose(diagnose_cli);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const banditlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const banditlab::DiagnosticError& e) {
        std::cerr << "diagnostic failure: " << e.what() << "\n";
        return 2;
    } catch (const banditlab::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
