#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfq/errors.hpp"
#include "nfq/harness.hpp"

using nfq::harness::RunConfig;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string profile;
    std::string env;
    std::string out_dir;
    std::string seed;
    std::vector<std::string> overrides;
};

void add_global_flags(CLI::App* cmd, GlobalArgs& g) {
    cmd->add_option("--config", g.config_path, "Config file (key = value lines)");
    cmd->add_option("--profile", g.profile, "Preset profile: sim | hardware");
    cmd->add_option("--env", g.env, "Environment: physics | replay");
    cmd->add_option("--out", g.out_dir, "Output directory");
    cmd->add_option("--seed", g.seed, "Master seed");
    cmd->add_option("--set", g.overrides, "Override a config key (key=value)");
}

RunConfig build_config(const GlobalArgs& g) {
    RunConfig cfg;
    if (!g.profile.empty()) cfg.apply_profile(g.profile);
    if (!g.config_path.empty()) {
        const std::string profile = g.profile;
        cfg = nfq::harness::load_config(g.config_path);
        if (!profile.empty() && cfg.profile != profile)
            cfg.apply_profile(profile);
    }
    if (!g.env.empty()) cfg.set_key("env", g.env);
    if (!g.out_dir.empty()) cfg.set_key("out", g.out_dir);
    if (!g.seed.empty()) cfg.set_key("seed", g.seed);
    nfq::harness::apply_overrides(cfg, g.overrides);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch NFQ toolkit for minimum-time motor position control"};
    app.require_subcommand(1);

    GlobalArgs collect_args, train_args, eval_args, compare_args, plots_args;

    auto* collect = app.add_subcommand(
        "collect", "Log random-action physics transitions");
    long collect_steps = 10000;
    collect->add_option("--steps", collect_steps, "Number of transitions");
    add_global_flags(collect, collect_args);

    auto* train = app.add_subcommand(
        "train", "Run the growing-batch NFQ training loop");
    add_global_flags(train, train_args);

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint greedily");
    std::string eval_checkpoint;
    int eval_episodes = 100;
    eval->add_option("--checkpoint", eval_checkpoint, "Checkpoint file");
    eval->add_option("--episodes", eval_episodes, "Number of episodes");
    add_global_flags(eval, eval_args);

    auto* compare = app.add_subcommand(
        "compare", "Paired physics-vs-replay rollouts from shared starts");
    int compare_episodes = 100;
    std::string compare_policy;
    std::string compare_checkpoint;
    compare->add_option("--episodes", compare_episodes, "Number of episodes");
    compare->add_option("--policy", compare_policy,
                        "Rollout policy: random | checkpoint");
    compare->add_option("--checkpoint", compare_checkpoint, "Checkpoint file");
    add_global_flags(compare, compare_args);

    auto* plots = app.add_subcommand(
        "export-plots", "Emit plot-ready cost and success series");
    std::string plots_metrics;
    plots->add_option("--metrics", plots_metrics, "Metrics file")->required();
    add_global_flags(plots, plots_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (collect->parsed()) {
            RunConfig cfg = build_config(collect_args);
            const auto res = nfq::harness::cmd_collect(cfg, collect_steps);
            std::printf("collected %ld transitions -> %s\n", res.rows,
                        res.log_path.c_str());
        } else if (train->parsed()) {
            RunConfig cfg = build_config(train_args);
            const auto s = nfq::harness::cmd_train(cfg);
            std::printf("episodes %d successes %d last_quarter_mean_cost %g\n",
                        s.episodes, s.successes, s.last_quarter_mean_cost);
            std::printf("metrics -> %s\ncheckpoint -> %s\n",
                        s.metrics_path.c_str(), s.checkpoint_path.c_str());
        } else if (eval->parsed()) {
            RunConfig cfg = build_config(eval_args);
            if (!eval_checkpoint.empty()) cfg.checkpoint = eval_checkpoint;
            const auto r = nfq::harness::cmd_eval(cfg, eval_episodes);
            std::printf(
                "episodes %d success_rate %g mean_cost %g mean_steps_to_goal %g\n",
                r.episodes, r.success_rate, r.mean_cost, r.mean_steps_to_goal);
        } else if (compare->parsed()) {
            RunConfig cfg = build_config(compare_args);
            if (!compare_policy.empty()) cfg.compare_policy = compare_policy;
            if (!compare_checkpoint.empty()) cfg.checkpoint = compare_checkpoint;
            const auto r = nfq::harness::cmd_compare(cfg, compare_episodes);
            std::printf("episodes %d\n", r.episodes);
            std::printf("physics success/failure/timeout %d/%d/%d\n",
                        r.physics.success, r.physics.failure, r.physics.timeout);
            std::printf("replay  success/failure/timeout %d/%d/%d\n",
                        r.replay.success, r.replay.failure, r.replay.timeout);
        } else if (plots->parsed()) {
            RunConfig cfg = build_config(plots_args);
            nfq::harness::cmd_export_plots(plots_metrics, cfg.out_dir);
            std::printf("plot data -> %s\n", cfg.out_dir.c_str());
        }
    } catch (const nfq::Error& err) {
        std::fprintf(stderr, "error:%s: %s\n", err.category().c_str(),
                     err.what());
        return 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error:internal: %s\n", err.what());
        return 2;
    }
    return 0;
}
