#include "nfq/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "nfq/errors.hpp"
#include "nfq/rng.hpp"

namespace nfq::harness {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ConfigError("bad boolean for '" + key + "': " + v);
}

double parse_double(const std::string& v, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("bad number for '" + key + "': " + v);
    return x;
}

long parse_long(const std::string& v, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const long x = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError("bad integer for '" + key + "': " + v);
    return x;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir);
}

} // namespace

void RunConfig::apply_profile(const std::string& name) {
    if (name == "sim") {
        nfq.episodes = 300;
        nfq.reset_period = 100;
        nfq.epochs = 300;
    } else if (name == "hardware") {
        nfq.episodes = 150;
        nfq.reset_period = 50;
        nfq.epochs = 100;
    } else {
        throw ConfigError("unknown profile: " + name);
    }
    profile = name;
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "env") env = value;
    else if (key == "profile") apply_profile(value);
    else if (key == "out") out_dir = value;
    else if (key == "replay_dataset") replay_dataset = value;
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "compare_policy") compare_policy = value;
    else if (key == "replay_match_action")
        replay_match_action = parse_bool(value, key);
    else if (key == "seed")
        nfq.seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "gamma") nfq.gamma = parse_double(value, key);
    else if (key == "epsilon") nfq.epsilon = parse_double(value, key);
    else if (key == "episodes") nfq.episodes = static_cast<int>(parse_long(value, key));
    else if (key == "max_steps") nfq.max_steps = static_cast<int>(parse_long(value, key));
    else if (key == "reset_period")
        nfq.reset_period = static_cast<int>(parse_long(value, key));
    else if (key == "nfq_iterations")
        nfq.nfq_iterations = static_cast<int>(parse_long(value, key));
    else if (key == "epochs") nfq.epochs = static_cast<int>(parse_long(value, key));
    else if (key == "hint_count")
        nfq.hint_count = static_cast<int>(parse_long(value, key));
    else if (key == "v_max") nfq.v_max = parse_double(value, key);
    else if (key == "strict_success")
        nfq.strict_success = parse_bool(value, key);
    else if (key == "hold_steps")
        nfq.hold_steps = static_cast<int>(parse_long(value, key));
    else if (key == "layers") {
        std::istringstream in(value);
        std::vector<int> sizes;
        int w = 0;
        while (in >> w) sizes.push_back(w);
        if (sizes.size() < 2) throw ConfigError("bad layer list: " + value);
        nfq.layers.sizes = sizes;
    }
    else if (key == "eta_plus") nfq.rprop.eta_plus = parse_double(value, key);
    else if (key == "eta_minus") nfq.rprop.eta_minus = parse_double(value, key);
    else if (key == "delta0") nfq.rprop.delta0 = parse_double(value, key);
    else if (key == "delta_min") nfq.rprop.delta_min = parse_double(value, key);
    else if (key == "delta_max") nfq.rprop.delta_max = parse_double(value, key);
    else if (key == "goal_position") regions.goal_position = parse_double(value, key);
    else if (key == "goal_velocity") regions.goal_velocity = parse_double(value, key);
    else if (key == "forbidden_position")
        regions.forbidden_position = parse_double(value, key);
    else if (key == "forbidden_velocity")
        regions.forbidden_velocity = parse_double(value, key);
    else if (key == "use_forbidden_velocity")
        regions.use_forbidden_velocity = parse_bool(value, key);
    else if (key == "step_cost") costs.step_cost = parse_double(value, key);
    else if (key == "away_multiplier")
        costs.away_multiplier = parse_double(value, key);
    else if (key == "forbidden_cost")
        costs.forbidden_cost = parse_double(value, key);
    else if (key == "goal_cost") costs.goal_cost = parse_double(value, key);
    else if (key == "torque_gain") model.torque_gain = parse_double(value, key);
    else if (key == "damping") model.damping = parse_double(value, key);
    else if (key == "noise_std") model.noise_std = parse_double(value, key);
    else if (key == "position_range")
        init.position_range = parse_double(value, key);
    else if (key == "velocity_init") init.velocity_init = parse_double(value, key);
    else if (key == "voltage_init") init.voltage_init = parse_double(value, key);
    else throw ConfigError("unknown config key: " + key);
}

void RunConfig::validate() const {
    if (env != "physics" && env != "replay")
        throw ConfigError("env must be 'physics' or 'replay'");
    if (env == "replay" && replay_dataset.empty())
        throw ConfigError("replay environment requires replay_dataset");
    if (compare_policy != "random" && compare_policy != "checkpoint")
        throw ConfigError("compare_policy must be 'random' or 'checkpoint'");
    nfq.validate();
    if (regions.goal_position <= 0.0 || regions.goal_velocity <= 0.0 ||
        regions.forbidden_position <= 0.0 || regions.forbidden_velocity <= 0.0)
        throw ConfigError("region bounds must be > 0");
    if (regions.goal_position >= regions.forbidden_position)
        throw ConfigError("goal position bound must be < forbidden bound");
    if (costs.step_cost < 0.0) throw ConfigError("step_cost must be >= 0");
    if (model.damping < 0.0 || model.damping >= 1.0)
        throw ConfigError("damping must be in [0, 1)");
    if (model.torque_gain <= 0.0) throw ConfigError("torque_gain must be > 0");
    if (model.noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
    if (init.position_range >= regions.forbidden_position)
        throw ConfigError("position_range must be < forbidden bound");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'key = value'");
        cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg,
                     const std::vector<std::string>& key_value_pairs) {
    for (const std::string& kv : key_value_pairs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + kv);
        cfg.set_key(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
}

namespace {

// Owns the replay dataset when one is in use.
struct EnvBundle {
    TransitionSet set;
    std::unique_ptr<Environment> env;
};

EnvBundle make_environment(const RunConfig& cfg) {
    EnvBundle b;
    if (cfg.env == "replay") {
        auto rows = io::read_transition_log(cfg.replay_dataset);
        b.set = build_from_log(io::transitions_of(rows),
                               normalized_weights(cfg.regions, cfg.nfq.v_max),
                               cfg.replay_match_action);
        b.env = std::make_unique<ReplayEnv>(b.set, cfg.init, cfg.regions,
                                            cfg.costs);
    } else {
        b.env = std::make_unique<PhysicsEnv>(cfg.model, cfg.init, cfg.regions,
                                             cfg.costs, cfg.nfq.v_max);
    }
    return b;
}

} // namespace

CollectResult cmd_collect(const RunConfig& cfg, long n_steps) {
    cfg.validate();
    if (cfg.env != "physics")
        throw ConfigError("collect requires the physics environment");
    if (n_steps < 1) throw InputError("collect: n_steps must be >= 1");
    ensure_dir(cfg.out_dir);

    PhysicsEnv env(cfg.model, cfg.init, cfg.regions, cfg.costs, cfg.nfq.v_max);
    std::vector<io::LogRow> rows;
    rows.reserve(static_cast<std::size_t>(n_steps));
    for (int e = 0; static_cast<long>(rows.size()) < n_steps; ++e) {
        const std::uint64_t ep_seed = derive_seed(
            cfg.nfq.seed, SeedStream::Collect, static_cast<std::uint64_t>(e));
        State s = env.reset(splitmix64(ep_seed));
        std::mt19937_64 rng(splitmix64(ep_seed + 1));
        std::uniform_int_distribution<int> coin(0, 1);
        for (int t = 0;
             t < cfg.nfq.max_steps && static_cast<long>(rows.size()) < n_steps;
             ++t) {
            const Action a = coin(rng) == 0 ? Action::Left : Action::Right;
            const Transition tr = env.step(s, a);
            rows.push_back({e, t, tr});
            s = tr.s_next;
            if (is_terminal(tr.kind)) break;
        }
    }

    CollectResult res;
    res.log_path = cfg.out_dir + "/transitions.csv";
    res.rows = static_cast<long>(rows.size());
    io::write_transition_log(res.log_path, rows);
    return res;
}

namespace {

void write_summary(const std::string& path, const TrainSummary& s) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "# format: nfq-summary v1\n";
    out << "episodes " << s.episodes << '\n';
    out << "successes " << s.successes << '\n';
    for (int q = 0; q < 4; ++q)
        out << "quarter_mean_cost_" << (q + 1) << ' '
            << io::format_double(s.quarter_mean_cost[static_cast<std::size_t>(q)])
            << '\n';
    out << "last_quarter_mean_cost "
        << io::format_double(s.last_quarter_mean_cost) << '\n';
    out << "aborted_episode " << s.aborted_episode << '\n';
    out << "abort_reason " << (s.abort_reason.empty() ? "-" : s.abort_reason)
        << '\n';
    if (!out) throw IoError("write failed: " + path);
}

} // namespace

TrainSummary cmd_train(const RunConfig& cfg) {
    cfg.validate();
    ensure_dir(cfg.out_dir);

    EnvBundle bundle = make_environment(cfg);

    TrainLoopHooks hooks;
    hooks.on_reset = [&](int episode, const NetworkParams& net,
                         const RpropState& opt) {
        char name[64];
        std::snprintf(name, sizeof(name), "/checkpoint_reset_e%03d.txt",
                      episode);
        io::save_checkpoint(cfg.out_dir + name, net, opt, cfg.nfq.seed);
    };

    TrainLoopResult result = train_loop(*bundle.env, cfg.nfq, cfg.regions, hooks);

    TrainSummary summary;
    summary.episodes = static_cast<int>(result.metrics.size());
    summary.aborted_episode = result.aborted_episode;
    summary.abort_reason = result.abort_reason;
    summary.metrics_path = cfg.out_dir + "/metrics.csv";
    summary.checkpoint_path = cfg.out_dir + "/checkpoint_final.txt";

    const std::size_t n = result.metrics.size();
    for (const EpisodeMetrics& m : result.metrics)
        if (m.success) ++summary.successes;
    for (int q = 0; q < 4; ++q) {
        const std::size_t begin = n * static_cast<std::size_t>(q) / 4;
        const std::size_t end = n * static_cast<std::size_t>(q + 1) / 4;
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            sum += result.metrics[i].total_cost;
        summary.quarter_mean_cost[static_cast<std::size_t>(q)] =
            end > begin ? sum / static_cast<double>(end - begin) : 0.0;
    }
    summary.last_quarter_mean_cost = summary.quarter_mean_cost[3];

    io::write_metrics(summary.metrics_path, result.metrics);
    io::save_checkpoint(summary.checkpoint_path, result.net, result.opt,
                        cfg.nfq.seed);
    write_summary(cfg.out_dir + "/summary.txt", summary);

    if (result.aborted_episode != 0)
        throw NumericError("training aborted at episode " +
                           std::to_string(result.aborted_episode) + ": " +
                           result.abort_reason);
    return summary;
}

namespace {

void append_trajectory(std::vector<io::TrajRow>& rows, int episode,
                       const std::vector<Transition>& transitions) {
    for (std::size_t t = 0; t < transitions.size(); ++t) {
        const Transition& tr = transitions[t];
        rows.push_back({episode, static_cast<int>(t), tr.s_next.position,
                        tr.s_next.velocity, tr.s_next.voltage,
                        action_code(tr.a), tr.cost, tr.kind});
    }
}

} // namespace

EvalReport cmd_eval(const RunConfig& cfg, int n_episodes) {
    cfg.validate();
    if (n_episodes < 1) throw InputError("eval: n_episodes must be >= 1");
    if (cfg.checkpoint.empty())
        throw ConfigError("eval requires a checkpoint path");
    ensure_dir(cfg.out_dir);

    io::Checkpoint cp = io::load_checkpoint(cfg.checkpoint);
    if (cp.net.sizes.front() != 4)
        throw ConfigError("checkpoint network does not take 4 inputs");

    EnvBundle bundle = make_environment(cfg);
    NfqConfig eval_cfg = cfg.nfq;
    eval_cfg.epsilon = 0.0;

    EvalReport report;
    report.episodes = n_episodes;
    std::vector<io::TrajRow> rows;
    int successes = 0;
    int reached = 0;
    double cost_sum = 0.0;
    double steps_to_goal_sum = 0.0;
    for (int i = 1; i <= n_episodes; ++i) {
        const EpisodeResult ep = run_episode(
            *bundle.env, cp.net, eval_cfg, cfg.regions,
            derive_seed(cfg.nfq.seed, SeedStream::Eval,
                        static_cast<std::uint64_t>(i)));
        append_trajectory(rows, i, ep.transitions);
        if (ep.metrics.success) ++successes;
        cost_sum += ep.metrics.total_cost;
        for (std::size_t t = 0; t < ep.transitions.size(); ++t) {
            if (ep.transitions[t].kind == StateKind::Goal) {
                ++reached;
                steps_to_goal_sum += static_cast<double>(t + 1);
                break;
            }
        }
    }

    report.success_rate =
        static_cast<double>(successes) / static_cast<double>(n_episodes);
    report.mean_cost = cost_sum / static_cast<double>(n_episodes);
    report.mean_steps_to_goal =
        reached > 0 ? steps_to_goal_sum / static_cast<double>(reached) : 0.0;

    io::write_trajectories(cfg.out_dir + "/eval_trajectories.csv", rows);
    std::ofstream out(cfg.out_dir + "/eval_report.txt");
    if (!out) throw IoError("cannot open for writing: eval_report.txt");
    out << "# format: nfq-eval v1\n";
    out << "episodes " << report.episodes << '\n';
    out << "success_rate " << io::format_double(report.success_rate) << '\n';
    out << "mean_cost " << io::format_double(report.mean_cost) << '\n';
    out << "mean_steps_to_goal " << io::format_double(report.mean_steps_to_goal)
        << '\n';
    return report;
}

CompareReport cmd_compare(const RunConfig& cfg, int n_episodes) {
    RunConfig local = cfg;
    local.env = "replay"; // both environments are required
    local.validate();
    if (n_episodes < 1) throw InputError("compare: n_episodes must be >= 1");
    ensure_dir(cfg.out_dir);

    io::Checkpoint cp;
    const bool use_checkpoint = cfg.compare_policy == "checkpoint";
    if (use_checkpoint) {
        if (cfg.checkpoint.empty())
            throw ConfigError("compare with checkpoint policy needs a checkpoint");
        cp = io::load_checkpoint(cfg.checkpoint);
    }

    auto rows = io::read_transition_log(cfg.replay_dataset);
    TransitionSet set = build_from_log(
        io::transitions_of(rows),
        normalized_weights(cfg.regions, cfg.nfq.v_max), cfg.replay_match_action);
    PhysicsEnv physics(cfg.model, cfg.init, cfg.regions, cfg.costs,
                       cfg.nfq.v_max);
    ReplayEnv replay(set, cfg.init, cfg.regions, cfg.costs);

    CompareReport report;
    report.episodes = n_episodes;
    std::vector<io::TrajRow> physics_rows;
    std::vector<io::TrajRow> replay_rows;

    for (int i = 1; i <= n_episodes; ++i) {
        const std::uint64_t ep_seed = derive_seed(
            cfg.nfq.seed, SeedStream::Compare, static_cast<std::uint64_t>(i));

        // Same random action sequence for both environments.
        std::vector<Action> script(static_cast<std::size_t>(cfg.nfq.max_steps));
        std::mt19937_64 rng(splitmix64(ep_seed + 1));
        std::uniform_int_distribution<int> coin(0, 1);
        for (Action& a : script)
            a = coin(rng) == 0 ? Action::Left : Action::Right;

        const auto rollout = [&](Environment& env, CompareCounts& counts,
                                 std::vector<io::TrajRow>& dump) {
            State s = env.reset(splitmix64(ep_seed));
            std::vector<Transition> transitions;
            bool forbidden = false;
            bool lookup_failed = false;
            for (int t = 0; t < cfg.nfq.max_steps; ++t) {
                const Action a =
                    use_checkpoint
                        ? greedy_action(cp.net, s, cfg.regions, cfg.nfq.v_max)
                        : script[static_cast<std::size_t>(t)];
                Transition tr;
                try {
                    tr = env.step(s, a);
                } catch (const LookupError&) {
                    lookup_failed = true;
                    break;
                }
                transitions.push_back(tr);
                s = tr.s_next;
                if (is_terminal(tr.kind)) {
                    forbidden = true;
                    break;
                }
            }
            append_trajectory(dump, i, transitions);
            if (forbidden) ++counts.failure;
            else if (!lookup_failed && !transitions.empty() &&
                     transitions.back().kind == StateKind::Goal)
                ++counts.success;
            else ++counts.timeout;
        };

        rollout(physics, report.physics, physics_rows);
        rollout(replay, report.replay, replay_rows);
    }

    io::write_trajectories(cfg.out_dir + "/compare_physics.csv", physics_rows);
    io::write_trajectories(cfg.out_dir + "/compare_replay.csv", replay_rows);

    std::ofstream out(cfg.out_dir + "/compare_report.txt");
    if (!out) throw IoError("cannot open for writing: compare_report.txt");
    out << "# format: nfq-compare v1\n";
    out << "episodes " << report.episodes << '\n';
    out << "physics_success " << report.physics.success << '\n';
    out << "physics_failure " << report.physics.failure << '\n';
    out << "physics_timeout " << report.physics.timeout << '\n';
    out << "replay_success " << report.replay.success << '\n';
    out << "replay_failure " << report.replay.failure << '\n';
    out << "replay_timeout " << report.replay.timeout << '\n';
    return report;
}

std::vector<double> moving_average(const std::vector<double>& series,
                                   int window) {
    std::vector<double> out(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= static_cast<std::size_t>(window)) sum -= series[i - static_cast<std::size_t>(window)];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

void cmd_export_plots(const std::string& metrics_path,
                      const std::string& out_dir) {
    const std::vector<EpisodeMetrics> rows = io::read_metrics(metrics_path);
    ensure_dir(out_dir);

    std::vector<double> costs;
    costs.reserve(rows.size());
    for (const EpisodeMetrics& m : rows) costs.push_back(m.total_cost);
    const std::vector<double> avg = moving_average(costs, 20);

    std::ofstream cost_out(out_dir + "/plot_cost.csv");
    if (!cost_out) throw IoError("cannot open for writing: plot_cost.csv");
    cost_out << "# format: nfq-plot-cost v1\n";
    cost_out << "episode,total_cost,moving_avg_20\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        cost_out << rows[i].episode << ',' << io::format_double(costs[i])
                 << ',' << io::format_double(avg[i]) << '\n';

    std::ofstream q_out(out_dir + "/plot_success_quarters.csv");
    if (!q_out) throw IoError("cannot open for writing: plot_success_quarters.csv");
    q_out << "# format: nfq-plot-quarters v1\n";
    q_out << "quarter,episodes,successes\n";
    const std::size_t n = rows.size();
    for (int q = 0; q < 4; ++q) {
        const std::size_t begin = n * static_cast<std::size_t>(q) / 4;
        const std::size_t end = n * static_cast<std::size_t>(q + 1) / 4;
        int successes = 0;
        for (std::size_t i = begin; i < end; ++i)
            if (rows[i].success) ++successes;
        q_out << (q + 1) << ',' << (end - begin) << ',' << successes << '\n';
    }
}

} // namespace nfq::harness
