#include "nfq/nfq.hpp"

#include <algorithm>
#include <cmath>

#include "nfq/errors.hpp"
#include "nfq/rng.hpp"

namespace nfq {

void NfqConfig::validate() const {
    if (gamma < 0.0 || gamma > 1.0)
        throw ConfigError("gamma must be in [0, 1]");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw ConfigError("epsilon must be in [0, 1]");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (reset_period < 1) throw ConfigError("reset_period must be >= 1");
    if (reset_period > episodes)
        throw ConfigError("reset_period must be <= episodes");
    if (nfq_iterations < 1) throw ConfigError("nfq_iterations must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (hint_count < 1) throw ConfigError("hint_count must be >= 1");
    if (v_max <= 0.0) throw ConfigError("v_max must be > 0");
    if (hold_steps < 1) throw ConfigError("hold_steps must be >= 1");
    layers.validate();
}

State PhysicsEnv::reset(std::uint64_t seed) {
    rng_.seed(splitmix64(seed + 1));
    return reset_state(init_, seed);
}

Transition PhysicsEnv::step(const State& s, Action a) {
    return step_physics(s, a, model_, regions_, costs_, v_max_, rng_);
}

State ReplayEnv::reset(std::uint64_t seed) {
    return reset_state(init_, seed);
}

Transition ReplayEnv::step(const State& s, Action a) {
    return step_replay(*set_, s, a, regions_, costs_);
}

Action greedy_action(const NetworkParams& net, const State& s,
                     const RegionSpec& regions, double v_max) {
    const auto in_left = normalize_input(s, Action::Left, regions, v_max);
    const auto in_right = normalize_input(s, Action::Right, regions, v_max);
    const double q_left = forward(net, in_left);
    const double q_right = forward(net, in_right);
    return q_right < q_left ? Action::Right : Action::Left;
}

Action select_action(const NetworkParams& net, const State& s,
                     const RegionSpec& regions, double v_max, double epsilon,
                     std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
        std::uniform_int_distribution<int> coin(0, 1);
        return coin(rng) == 0 ? Action::Left : Action::Right;
    }
    return greedy_action(net, s, regions, v_max);
}

EpisodeResult run_episode(Environment& env, const NetworkParams& net,
                          const NfqConfig& cfg, const RegionSpec& regions,
                          std::uint64_t episode_seed) {
    EpisodeResult res;
    State s = env.reset(splitmix64(episode_seed));
    std::mt19937_64 explore(splitmix64(episode_seed + 1));

    bool lookup_failed = false;
    for (int t = 0; t < cfg.max_steps; ++t) {
        const Action a =
            select_action(net, s, regions, cfg.v_max, cfg.epsilon, explore);
        Transition tr;
        try {
            tr = env.step(s, a);
        } catch (const LookupError&) {
            lookup_failed = true;
            break;
        }
        res.transitions.push_back(tr);
        res.metrics.total_cost += tr.cost;
        s = tr.s_next;
        if (is_terminal(tr.kind)) {
            res.metrics.terminated = true;
            break;
        }
    }

    res.metrics.steps = static_cast<int>(res.transitions.size());
    if (!res.metrics.terminated && !lookup_failed && !res.transitions.empty()) {
        if (cfg.strict_success) {
            const int n = res.metrics.steps;
            bool held = n >= cfg.hold_steps;
            for (int i = n - cfg.hold_steps; held && i < n; ++i)
                held = res.transitions[static_cast<std::size_t>(i)].kind ==
                       StateKind::Goal;
            res.metrics.success = held;
        } else {
            res.metrics.success =
                res.transitions.back().kind == StateKind::Goal;
        }
    }
    return res;
}

std::vector<Pattern> generate_patterns(const std::vector<Transition>& buffer,
                                       const NetworkParams& net,
                                       const NfqConfig& cfg,
                                       const RegionSpec& regions) {
    if (buffer.empty())
        throw ConfigError("generate_patterns: experience buffer is empty");

    std::vector<Pattern> out(buffer.size());
#pragma omp parallel
    {
        NetWorkspace ws;
        ws.resize_for(net);
#pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(buffer.size()); ++i) {
            const Transition& tr = buffer[static_cast<std::size_t>(i)];
            Pattern p;
            p.input = normalize_input(tr.s, tr.a, regions, cfg.v_max);
            double target = tr.cost;
            if (tr.kind != StateKind::Forbidden) {
                const auto in_l =
                    normalize_input(tr.s_next, Action::Left, regions, cfg.v_max);
                const auto in_r =
                    normalize_input(tr.s_next, Action::Right, regions, cfg.v_max);
                const double q =
                    std::min(forward(net, in_l, ws), forward(net, in_r, ws));
                target += cfg.gamma * q;
            }
            p.target = std::clamp(target, 0.0, 1.0);
            out[static_cast<std::size_t>(i)] = p;
        }
    }
    for (const Pattern& p : out)
        if (!std::isfinite(p.target))
            throw NumericError("generate_patterns: non-finite target");
    return out;
}

std::vector<Pattern> hint_to_goal(int count, const RegionSpec& regions,
                                  double v_max, std::mt19937_64& rng) {
    if (count < 1) throw ConfigError("hint_to_goal: count must be >= 1");
    std::uniform_real_distribution<double> pos(-regions.goal_position,
                                               regions.goal_position);
    std::uniform_real_distribution<double> vel(-regions.goal_velocity,
                                               regions.goal_velocity);
    std::uniform_real_distribution<double> volt(-v_max, v_max);

    std::vector<Pattern> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        State s{pos(rng), vel(rng), volt(rng)};
        const Action a = (i % 2 == 0) ? Action::Left : Action::Right;
        out.push_back({normalize_input(s, a, regions, v_max), 0.0});
    }
    return out;
}

TrainLoopResult train_loop(Environment& env, const NfqConfig& cfg,
                           const RegionSpec& regions,
                           const TrainLoopHooks& hooks) {
    cfg.validate();

    TrainLoopResult result;
    int reset_index = 0;
    std::tie(result.net, result.opt) = reset_network(
        cfg.layers, derive_seed(cfg.seed, SeedStream::NetInit, 0), cfg.rprop);
    if (hooks.on_reset) hooks.on_reset(0, result.net, result.opt);

    for (int e = 1; e <= cfg.episodes; ++e) {
        bool reset_flag = false;
        if (e > 1 && (e - 1) % cfg.reset_period == 0) {
            ++reset_index;
            std::tie(result.net, result.opt) = reset_network(
                cfg.layers,
                derive_seed(cfg.seed, SeedStream::NetInit,
                            static_cast<std::uint64_t>(reset_index)),
                cfg.rprop);
            reset_flag = true;
            if (hooks.on_reset) hooks.on_reset(e, result.net, result.opt);
        }

        EpisodeResult ep = run_episode(
            env, result.net, cfg, regions,
            derive_seed(cfg.seed, SeedStream::Episode,
                        static_cast<std::uint64_t>(e)));
        ep.metrics.episode = e;
        ep.metrics.reset_occurred = reset_flag;
        result.buffer.insert(result.buffer.end(), ep.transitions.begin(),
                             ep.transitions.end());

        try {
            for (int k = 0; !result.buffer.empty() && k < cfg.nfq_iterations;
                 ++k) {
                std::vector<Pattern> patterns =
                    generate_patterns(result.buffer, result.net, cfg, regions);
                std::mt19937_64 hint_rng(derive_seed(
                    cfg.seed, SeedStream::Hint,
                    static_cast<std::uint64_t>(e) * 1000 +
                        static_cast<std::uint64_t>(k)));
                std::vector<Pattern> hints =
                    hint_to_goal(cfg.hint_count, regions, cfg.v_max, hint_rng);
                patterns.insert(patterns.end(), hints.begin(), hints.end());
                const TrainReport report =
                    train(result.net, result.opt, patterns, cfg.epochs);
                if (!std::isfinite(report.final_loss) ||
                    !result.net.all_finite())
                    throw NumericError("non-finite network after training");
            }
        } catch (const NumericError& err) {
            result.aborted_episode = e;
            result.abort_reason = err.what();
            result.metrics.push_back(ep.metrics);
            if (hooks.on_episode) hooks.on_episode(ep.metrics);
            break;
        }

        result.metrics.push_back(ep.metrics);
        if (hooks.on_episode) hooks.on_episode(ep.metrics);
    }
    return result;
}

} // namespace nfq
