#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nfq/errors.hpp"
#include "nfq/nfq.hpp"
#include "nfq/rng.hpp"

using namespace nfq;

namespace {

const RegionSpec kRegions{};
const CostParams kCosts{};

NetworkParams zero_net() {
    NetworkParams net = init_network(LayerSpec{}, 0);
    for (auto& layer : net.weights) std::fill(layer.begin(), layer.end(), 0.0);
    for (auto& layer : net.biases) std::fill(layer.begin(), layer.end(), 0.0);
    return net;
}

NfqConfig small_config() {
    NfqConfig cfg;
    cfg.episodes = 4;
    cfg.max_steps = 20;
    cfg.reset_period = 2;
    cfg.epochs = 5;
    cfg.hint_count = 4;
    return cfg;
}

} // namespace

TEST_CASE("greedy_action breaks ties toward Left") {
    const NetworkParams net = zero_net();
    CHECK(greedy_action(net, {0.3, 0.0, 0.0}, kRegions, 1.0) == Action::Left);
}

TEST_CASE("greedy_action equals an explicit two-way comparison") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-0.6, 0.6);
    std::uniform_real_distribution<double> vel(-0.03, 0.03);
    std::uniform_real_distribution<double> volt(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const NetworkParams net = init_network(LayerSpec{}, rng());
        const State s{pos(rng), vel(rng), volt(rng)};
        const double ql = forward(net, normalize_input(s, Action::Left, kRegions, 1.0));
        const double qr = forward(net, normalize_input(s, Action::Right, kRegions, 1.0));
        const Action expected = ql <= qr ? Action::Left : Action::Right;
        CHECK(greedy_action(net, s, kRegions, 1.0) == expected);
    }
}

TEST_CASE("select_action exploration frequency tracks epsilon") {
    const NetworkParams net = init_network(LayerSpec{}, 1);
    const State s{0.3, 0.0, 0.0};
    const Action greedy = greedy_action(net, s, kRegions, 1.0);

    std::mt19937_64 rng(5);
    SUBCASE("epsilon 0 is always greedy") {
        for (int i = 0; i < 1000; ++i)
            CHECK(select_action(net, s, kRegions, 1.0, 0.0, rng) == greedy);
    }
    SUBCASE("epsilon 1 is uniform") {
        int right = 0;
        for (int i = 0; i < 10000; ++i)
            if (select_action(net, s, kRegions, 1.0, 1.0, rng) == Action::Right)
                ++right;
        CHECK(std::abs(right / 10000.0 - 0.5) < 0.05);
    }
    SUBCASE("epsilon 0.1 deviates from greedy about 5% of the time") {
        // A random draw picks the greedy action half the time, so the
        // observable deviation rate is epsilon / 2.
        int deviations = 0;
        for (int i = 0; i < 10000; ++i)
            if (select_action(net, s, kRegions, 1.0, 0.1, rng) != greedy)
                ++deviations;
        CHECK(std::abs(deviations / 10000.0 - 0.05) < 0.02);
    }
}

namespace {

// Environment entering a forbidden state after a fixed number of steps.
class ScriptedEnv final : public Environment {
public:
    explicit ScriptedEnv(int forbidden_at) : forbidden_at_(forbidden_at) {}

    State reset(std::uint64_t) override {
        t_ = 0;
        return State{0.2, 0.0, 0.0};
    }

    Transition step(const State& s, Action a) override {
        ++t_;
        Transition tr;
        tr.s = s;
        tr.a = a;
        tr.s_next = t_ >= forbidden_at_ ? State{0.8, 0.0, 0.0}
                                        : State{0.2 + 0.01 * t_, 0.01, 0.0};
        tr.kind = classify(tr.s_next, kRegions);
        tr.cost = transition_cost(tr.s_next, s, kRegions, kCosts);
        return tr;
    }

private:
    int forbidden_at_;
    int t_ = 0;
};

} // namespace

TEST_CASE("run_episode stops at a forbidden state and records the unit cost") {
    ScriptedEnv env(3);
    const NetworkParams net = zero_net();
    NfqConfig cfg = small_config();
    const EpisodeResult res = run_episode(env, net, cfg, kRegions, 7);
    CHECK(res.transitions.size() == 3);
    CHECK(res.metrics.steps == 3);
    CHECK(res.metrics.terminated);
    CHECK_FALSE(res.metrics.success);
    CHECK(res.metrics.total_cost ==
          doctest::Approx(0.002 + 0.002 + 1.0).epsilon(1e-12));
}

TEST_CASE("run_episode is deterministic and its totals recompute") {
    PhysicsEnv env({}, {}, kRegions, kCosts, 1.0);
    const NetworkParams net = init_network(LayerSpec{}, 3);
    NfqConfig cfg = small_config();
    cfg.epsilon = 0.0;

    const EpisodeResult a = run_episode(env, net, cfg, kRegions, 11);
    const EpisodeResult b = run_episode(env, net, cfg, kRegions, 11);
    REQUIRE(a.transitions.size() == b.transitions.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i)
        CHECK(a.transitions[i].s_next.position ==
              b.transitions[i].s_next.position);

    // Total cost equals an independent cost recomputation over the states.
    double total = 0.0;
    for (const Transition& t : a.transitions)
        total += transition_cost(t.s_next, t.s, kRegions, kCosts);
    CHECK(a.metrics.total_cost == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("generate_patterns matches a brute-force Bellman target oracle") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> pos(-0.8, 0.8);
    std::uniform_real_distribution<double> vel(-0.05, 0.05);
    std::uniform_real_distribution<double> volt(-1.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);

    std::vector<Transition> buffer;
    for (int i = 0; i < 100; ++i) {
        Transition t;
        t.s = {pos(rng), vel(rng), volt(rng)};
        t.a = coin(rng) == 0 ? Action::Left : Action::Right;
        t.s_next = {pos(rng), vel(rng), volt(rng)};
        t.kind = classify(t.s_next, kRegions);
        t.cost = transition_cost(t.s_next, t.s, kRegions, kCosts);
        buffer.push_back(t);
    }

    const NetworkParams net = init_network(LayerSpec{}, 23);
    NfqConfig cfg;
    const std::vector<Pattern> patterns =
        generate_patterns(buffer, net, cfg, kRegions);
    REQUIRE(patterns.size() == buffer.size());

    for (std::size_t i = 0; i < buffer.size(); ++i) {
        const Transition& t = buffer[i];
        double expected = t.cost;
        if (t.kind != StateKind::Forbidden) {
            const double ql = forward(
                net, normalize_input(t.s_next, Action::Left, kRegions, 1.0));
            const double qr = forward(
                net, normalize_input(t.s_next, Action::Right, kRegions, 1.0));
            expected += cfg.gamma * std::min(ql, qr);
        }
        expected = std::clamp(expected, 0.0, 1.0);
        CHECK(std::abs(patterns[i].target - expected) <= 1e-12);
        if (t.kind == StateKind::Forbidden) CHECK(patterns[i].target == 1.0);
        CHECK(patterns[i].target >= 0.0);
        CHECK(patterns[i].target <= 1.0);
    }
}

TEST_CASE("generate_patterns with gamma 0 returns bare costs") {
    std::vector<Transition> buffer(3);
    buffer[0] = {{0.2, 0.0, 0.0}, Action::Left, 0.001, {0.15, -0.05, -0.1},
                 StateKind::Regular};
    buffer[1] = {{0.2, 0.0, 0.0}, Action::Right, 1.0, {0.8, 0.1, 0.1},
                 StateKind::Forbidden};
    buffer[2] = {{0.1, 0.0, 0.0}, Action::Left, 0.0, {0.01, 0.001, -0.1},
                 StateKind::Goal};
    const NetworkParams net = init_network(LayerSpec{}, 2);
    NfqConfig cfg;
    cfg.gamma = 0.0;
    const std::vector<Pattern> patterns =
        generate_patterns(buffer, net, cfg, kRegions);
    CHECK(patterns[0].target == 0.001);
    CHECK(patterns[1].target == 1.0);
    CHECK(patterns[2].target == 0.0);
}

TEST_CASE("generate_patterns rejects an empty buffer") {
    const NetworkParams net = init_network(LayerSpec{}, 2);
    CHECK_THROWS_AS(generate_patterns({}, net, NfqConfig{}, kRegions),
                    ConfigError);
}

TEST_CASE("hint_to_goal emits zero targets inside the goal region") {
    std::mt19937_64 rng(29);
    const std::vector<Pattern> hints = hint_to_goal(50, kRegions, 1.0, rng);
    REQUIRE(hints.size() == 50);
    bool saw_left = false, saw_right = false;
    for (const Pattern& p : hints) {
        CHECK(p.target == 0.0);
        // Undo the normalization to check the sampled state region.
        CHECK(std::abs(p.input[0] * 0.7) < 0.05);
        CHECK(std::abs(p.input[1] * 0.04) < 0.01);
        if (p.input[3] < 0) saw_left = true;
        else saw_right = true;
    }
    CHECK(saw_left);
    CHECK(saw_right);
}

TEST_CASE("train_loop base case: one episode, buffer equals its steps") {
    PhysicsEnv env({}, {}, kRegions, kCosts, 1.0);
    NfqConfig cfg = small_config();
    cfg.episodes = 1;
    cfg.reset_period = 1;
    const TrainLoopResult res = train_loop(env, cfg, kRegions);
    REQUIRE(res.metrics.size() == 1);
    CHECK(res.metrics[0].episode == 1);
    CHECK(res.buffer.size() == static_cast<std::size_t>(res.metrics[0].steps));
    CHECK(res.aborted_episode == 0);
}

TEST_CASE("train_loop reset schedule and growing buffer") {
    PhysicsEnv env({}, {}, kRegions, kCosts, 1.0);
    NfqConfig cfg = small_config(); // 4 episodes, reset period 2
    std::vector<int> reset_episodes;
    TrainLoopHooks hooks;
    hooks.on_reset = [&](int e, const NetworkParams&, const RpropState&) {
        reset_episodes.push_back(e);
    };
    const TrainLoopResult res = train_loop(env, cfg, kRegions, hooks);

    REQUIRE(res.metrics.size() == 4);
    CHECK(reset_episodes == std::vector<int>{0, 3});
    CHECK_FALSE(res.metrics[0].reset_occurred);
    CHECK_FALSE(res.metrics[1].reset_occurred);
    CHECK(res.metrics[2].reset_occurred);
    CHECK_FALSE(res.metrics[3].reset_occurred);

    std::size_t total = 0;
    for (const EpisodeMetrics& m : res.metrics)
        total += static_cast<std::size_t>(m.steps);
    CHECK(res.buffer.size() == total);
}

TEST_CASE("train_loop reset reproduces init_network for the derived seed") {
    PhysicsEnv env({}, {}, kRegions, kCosts, 1.0);
    NfqConfig cfg = small_config();
    std::vector<std::pair<int, NetworkParams>> resets;
    TrainLoopHooks hooks;
    hooks.on_reset = [&](int e, const NetworkParams& net, const RpropState&) {
        resets.emplace_back(e, net);
    };
    train_loop(env, cfg, kRegions, hooks);
    REQUIRE(resets.size() == 2);
    const NetworkParams expected0 =
        init_network(cfg.layers, derive_seed(cfg.seed, SeedStream::NetInit, 0));
    const NetworkParams expected1 =
        init_network(cfg.layers, derive_seed(cfg.seed, SeedStream::NetInit, 1));
    CHECK(resets[0].second.weights == expected0.weights);
    CHECK(resets[1].second.weights == expected1.weights);
}

TEST_CASE("train_loop is bit-deterministic for a fixed master seed") {
    NfqConfig cfg = small_config();
    PhysicsEnv env1({}, {}, kRegions, kCosts, 1.0);
    PhysicsEnv env2({}, {}, kRegions, kCosts, 1.0);
    const TrainLoopResult a = train_loop(env1, cfg, kRegions);
    const TrainLoopResult b = train_loop(env2, cfg, kRegions);
    CHECK(a.net.weights == b.net.weights);
    CHECK(a.net.biases == b.net.biases);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].steps == b.metrics[i].steps);
        CHECK(a.metrics[i].total_cost == b.metrics[i].total_cost);
    }
}

TEST_CASE("config invariants are enforced") {
    NfqConfig cfg;
    cfg.epsilon = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = NfqConfig{};
    cfg.reset_period = 500; // > episodes
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = NfqConfig{};
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
