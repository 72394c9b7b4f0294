#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nfq/env.hpp"
#include "nfq/net.hpp"
#include "nfq/sim_physics.hpp"
#include "nfq/sim_replay.hpp"

namespace nfq {

struct NfqConfig {
    double gamma = 0.99;
    double epsilon = 0.1;
    int episodes = 300;
    int max_steps = 300;          // episode length T
    int reset_period = 100;       // hardware profile uses 50
    int nfq_iterations = 1;       // fitted iterations per collected episode
    int epochs = 300;             // Rprop epochs per iteration; hardware 100
    int hint_count = 100;         // hint-to-goal patterns per iteration
    double v_max = 1.0;
    std::uint64_t seed = 0;
    bool strict_success = false;  // require the goal held for hold_steps
    int hold_steps = 10;
    LayerSpec layers;
    RpropHyper rprop;

    void validate() const; // throws ConfigError
};

struct EpisodeMetrics {
    int episode = 0; // 1-based
    int steps = 0;
    double total_cost = 0.0;
    bool success = false;
    bool terminated = false;    // entered a forbidden state
    bool reset_occurred = false;
};

// Minimal environment contract shared by the physics and replay simulators.
class Environment {
public:
    virtual ~Environment() = default;
    virtual State reset(std::uint64_t seed) = 0;
    virtual Transition step(const State& s, Action a) = 0;
};

class PhysicsEnv final : public Environment {
public:
    PhysicsEnv(MotorModel model, InitSpec init, RegionSpec regions,
               CostParams costs, double v_max)
        : model_(model), init_(init), regions_(regions), costs_(costs),
          v_max_(v_max) {}

    State reset(std::uint64_t seed) override;
    Transition step(const State& s, Action a) override;

private:
    MotorModel model_;
    InitSpec init_;
    RegionSpec regions_;
    CostParams costs_;
    double v_max_;
    std::mt19937_64 rng_;
};

class ReplayEnv final : public Environment {
public:
    ReplayEnv(const TransitionSet& set, InitSpec init, RegionSpec regions,
              CostParams costs)
        : set_(&set), init_(init), regions_(regions), costs_(costs) {}

    State reset(std::uint64_t seed) override;
    Transition step(const State& s, Action a) override;

private:
    const TransitionSet* set_;
    InitSpec init_;
    RegionSpec regions_;
    CostParams costs_;
};

// Argmin of Q over both actions; ties go Left.
Action greedy_action(const NetworkParams& net, const State& s,
                     const RegionSpec& regions, double v_max);

// Uniform random action with probability epsilon, greedy otherwise.
Action select_action(const NetworkParams& net, const State& s,
                     const RegionSpec& regions, double v_max, double epsilon,
                     std::mt19937_64& rng);

struct EpisodeResult {
    std::vector<Transition> transitions;
    EpisodeMetrics metrics;
};

EpisodeResult run_episode(Environment& env, const NetworkParams& net,
                          const NfqConfig& cfg, const RegionSpec& regions,
                          std::uint64_t episode_seed);

// One Bellman pattern per stored transition; forbidden successors take the
// bare cost (no bootstrap), all targets clamped to [0, 1].
std::vector<Pattern> generate_patterns(const std::vector<Transition>& buffer,
                                       const NetworkParams& net,
                                       const NfqConfig& cfg,
                                       const RegionSpec& regions);

// Artificial goal-region patterns with target 0, alternating actions.
std::vector<Pattern> hint_to_goal(int count, const RegionSpec& regions,
                                  double v_max, std::mt19937_64& rng);

struct TrainLoopResult {
    std::vector<EpisodeMetrics> metrics;
    std::vector<Transition> buffer;
    NetworkParams net;
    RpropState opt;
    int aborted_episode = 0; // 0 when training ran to completion
    std::string abort_reason;
};

// Called after each reset (and once at startup) with the fresh parameters,
// and after every episode with its metrics row.
struct TrainLoopHooks {
    std::function<void(int episode, const NetworkParams&, const RpropState&)>
        on_reset;
    std::function<void(const EpisodeMetrics&)> on_episode;
};

TrainLoopResult train_loop(Environment& env, const NfqConfig& cfg,
                           const RegionSpec& regions,
                           const TrainLoopHooks& hooks = {});

} // namespace nfq
