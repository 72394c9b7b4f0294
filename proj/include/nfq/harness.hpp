#pragma once

#include <array>
#include <string>
#include <vector>

#include "nfq/io.hpp"
#include "nfq/nfq.hpp"

namespace nfq::harness {

// Full experiment description. Profiles preset (episodes, reset_period,
// epochs): sim -> (300, 100, 300), hardware -> (150, 50, 100).
struct RunConfig {
    std::string env = "physics";   // physics | replay
    std::string profile = "sim";   // sim | hardware
    std::string out_dir = "out";
    std::string replay_dataset;
    std::string checkpoint;        // for eval / compare with a trained policy
    std::string compare_policy = "random"; // random | checkpoint
    bool replay_match_action = true;

    NfqConfig nfq;
    RegionSpec regions;
    CostParams costs;
    MotorModel model;
    InitSpec init;

    void apply_profile(const std::string& name); // throws ConfigError
    void set_key(const std::string& key, const std::string& value);
    void validate() const;
};

// Key-value config file ('key = value', '#' comments) plus CLI overrides.
RunConfig load_config(const std::string& path);
void apply_overrides(RunConfig& cfg,
                     const std::vector<std::string>& key_value_pairs);

struct CollectResult {
    std::string log_path;
    long rows = 0;
};

// Random-action physics episodes until n_steps transitions are logged.
CollectResult cmd_collect(const RunConfig& cfg, long n_steps);

struct TrainSummary {
    int episodes = 0;
    int successes = 0;
    std::array<double, 4> quarter_mean_cost{};
    double last_quarter_mean_cost = 0.0;
    int aborted_episode = 0;
    std::string abort_reason;
    std::string metrics_path;
    std::string checkpoint_path;
};

TrainSummary cmd_train(const RunConfig& cfg);

struct EvalReport {
    int episodes = 0;
    double success_rate = 0.0;
    double mean_cost = 0.0;
    double mean_steps_to_goal = 0.0; // over episodes that reach the goal
};

EvalReport cmd_eval(const RunConfig& cfg, int n_episodes);

struct CompareCounts {
    int success = 0;
    int failure = 0;
    int timeout = 0; // includes replay lookup failures
};

struct CompareReport {
    int episodes = 0;
    CompareCounts physics;
    CompareCounts replay;
};

// Paired rollouts from identical initial states in both environments.
CompareReport cmd_compare(const RunConfig& cfg, int n_episodes);

void cmd_export_plots(const std::string& metrics_path,
                      const std::string& out_dir);

// Shrinking-window moving average (window rows ending at each index).
std::vector<double> moving_average(const std::vector<double>& series,
                                   int window);

} // namespace nfq::harness
