#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nfq/env.hpp"
#include "nfq/net.hpp"
#include "nfq/nfq.hpp"

namespace nfq::io {

// All files are plain text with a "# format: ..." first line and doubles
// printed with %.17g so a round trip reproduces the values exactly.

std::string format_double(double x);

struct Checkpoint {
    NetworkParams net;
    RpropState opt;
    std::uint64_t seed = 0;
};

void save_checkpoint(const std::string& path, const NetworkParams& net,
                     const RpropState& opt, std::uint64_t seed);
Checkpoint load_checkpoint(const std::string& path);

// One transition-log row: episode/t locate the sample within collection.
struct LogRow {
    int episode = 0;
    int t = 0;
    Transition tr;
};

void write_transition_log(const std::string& path,
                          const std::vector<LogRow>& rows);
std::vector<LogRow> read_transition_log(const std::string& path);
std::vector<Transition> transitions_of(const std::vector<LogRow>& rows);

void write_metrics(const std::string& path,
                   const std::vector<EpisodeMetrics>& rows);
std::vector<EpisodeMetrics> read_metrics(const std::string& path);

struct TrajRow {
    int episode = 0;
    int t = 0;
    double position = 0.0;
    double velocity = 0.0;
    double voltage = 0.0;
    int action = 0;
    double cost = 0.0;
    StateKind kind = StateKind::Regular;
};

void write_trajectories(const std::string& path,
                        const std::vector<TrajRow>& rows);
std::vector<TrajRow> read_trajectories(const std::string& path);

} // namespace nfq::io
