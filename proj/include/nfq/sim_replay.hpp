#pragma once

#include <cstddef>
#include <vector>

#include "nfq/env.hpp"
#include "nfq/kernels.hpp"

namespace nfq {

// Data-driven simulator: a step query returns the stored successor of the
// nearest logged state. Immutable after build; lookups are pure.
struct TransitionSet {
    std::vector<Transition> transitions;
    kernels::DistanceWeights weights;
    bool match_action = true;
};

// Preserves log order. Throws ConfigError on an empty log.
TransitionSet build_from_log(std::vector<Transition> records,
                             const kernels::DistanceWeights& weights,
                             bool match_action = true);

kernels::DistanceWeights normalized_weights(const RegionSpec& regions,
                                            double v_max);

// Throws LookupError when no stored transition has the requested action.
std::size_t nearest_neighbor(const TransitionSet& set, const State& query,
                             Action a);

// Copies the matched neighbor's successor verbatim; cost and kind are
// recomputed from (s, s').
Transition step_replay(const TransitionSet& set, const State& s, Action a,
                       const RegionSpec& regions, const CostParams& params);

} // namespace nfq
