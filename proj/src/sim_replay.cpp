#include "nfq/sim_replay.hpp"

#include "nfq/errors.hpp"

namespace nfq {

TransitionSet build_from_log(std::vector<Transition> records,
                             const kernels::DistanceWeights& weights,
                             bool match_action) {
    if (records.empty())
        throw ConfigError("replay set: transition log is empty");
    TransitionSet set;
    set.transitions = std::move(records);
    set.weights = weights;
    set.match_action = match_action;
    return set;
}

kernels::DistanceWeights normalized_weights(const RegionSpec& regions,
                                            double v_max) {
    kernels::DistanceWeights w;
    w.position = 1.0 / (regions.forbidden_position * regions.forbidden_position);
    w.velocity = 1.0 / (regions.forbidden_velocity * regions.forbidden_velocity);
    w.voltage = 1.0 / (v_max * v_max);
    return w;
}

std::size_t nearest_neighbor(const TransitionSet& set, const State& query,
                             Action a) {
    const std::size_t idx = kernels::nearest_neighbor_parallel(
        set.transitions, query, a, set.weights, set.match_action);
    if (idx == kernels::kNoNeighbor)
        throw LookupError("replay set has no transition with the requested action");
    return idx;
}

Transition step_replay(const TransitionSet& set, const State& s, Action a,
                       const RegionSpec& regions, const CostParams& params) {
    const std::size_t idx = nearest_neighbor(set, s, a);
    Transition t;
    t.s = s;
    t.a = a;
    t.s_next = set.transitions[idx].s_next;
    t.kind = classify(t.s_next, regions);
    t.cost = transition_cost(t.s_next, s, regions, params);
    return t;
}

} // namespace nfq
