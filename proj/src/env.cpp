#include "nfq/env.hpp"

#include <algorithm>
#include <cmath>

#include "nfq/errors.hpp"

namespace nfq {

const char* kind_name(StateKind kind) {
    switch (kind) {
    case StateKind::Regular: return "Regular";
    case StateKind::Goal: return "Goal";
    case StateKind::Forbidden: return "Forbidden";
    }
    return "?";
}

StateKind classify(const State& s, const RegionSpec& regions) {
    const bool forbidden =
        std::abs(s.position) >= regions.forbidden_position ||
        (regions.use_forbidden_velocity &&
         std::abs(s.velocity) >= regions.forbidden_velocity);
    if (forbidden) return StateKind::Forbidden;
    if (std::abs(s.position) < regions.goal_position &&
        std::abs(s.velocity) < regions.goal_velocity)
        return StateKind::Goal;
    return StateKind::Regular;
}

double transition_cost(const State& s_next, const State& s_prev,
                       const RegionSpec& regions, const CostParams& params) {
    switch (classify(s_next, regions)) {
    case StateKind::Goal: return params.goal_cost;
    case StateKind::Forbidden: return params.forbidden_cost;
    case StateKind::Regular: break;
    }
    const bool away = std::abs(s_next.position) > std::abs(s_prev.position);
    return params.step_cost * (away ? params.away_multiplier : 1.0);
}

double apply_action(double voltage, Action a, double v_max) {
    const double v = voltage + 0.1 * action_code(a);
    return std::clamp(v, -v_max, v_max);
}

std::array<double, 4> normalize_input(const State& s, Action a,
                                      const RegionSpec& regions, double v_max) {
    const auto unit = [](double x) { return std::clamp(x, -1.0, 1.0); };
    return {unit(s.position / regions.forbidden_position),
            unit(s.velocity / regions.forbidden_velocity),
            unit(s.voltage / v_max),
            static_cast<double>(action_code(a))};
}

} // namespace nfq
