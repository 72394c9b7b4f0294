#pragma once

#include <array>

namespace nfq {

// Motor snapshot. Position is a fraction of a full turn (0.1 = 36 degrees),
// velocity is the position delta per 20 ms step, voltage is the last applied
// command.
struct State {
    double position = 0.0;
    double velocity = 0.0;
    double voltage = 0.0;
};

enum class Action { Left, Right };

inline constexpr std::array<Action, 2> kActions{Action::Left, Action::Right};

inline constexpr int action_code(Action a) {
    return a == Action::Left ? -1 : +1;
}

enum class StateKind { Regular, Goal, Forbidden };

const char* kind_name(StateKind kind);

// Goal region X+ and forbidden region X-. The forbidden velocity clause is
// off by default; when enabled it is a separate forbidden condition.
struct RegionSpec {
    double goal_position = 0.05;
    double goal_velocity = 0.01;
    double forbidden_position = 0.7;
    double forbidden_velocity = 0.04;
    bool use_forbidden_velocity = false;
};

struct CostParams {
    double step_cost = 0.001;
    double away_multiplier = 2.0;
    double forbidden_cost = 1.0;
    double goal_cost = 0.0;
};

struct Transition {
    State s;
    Action a = Action::Left;
    double cost = 0.0;
    State s_next;
    StateKind kind = StateKind::Regular; // classification of s_next
};

// Forbidden takes precedence over Goal.
StateKind classify(const State& s, const RegionSpec& regions);

// Cost of arriving at s_next from s_prev. "Moving away from the center"
// means |position| strictly increased over the step.
double transition_cost(const State& s_next, const State& s_prev,
                       const RegionSpec& regions, const CostParams& params);

// Voltage delta of +-0.1 V, clamped to [-v_max, v_max].
double apply_action(double voltage, Action a, double v_max);

// Only forbidden states terminate; goal states must be held to episode end.
inline bool is_terminal(StateKind kind) { return kind == StateKind::Forbidden; }

// MLP input: [pos/forbidden_pos, vel/forbidden_vel, volt/v_max, action code],
// each clamped to [-1, 1].
std::array<double, 4> normalize_input(const State& s, Action a,
                                      const RegionSpec& regions, double v_max);

} // namespace nfq
