#include "nfq/sim_physics.hpp"

namespace nfq {

State reset_state(const InitSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-spec.position_range,
                                                spec.position_range);
    State s;
    s.position = dist(rng);
    s.velocity = spec.velocity_init;
    s.voltage = spec.voltage_init;
    return s;
}

Transition step_physics(const State& s, Action a, const MotorModel& model,
                        const RegionSpec& regions, const CostParams& params,
                        double v_max, std::mt19937_64& rng) {
    State next;
    next.voltage = apply_action(s.voltage, a, v_max);
    double noise = 0.0;
    if (model.noise_std > 0.0) {
        std::normal_distribution<double> dist(0.0, model.noise_std);
        noise = dist(rng);
    }
    next.velocity = (1.0 - model.damping) * s.velocity +
                    model.torque_gain * next.voltage + noise;
    next.position = s.position + next.velocity;

    Transition t;
    t.s = s;
    t.a = a;
    t.s_next = next;
    t.kind = classify(next, regions);
    t.cost = transition_cost(next, s, regions, params);
    return t;
}

} // namespace nfq
