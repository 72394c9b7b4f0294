#pragma once

#include <cstdint>
#include <random>

#include "nfq/env.hpp"

namespace nfq {

// First-order linear velocity dynamics with additive Gaussian noise. A desk
// stand-in for the physical plant; parameters are not ground truth.
struct MotorModel {
    double torque_gain = 0.003; // velocity units per volt per step
    double damping = 0.1;       // per step, in [0, 1)
    double noise_std = 0.0005; // velocity units
    static constexpr double dt = 0.02; // 50 Hz cycle
};

struct InitSpec {
    double position_range = 0.5;
    double velocity_init = 0.0;
    double voltage_init = 0.0;
};

// Position uniform on [-range, +range], velocity and voltage fixed.
State reset_state(const InitSpec& spec, std::uint64_t seed);

// v' = apply_action(voltage, a); velocity' = (1-d) velocity + k_u v' + noise;
// position' = position + velocity'. Cost and kind are taken on the new state.
Transition step_physics(const State& s, Action a, const MotorModel& model,
                        const RegionSpec& regions, const CostParams& params,
                        double v_max, std::mt19937_64& rng);

} // namespace nfq
