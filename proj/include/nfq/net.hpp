#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nfq {

// Layer widths, input to output. Default matches the 4-5-5-1 Q-network.
struct LayerSpec {
    std::vector<int> sizes{4, 5, 5, 1};

    void validate() const; // throws ConfigError
};

// Fully connected MLP with sigmoid units on every hidden and output layer.
// weights[l] is sizes[l+1] x sizes[l], row-major; biases[l] has sizes[l+1].
struct NetworkParams {
    std::vector<int> sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t param_count() const;
    bool all_finite() const;
};

// Same shape as NetworkParams; used for gradients, Rprop step sizes and
// gradient memory.
struct ParamTensors {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static ParamTensors zeros_like(const NetworkParams& net);
    static ParamTensors filled_like(const NetworkParams& net, double value);
};

struct RpropHyper {
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double delta0 = 0.1;
    double delta_min = 1e-6;
    double delta_max = 50.0;
};

struct RpropState {
    RpropHyper hp;
    ParamTensors step;      // per-weight step size, in [delta_min, delta_max]
    ParamTensors prev_grad; // gradient memory
};

// Supervised training pair: normalized (state, action) input and a Bellman
// target in [0, 1].
struct Pattern {
    std::array<double, 4> input;
    double target = 0.0;
};

// Scratch buffers so the hot loops never allocate.
struct NetWorkspace {
    std::vector<std::vector<double>> act;   // post-sigmoid activations per layer
    std::vector<std::vector<double>> delta; // backprop errors per layer

    void resize_for(const NetworkParams& net);
};

NetworkParams init_network(const LayerSpec& spec, std::uint64_t seed);

RpropState make_rprop_state(const NetworkParams& net, const RpropHyper& hp = {});

// init_network plus a fresh optimizer state (all steps at delta0).
std::pair<NetworkParams, RpropState> reset_network(const LayerSpec& spec,
                                                   std::uint64_t seed,
                                                   const RpropHyper& hp = {});

double forward(const NetworkParams& net, std::span<const double> input);
double forward(const NetworkParams& net, std::span<const double> input,
               NetWorkspace& ws);

// Gradient of the mean squared error over the batch.
ParamTensors batch_gradient(const NetworkParams& net,
                            std::span<const Pattern> patterns);

double batch_loss(const NetworkParams& net, std::span<const Pattern> patterns);

// One iRprop- step from an externally supplied gradient. On a sign flip the
// step shrinks and the gradient memory is cleared; the weight always moves
// by -sign(grad) * step.
void rprop_apply(NetworkParams& net, RpropState& opt, const ParamTensors& grad);

void rprop_epoch(NetworkParams& net, RpropState& opt,
                 std::span<const Pattern> patterns);

struct TrainReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

TrainReport train(NetworkParams& net, RpropState& opt,
                  std::span<const Pattern> patterns, int epochs);

} // namespace nfq
