#include "nfq/net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nfq/errors.hpp"
#include "nfq/kernels.hpp"

namespace nfq {

void LayerSpec::validate() const {
    if (sizes.size() < 2)
        throw ConfigError("layer spec needs at least input and output widths");
    for (int w : sizes)
        if (w < 1) throw ConfigError("layer width must be >= 1");
    if (sizes.back() != 1)
        throw ConfigError("output layer width must be 1");
}

std::size_t NetworkParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

bool NetworkParams::all_finite() const {
    const auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(),
                           [](double x) { return std::isfinite(x); });
    };
    for (std::size_t l = 0; l < weights.size(); ++l)
        if (!finite(weights[l]) || !finite(biases[l])) return false;
    return true;
}

ParamTensors ParamTensors::zeros_like(const NetworkParams& net) {
    return filled_like(net, 0.0);
}

ParamTensors ParamTensors::filled_like(const NetworkParams& net, double value) {
    ParamTensors t;
    t.weights.reserve(net.weights.size());
    t.biases.reserve(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        t.weights.emplace_back(net.weights[l].size(), value);
        t.biases.emplace_back(net.biases[l].size(), value);
    }
    return t;
}

void NetWorkspace::resize_for(const NetworkParams& net) {
    const std::size_t layers = net.sizes.size();
    act.resize(layers);
    delta.resize(layers);
    for (std::size_t i = 0; i < layers; ++i) {
        act[i].resize(static_cast<std::size_t>(net.sizes[i]));
        delta[i].resize(static_cast<std::size_t>(net.sizes[i]));
    }
}

NetworkParams init_network(const LayerSpec& spec, std::uint64_t seed) {
    spec.validate();
    NetworkParams net;
    net.sizes = spec.sizes;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        const auto in = static_cast<std::size_t>(spec.sizes[l]);
        const auto out = static_cast<std::size_t>(spec.sizes[l + 1]);
        std::vector<double> w(in * out);
        std::vector<double> b(out);
        for (double& x : w) x = dist(rng);
        for (double& x : b) x = dist(rng);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

RpropState make_rprop_state(const NetworkParams& net, const RpropHyper& hp) {
    RpropState opt;
    opt.hp = hp;
    opt.step = ParamTensors::filled_like(net, hp.delta0);
    opt.prev_grad = ParamTensors::zeros_like(net);
    return opt;
}

std::pair<NetworkParams, RpropState> reset_network(const LayerSpec& spec,
                                                   std::uint64_t seed,
                                                   const RpropHyper& hp) {
    NetworkParams net = init_network(spec, seed);
    RpropState opt = make_rprop_state(net, hp);
    return {std::move(net), std::move(opt)};
}

static inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double forward(const NetworkParams& net, std::span<const double> input,
               NetWorkspace& ws) {
    if (input.size() != static_cast<std::size_t>(net.sizes.front()))
        throw InputError("forward: input width mismatch");
    for (double x : input)
        if (!std::isfinite(x)) throw InputError("forward: non-finite input");

    std::copy(input.begin(), input.end(), ws.act[0].begin());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto in = static_cast<std::size_t>(net.sizes[l]);
        const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
        const double* w = net.weights[l].data();
        const double* prev = ws.act[l].data();
        double* cur = ws.act[l + 1].data();
        for (std::size_t j = 0; j < out; ++j) {
            double z = net.biases[l][j];
            const double* row = w + j * in;
            for (std::size_t i = 0; i < in; ++i) z += row[i] * prev[i];
            cur[j] = sigmoid(z);
        }
    }
    return ws.act.back()[0];
}

double forward(const NetworkParams& net, std::span<const double> input) {
    NetWorkspace ws;
    ws.resize_for(net);
    return forward(net, input, ws);
}

ParamTensors batch_gradient(const NetworkParams& net,
                            std::span<const Pattern> patterns) {
    if (patterns.empty())
        throw InputError("batch_gradient: empty pattern set");
    if (patterns.size() >= 2048)
        return kernels::batch_gradient_parallel(net, patterns);
    return kernels::batch_gradient_serial(net, patterns);
}

double batch_loss(const NetworkParams& net, std::span<const Pattern> patterns) {
    if (patterns.empty()) throw InputError("batch_loss: empty pattern set");
    if (patterns.size() >= 2048)
        return kernels::batch_loss_parallel(net, patterns);
    return kernels::batch_loss_serial(net, patterns);
}

static inline double sign(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

void rprop_apply(NetworkParams& net, RpropState& opt, const ParamTensors& grad) {
    const RpropHyper& hp = opt.hp;
    const auto update = [&](std::vector<double>& w, std::vector<double>& step,
                            std::vector<double>& prev,
                            const std::vector<double>& g) {
        if (w.size() != g.size())
            throw InputError("rprop_apply: gradient shape mismatch");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double p = prev[i] * g[i];
            if (p > 0.0) {
                step[i] = std::min(step[i] * hp.eta_plus, hp.delta_max);
                prev[i] = g[i];
            } else if (p < 0.0) {
                step[i] = std::max(step[i] * hp.eta_minus, hp.delta_min);
                prev[i] = 0.0;
            } else {
                prev[i] = g[i];
            }
            w[i] -= sign(g[i]) * step[i];
        }
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], opt.step.weights[l], opt.prev_grad.weights[l],
               grad.weights[l]);
        update(net.biases[l], opt.step.biases[l], opt.prev_grad.biases[l],
               grad.biases[l]);
    }
}

void rprop_epoch(NetworkParams& net, RpropState& opt,
                 std::span<const Pattern> patterns) {
    rprop_apply(net, opt, batch_gradient(net, patterns));
}

TrainReport train(NetworkParams& net, RpropState& opt,
                  std::span<const Pattern> patterns, int epochs) {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    TrainReport report;
    report.initial_loss = batch_loss(net, patterns);
    for (int e = 0; e < epochs; ++e) rprop_epoch(net, opt, patterns);
    report.final_loss = batch_loss(net, patterns);
    return report;
}

} // namespace nfq
