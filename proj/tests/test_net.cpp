#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nfq/errors.hpp"
#include "nfq/net.hpp"

using namespace nfq;

namespace {

// Independent reference: plain sigmoid-MLP forward, written without reusing
// the library's traversal.
double reference_forward(const NetworkParams& net,
                         const std::vector<double>& input) {
    std::vector<double> act = input;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto in = static_cast<std::size_t>(net.sizes[l]);
        const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
        std::vector<double> next(out);
        for (std::size_t j = 0; j < out; ++j) {
            double z = net.biases[l][j];
            for (std::size_t i = 0; i < in; ++i)
                z += net.weights[l][j * in + i] * act[i];
            next[j] = 1.0 / (1.0 + std::exp(-z));
        }
        act = next;
    }
    return act[0];
}

double reference_loss(const NetworkParams& net,
                      const std::vector<Pattern>& patterns) {
    double sum = 0.0;
    for (const Pattern& p : patterns) {
        const double r = reference_forward(net, {p.input.begin(), p.input.end()}) -
                         p.target;
        sum += r * r;
    }
    return sum / static_cast<double>(patterns.size());
}

std::vector<Pattern> random_patterns(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> in(-1.0, 1.0);
    std::uniform_real_distribution<double> target(0.0, 1.0);
    std::vector<Pattern> out;
    for (int i = 0; i < count; ++i) {
        Pattern p;
        for (double& x : p.input) x = in(rng);
        p.target = target(rng);
        out.push_back(p);
    }
    return out;
}

} // namespace

TEST_CASE("init_network is deterministic per seed and distinct across seeds") {
    const LayerSpec spec;
    const NetworkParams a = init_network(spec, 42);
    const NetworkParams b = init_network(spec, 42);
    const NetworkParams c = init_network(spec, 43);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
    CHECK(a.weights != c.weights);
}

TEST_CASE("default spec has 61 parameters in [-0.5, 0.5]") {
    const NetworkParams net = init_network(LayerSpec{}, 0);
    CHECK(net.param_count() == 61);
    for (const auto& layer : net.weights)
        for (double w : layer) {
            CHECK(w >= -0.5);
            CHECK(w <= 0.5);
        }
}

TEST_CASE("invalid layer specs are rejected") {
    CHECK_THROWS_AS(init_network(LayerSpec{{4, 0, 1}}, 0), ConfigError);
    CHECK_THROWS_AS(init_network(LayerSpec{{4}}, 0), ConfigError);
    CHECK_THROWS_AS(init_network(LayerSpec{{4, 5, 2}}, 0), ConfigError);
}

TEST_CASE("all-zero network outputs 0.5") {
    NetworkParams net = init_network(LayerSpec{}, 0);
    for (auto& layer : net.weights) std::fill(layer.begin(), layer.end(), 0.0);
    for (auto& layer : net.biases) std::fill(layer.begin(), layer.end(), 0.0);
    const std::array<double, 4> in{0.3, -0.7, 0.1, 1.0};
    CHECK(forward(net, in) == 0.5);
}

TEST_CASE("forward matches a hand-traced 1-1-1 sigmoid composition") {
    NetworkParams net;
    net.sizes = {1, 1, 1};
    net.weights = {{0.7}, {1.3}};
    net.biases = {{-0.2}, {0.4}};
    const double h = 1.0 / (1.0 + std::exp(-(0.7 * 0.5 - 0.2)));
    const double y = 1.0 / (1.0 + std::exp(-(1.3 * h + 0.4)));
    const std::array<double, 1> in{0.5};
    CHECK(forward(net, in) == doctest::Approx(y).epsilon(1e-15));
}

TEST_CASE("forward stays strictly inside (0, 1)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> in(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const NetworkParams net = init_network(LayerSpec{}, rng());
        const std::array<double, 4> x{in(rng), in(rng), in(rng), in(rng)};
        const double y = forward(net, x);
        CHECK(y > 0.0);
        CHECK(y < 1.0);
    }
}

TEST_CASE("forward rejects non-finite input") {
    const NetworkParams net = init_network(LayerSpec{}, 0);
    const std::array<double, 4> bad{0.0, std::nan(""), 0.0, 0.0};
    CHECK_THROWS_AS(forward(net, bad), InputError);
}

TEST_CASE("gradient is zero when the target equals the output") {
    const NetworkParams net = init_network(LayerSpec{}, 5);
    Pattern p;
    p.input = {0.1, -0.2, 0.3, 1.0};
    p.target = forward(net, p.input);
    const ParamTensors g = batch_gradient(net, std::vector<Pattern>{p});
    for (const auto& layer : g.weights)
        for (double x : layer) CHECK(x == 0.0);
    for (const auto& layer : g.biases)
        for (double x : layer) CHECK(x == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        NetworkParams net = init_network(LayerSpec{}, rng());
        const std::vector<Pattern> patterns = random_patterns(rng, 10);
        const ParamTensors g = batch_gradient(net, patterns);

        const double h = 1e-5;
        const auto check_param = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = reference_loss(net, patterns);
            param = saved - h;
            const double down = reference_loss(net, patterns);
            param = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel = std::abs(fd - analytic) /
                               std::max({std::abs(fd), std::abs(analytic), 1e-5});
            CHECK(rel < 1e-6);
        };
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].size(); ++i)
                check_param(net.weights[l][i], g.weights[l][i]);
            for (std::size_t i = 0; i < net.biases[l].size(); ++i)
                check_param(net.biases[l][i], g.biases[l][i]);
        }
    }
}

TEST_CASE("batch_gradient is invariant under pattern duplication") {
    std::mt19937_64 rng(23);
    const NetworkParams net = init_network(LayerSpec{}, 9);
    std::vector<Pattern> patterns = random_patterns(rng, 8);
    const ParamTensors g1 = batch_gradient(net, patterns);
    std::vector<Pattern> doubled = patterns;
    doubled.insert(doubled.end(), patterns.begin(), patterns.end());
    const ParamTensors g2 = batch_gradient(net, doubled);
    for (std::size_t l = 0; l < g1.weights.size(); ++l)
        for (std::size_t i = 0; i < g1.weights[l].size(); ++i)
            CHECK(g2.weights[l][i] ==
                  doctest::Approx(g1.weights[l][i]).epsilon(1e-12));
}

TEST_CASE("batch_gradient rejects an empty pattern set") {
    const NetworkParams net = init_network(LayerSpec{}, 0);
    CHECK_THROWS_AS(batch_gradient(net, std::vector<Pattern>{}), InputError);
}

namespace {

// Minimal two-parameter net for driving rprop_apply with synthetic gradients.
NetworkParams tiny_net() {
    NetworkParams net;
    net.sizes = {1, 1};
    net.weights = {{0.0}};
    net.biases = {{0.0}};
    return net;
}

ParamTensors tiny_grad(const NetworkParams& net, double gw, double gb) {
    ParamTensors g = ParamTensors::zeros_like(net);
    g.weights[0][0] = gw;
    g.biases[0][0] = gb;
    return g;
}

} // namespace

TEST_CASE("rprop: zero gradient is a fixed point") {
    NetworkParams net = tiny_net();
    RpropState opt = make_rprop_state(net);
    rprop_apply(net, opt, tiny_grad(net, 0.0, 0.0));
    CHECK(net.weights[0][0] == 0.0);
    CHECK(opt.step.weights[0][0] == 0.1);
    CHECK(opt.prev_grad.weights[0][0] == 0.0);
}

TEST_CASE("rprop: same-sign gradients grow the step 0.1 -> 0.12 -> 0.144") {
    NetworkParams net = tiny_net();
    RpropState opt = make_rprop_state(net);
    rprop_apply(net, opt, tiny_grad(net, 1.0, 0.0)); // seeds the memory
    CHECK(opt.step.weights[0][0] == 0.1);
    rprop_apply(net, opt, tiny_grad(net, 0.5, 0.0));
    CHECK(opt.step.weights[0][0] == doctest::Approx(0.12).epsilon(1e-15));
    rprop_apply(net, opt, tiny_grad(net, 2.0, 0.0));
    CHECK(opt.step.weights[0][0] == doctest::Approx(0.144).epsilon(1e-15));
    // Step direction is -sign(grad) regardless of magnitude.
    CHECK(net.weights[0][0] == doctest::Approx(-0.364).epsilon(1e-12));
}

TEST_CASE("rprop: a sign flip halves the step and clears the memory") {
    NetworkParams net = tiny_net();
    RpropState opt = make_rprop_state(net);
    rprop_apply(net, opt, tiny_grad(net, 1.0, 0.0));
    rprop_apply(net, opt, tiny_grad(net, -1.0, 0.0));
    CHECK(opt.step.weights[0][0] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(opt.prev_grad.weights[0][0] == 0.0);
}

TEST_CASE("rprop: steps stay within [delta_min, delta_max]") {
    NetworkParams net = tiny_net();
    RpropState opt = make_rprop_state(net);
    for (int i = 0; i < 60; ++i)
        rprop_apply(net, opt, tiny_grad(net, 1.0, 1.0));
    CHECK(opt.step.weights[0][0] == opt.hp.delta_max);
    for (int i = 0; i < 120; ++i) {
        const double g = (i % 2 == 0) ? -1.0 : 1.0;
        rprop_apply(net, opt, tiny_grad(net, g, g));
        CHECK(opt.step.weights[0][0] >= opt.hp.delta_min);
        CHECK(opt.step.weights[0][0] <= opt.hp.delta_max);
    }
}

TEST_CASE("train rejects zero epochs and reduces loss on a regression set") {
    std::mt19937_64 rng(31);
    NetworkParams net = init_network(LayerSpec{}, 1);
    RpropState opt = make_rprop_state(net);
    const std::vector<Pattern> patterns = random_patterns(rng, 40);

    CHECK_THROWS_AS(train(net, opt, patterns, 0), ConfigError);

    const TrainReport report = train(net, opt, patterns, 300);
    CHECK(report.final_loss < report.initial_loss);
}

TEST_CASE("train is deterministic") {
    std::mt19937_64 rng(37);
    const std::vector<Pattern> patterns = random_patterns(rng, 20);
    auto [net1, opt1] = reset_network(LayerSpec{}, 4);
    auto [net2, opt2] = reset_network(LayerSpec{}, 4);
    train(net1, opt1, patterns, 50);
    train(net2, opt2, patterns, 50);
    CHECK(net1.weights == net2.weights);
    CHECK(net1.biases == net2.biases);
    CHECK(opt1.step.weights == opt2.step.weights);
}

TEST_CASE("reset reproduces init_network and a fresh optimizer") {
    const LayerSpec spec;
    auto [net, opt] = reset_network(spec, 77);
    const NetworkParams ref = init_network(spec, 77);
    CHECK(net.weights == ref.weights);
    CHECK(net.biases == ref.biases);
    for (const auto& layer : opt.step.weights)
        for (double d : layer) CHECK(d == 0.1);
    for (const auto& layer : opt.prev_grad.weights)
        for (double g : layer) CHECK(g == 0.0);
}
