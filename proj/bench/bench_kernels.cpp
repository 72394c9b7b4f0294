// Serial reference vs OpenMP kernels on training-shaped workloads: Bellman
// pattern batches for the gradient/loss, collected-log-sized sets for the
// nearest-neighbor scan.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nfq/kernels.hpp"

using namespace nfq;
using namespace nfq::kernels;

namespace {

std::vector<Pattern> make_patterns(int count) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> in(-1.0, 1.0);
    std::uniform_real_distribution<double> tgt(0.0, 1.0);
    std::vector<Pattern> out(count);
    for (Pattern& p : out) {
        for (double& x : p.input) x = in(rng);
        p.target = tgt(rng);
    }
    return out;
}

std::vector<Transition> make_set(int count) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pos(-0.7, 0.7);
    std::uniform_real_distribution<double> vel(-0.04, 0.04);
    std::uniform_real_distribution<double> volt(-1.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Transition> out(count);
    for (Transition& t : out) {
        t.s = {pos(rng), vel(rng), volt(rng)};
        t.a = coin(rng) == 0 ? Action::Left : Action::Right;
        t.s_next = {pos(rng), vel(rng), volt(rng)};
    }
    return out;
}

void bm_gradient_serial(benchmark::State& state) {
    const NetworkParams net = init_network(LayerSpec{}, 1);
    const auto patterns = make_patterns(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(batch_gradient_serial(net, patterns));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_gradient_parallel(benchmark::State& state) {
    const NetworkParams net = init_network(LayerSpec{}, 1);
    const auto patterns = make_patterns(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(batch_gradient_parallel(net, patterns));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_loss_serial(benchmark::State& state) {
    const NetworkParams net = init_network(LayerSpec{}, 1);
    const auto patterns = make_patterns(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(batch_loss_serial(net, patterns));
}

void bm_loss_parallel(benchmark::State& state) {
    const NetworkParams net = init_network(LayerSpec{}, 1);
    const auto patterns = make_patterns(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(batch_loss_parallel(net, patterns));
}

void bm_nn_serial(benchmark::State& state) {
    const auto set = make_set(static_cast<int>(state.range(0)));
    const DistanceWeights w;
    const State q{0.1, -0.01, 0.3};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            nearest_neighbor_serial(set, q, Action::Left, w, true));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_nn_parallel(benchmark::State& state) {
    const auto set = make_set(static_cast<int>(state.range(0)));
    const DistanceWeights w;
    const State q{0.1, -0.01, 0.3};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            nearest_neighbor_parallel(set, q, Action::Left, w, true));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(bm_gradient_serial)->Arg(1024)->Arg(16384)->Arg(90000);
BENCHMARK(bm_gradient_parallel)->Arg(1024)->Arg(16384)->Arg(90000);
BENCHMARK(bm_loss_serial)->Arg(16384)->Arg(90000);
BENCHMARK(bm_loss_parallel)->Arg(16384)->Arg(90000);
BENCHMARK(bm_nn_serial)->Arg(10000)->Arg(100000);
BENCHMARK(bm_nn_parallel)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
