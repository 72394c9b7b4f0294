#include "nfq/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nfq::kernels {

namespace {

constexpr std::size_t kBlock = 1024;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Forward pass storing activations in ws; returns the scalar output.
inline double forward_ws(const NetworkParams& net, const double* input,
                         NetWorkspace& ws) {
    const auto n0 = static_cast<std::size_t>(net.sizes[0]);
    for (std::size_t i = 0; i < n0; ++i) ws.act[0][i] = input[i];
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

// Accumulates d/dtheta of (forward(input) - target)^2 into sum (no 1/D
// scaling here).
inline void accumulate_pattern(const NetworkParams& net, const Pattern& p,
                               NetWorkspace& ws, ParamTensors& sum) {
    const double y = forward_ws(net, p.input.data(), ws);
    const std::size_t layers = net.layer_count();
    ws.delta[layers][0] = 2.0 * (y - p.target) * y * (1.0 - y);
    for (std::size_t l = layers; l-- > 0;) {
        const auto in = static_cast<std::size_t>(net.sizes[l]);
        const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
        const double* d = ws.delta[l + 1].data();
        const double* a = ws.act[l].data();
        double* gw = sum.weights[l].data();
        double* gb = sum.biases[l].data();
        for (std::size_t j = 0; j < out; ++j) {
            gb[j] += d[j];
            double* row = gw + j * in;
            for (std::size_t i = 0; i < in; ++i) row[i] += d[j] * a[i];
        }
        if (l == 0) break;
        const double* w = net.weights[l].data();
        double* dprev = ws.delta[l].data();
        for (std::size_t i = 0; i < in; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < out; ++j) acc += w[j * in + i] * d[j];
            dprev[i] = acc * a[i] * (1.0 - a[i]);
        }
    }
}

// Fixed-shape fast path for the default 4-5-5-1 network. Same arithmetic in
// the same order as accumulate_pattern, but with constant loop bounds and
// stack activations so the compiler can unroll the whole pattern.
inline void accumulate_pattern_4551(const NetworkParams& net, const Pattern& p,
                                    ParamTensors& sum) {
    const double* w0 = net.weights[0].data();
    const double* w1 = net.weights[1].data();
    const double* w2 = net.weights[2].data();
    const double* a0 = p.input.data();
    double a1[5], a2[5];
    for (std::size_t j = 0; j < 5; ++j) {
        double z = net.biases[0][j];
        const double* row = w0 + j * 4;
        for (std::size_t i = 0; i < 4; ++i) z += row[i] * a0[i];
        a1[j] = sigmoid(z);
    }
    for (std::size_t j = 0; j < 5; ++j) {
        double z = net.biases[1][j];
        const double* row = w1 + j * 5;
        for (std::size_t i = 0; i < 5; ++i) z += row[i] * a1[i];
        a2[j] = sigmoid(z);
    }
    double z = net.biases[2][0];
    for (std::size_t i = 0; i < 5; ++i) z += w2[i] * a2[i];
    const double y = sigmoid(z);

    const double d3 = 2.0 * (y - p.target) * y * (1.0 - y);
    double* gw2 = sum.weights[2].data();
    sum.biases[2][0] += d3;
    for (std::size_t i = 0; i < 5; ++i) gw2[i] += d3 * a2[i];

    double d2[5];
    for (std::size_t i = 0; i < 5; ++i)
        d2[i] = w2[i] * d3 * a2[i] * (1.0 - a2[i]);
    double* gw1 = sum.weights[1].data();
    double* gb1 = sum.biases[1].data();
    for (std::size_t j = 0; j < 5; ++j) {
        gb1[j] += d2[j];
        double* row = gw1 + j * 5;
        for (std::size_t i = 0; i < 5; ++i) row[i] += d2[j] * a1[i];
    }

    double d1[5];
    for (std::size_t i = 0; i < 5; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 5; ++j) acc += w1[j * 5 + i] * d2[j];
        d1[i] = acc * a1[i] * (1.0 - a1[i]);
    }
    double* gw0 = sum.weights[0].data();
    double* gb0 = sum.biases[0].data();
    for (std::size_t j = 0; j < 5; ++j) {
        gb0[j] += d1[j];
        double* row = gw0 + j * 4;
        for (std::size_t i = 0; i < 4; ++i) row[i] += d1[j] * a0[i];
    }
}

inline bool is_4551(const NetworkParams& net) {
    return net.sizes.size() == 4 && net.sizes[0] == 4 && net.sizes[1] == 5 &&
           net.sizes[2] == 5 && net.sizes[3] == 1;
}

inline void add_into(ParamTensors& dst, const ParamTensors& src) {
    for (std::size_t l = 0; l < dst.weights.size(); ++l) {
        for (std::size_t i = 0; i < dst.weights[l].size(); ++i)
            dst.weights[l][i] += src.weights[l][i];
        for (std::size_t i = 0; i < dst.biases[l].size(); ++i)
            dst.biases[l][i] += src.biases[l][i];
    }
}

inline void scale(ParamTensors& t, double factor) {
    for (auto& v : t.weights)
        for (double& x : v) x *= factor;
    for (auto& v : t.biases)
        for (double& x : v) x *= factor;
}

} // namespace

ParamTensors batch_gradient_serial(const NetworkParams& net,
                                   std::span<const Pattern> patterns) {
    ParamTensors sum = ParamTensors::zeros_like(net);
    if (is_4551(net)) {
        for (const Pattern& p : patterns) accumulate_pattern_4551(net, p, sum);
    } else {
        NetWorkspace ws;
        ws.resize_for(net);
        for (const Pattern& p : patterns) accumulate_pattern(net, p, ws, sum);
    }
    scale(sum, 1.0 / static_cast<double>(patterns.size()));
    return sum;
}

ParamTensors batch_gradient_parallel(const NetworkParams& net,
                                     std::span<const Pattern> patterns) {
    const std::size_t n = patterns.size();
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<ParamTensors> partial(nblocks);

    const bool fast = is_4551(net);

#pragma omp parallel
    {
        NetWorkspace ws;
        ws.resize_for(net);
#pragma omp for schedule(dynamic)
        for (long b = 0; b < static_cast<long>(nblocks); ++b) {
            ParamTensors sum = ParamTensors::zeros_like(net);
            const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
            const std::size_t end = std::min(begin + kBlock, n);
            if (fast) {
                for (std::size_t i = begin; i < end; ++i)
                    accumulate_pattern_4551(net, patterns[i], sum);
            } else {
                for (std::size_t i = begin; i < end; ++i)
                    accumulate_pattern(net, patterns[i], ws, sum);
            }
            partial[static_cast<std::size_t>(b)] = std::move(sum);
        }
    }

    // Sequential reduction in block order keeps the result independent of
    // the thread count.
    ParamTensors total = ParamTensors::zeros_like(net);
    for (const ParamTensors& p : partial) add_into(total, p);
    scale(total, 1.0 / static_cast<double>(n));
    return total;
}

double batch_loss_serial(const NetworkParams& net,
                         std::span<const Pattern> patterns) {
    NetWorkspace ws;
    ws.resize_for(net);
    double sum = 0.0;
    for (const Pattern& p : patterns) {
        const double r = forward_ws(net, p.input.data(), ws) - p.target;
        sum += r * r;
    }
    return sum / static_cast<double>(patterns.size());
}

double batch_loss_parallel(const NetworkParams& net,
                           std::span<const Pattern> patterns) {
    const std::size_t n = patterns.size();
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);

#pragma omp parallel
    {
        NetWorkspace ws;
        ws.resize_for(net);
#pragma omp for schedule(dynamic)
        for (long b = 0; b < static_cast<long>(nblocks); ++b) {
            double sum = 0.0;
            const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
            const std::size_t end = std::min(begin + kBlock, n);
            for (std::size_t i = begin; i < end; ++i) {
                const double r =
                    forward_ws(net, patterns[i].input.data(), ws) -
                    patterns[i].target;
                sum += r * r;
            }
            partial[static_cast<std::size_t>(b)] = sum;
        }
    }

    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(n);
}

namespace {

inline double sq_distance(const Transition& t, const State& q,
                          const DistanceWeights& w) {
    const double dp = q.position - t.s.position;
    const double dv = q.velocity - t.s.velocity;
    const double du = q.voltage - t.s.voltage;
    return w.position * dp * dp + w.velocity * dv * dv + w.voltage * du * du;
}

} // namespace

std::size_t nearest_neighbor_serial(std::span<const Transition> set,
                                    const State& query, Action a,
                                    const DistanceWeights& w,
                                    bool match_action) {
    std::size_t best = kNoNeighbor;
    double best_d = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (match_action && set[i].a != a) continue;
        const double d = sq_distance(set[i], query, w);
        if (best == kNoNeighbor || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

std::size_t nearest_neighbor_parallel(std::span<const Transition> set,
                                      const State& query, Action a,
                                      const DistanceWeights& w,
                                      bool match_action) {
    std::size_t best = kNoNeighbor;
    double best_d = 0.0;

#pragma omp parallel
    {
        std::size_t local = kNoNeighbor;
        double local_d = 0.0;
#pragma omp for nowait
        for (long i = 0; i < static_cast<long>(set.size()); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            if (match_action && set[idx].a != a) continue;
            const double d = sq_distance(set[idx], query, w);
            if (local == kNoNeighbor || d < local_d ||
                (d == local_d && idx < local)) {
                local = idx;
                local_d = d;
            }
        }
#pragma omp critical
        {
            if (local != kNoNeighbor &&
                (best == kNoNeighbor || local_d < best_d ||
                 (local_d == best_d && local < best))) {
                best = local;
                best_d = local_d;
            }
        }
    }
    return best;
}

} // namespace nfq::kernels
