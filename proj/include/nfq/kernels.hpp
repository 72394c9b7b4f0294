#pragma once

#include <cstddef>
#include <span>

#include "nfq/env.hpp"
#include "nfq/net.hpp"

namespace nfq::kernels {

// Data-parallel inner loops, each with a serial reference implementation and
// an OpenMP version. The OpenMP gradient accumulates fixed-size blocks and
// reduces them in index order, so the result does not depend on the thread
// count. The nearest-neighbor reduction uses exact (distance, index)
// comparisons and is likewise thread-count independent.

ParamTensors batch_gradient_serial(const NetworkParams& net,
                                   std::span<const Pattern> patterns);
ParamTensors batch_gradient_parallel(const NetworkParams& net,
                                     std::span<const Pattern> patterns);

double batch_loss_serial(const NetworkParams& net,
                         std::span<const Pattern> patterns);
double batch_loss_parallel(const NetworkParams& net,
                           std::span<const Pattern> patterns);

struct DistanceWeights {
    double position = 1.0 / (0.7 * 0.7);
    double velocity = 1.0 / (0.04 * 0.04);
    double voltage = 1.0;
};

inline constexpr std::size_t kNoNeighbor = static_cast<std::size_t>(-1);

// Index of the transition minimizing the weighted squared distance to the
// query, restricted to matching action when match_action is set. Ties break
// to the lowest index. Returns kNoNeighbor if no candidate exists.
std::size_t nearest_neighbor_serial(std::span<const Transition> set,
                                    const State& query, Action a,
                                    const DistanceWeights& w, bool match_action);
std::size_t nearest_neighbor_parallel(std::span<const Transition> set,
                                      const State& query, Action a,
                                      const DistanceWeights& w,
                                      bool match_action);

} // namespace nfq::kernels
