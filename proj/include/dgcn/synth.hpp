#ifndef DGCN_SYNTH_HPP_
#define DGCN_SYNTH_HPP_

#include <cstdint>
#include <utility>

#include "dgcn/graph.hpp"

namespace dgcn {

/// Two-block directed stochastic block model. Each ordered pair (u, v),
/// u != v, gets an edge with probability p_in (same block) or p_out, plus a
/// spanning cycle 0 -> 1 -> ... -> n-1 -> 0 so the graph is strongly
/// connected. Labels are block indices; no raw features.
struct SbmParams {
    int n = 200;
    double p_in = 0.1;
    double p_out = 0.01;
    std::uint64_t seed = 7;
};

std::pair<DirectedGraph, NodeData> generate_directed_sbm(const SbmParams& params);

} // namespace dgcn

#endif // DGCN_SYNTH_HPP_
