#include "dgcn/synth.hpp"

#include <map>

#include "dgcn/error.hpp"
#include "dgcn/rng.hpp"

namespace dgcn {

std::pair<DirectedGraph, NodeData> generate_directed_sbm(const SbmParams& params) {
    const int n = params.n;
    if (n < 4) throw ValidationError("SBM needs at least 4 nodes");
    const int half = n / 2;

    Rng rng(params.seed);
    std::map<std::pair<int, int>, double> edges;
    for (int u = 0; u < n; ++u) {
        const int bu = u < half ? 0 : 1;
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            const int bv = v < half ? 0 : 1;
            if (rng.bernoulli(bu == bv ? params.p_in : params.p_out))
                edges[{u, v}] = 1.0;
        }
    }
    for (int u = 0; u < n; ++u) edges[{u, (u + 1) % n}] = 1.0;

    std::vector<Edge> list;
    list.reserve(edges.size());
    for (const auto& [key, w] : edges) list.push_back({key.first, key.second, w});

    NodeData nd;
    nd.labels.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) nd.labels[static_cast<std::size_t>(u)] = u < half ? 0 : 1;
    nd.num_classes = 2;

    return {DirectedGraph::from_edges(n, std::move(list)), std::move(nd)};
}

} // namespace dgcn
