#pragma once

// Test-only oracles. Nothing here calls the library's shortest-path or
// matching code, so expected values computed with it are independent.

#include "stabledist/graph.hpp"
#include "stabledist/model.hpp"
#include "stabledist/random.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

namespace testing_support {

using namespace stabledist;

// All-pairs distances by Floyd-Warshall over the adjacency lists.
inline std::vector<std::vector<double>> floyd_warshall(const RoadGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
    for (NodeId u = 0; u < n; ++u) {
        d[u][u] = 0;
        for (const Arc& a : g.neighbors(u)) d[u][a.target] = std::min(d[u][a.target], a.weight);
    }
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][m] + d[m][j] < d[i][j]) d[i][j] = d[i][m] + d[m][j];
    return d;
}

struct PairKey {
    double dist;
    NodeId node;
    CenterIndex center;
    bool operator<(const PairKey& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (node != o.node) return node < o.node;
        return center < o.center;
    }
};

// Exhaustive blocking-pair search straight from the definition.
inline bool brute_force_stable(const Instance& inst, const std::vector<CenterIndex>& match,
                               const std::vector<std::vector<double>>& apsp) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    std::vector<std::size_t> count(k, 0);
    for (auto c : match) ++count[c];
    for (CenterIndex c = 0; c < k; ++c)
        if (count[c] != inst.quota(c)) return false;
    auto key = [&](NodeId u, CenterIndex c) { return PairKey{apsp[inst.center_node(c)][u], u, c}; };
    for (NodeId u = 0; u < n; ++u) {
        for (CenterIndex c = 0; c < k; ++c) {
            if (match[u] == c || !(key(u, c) < key(u, match[u]))) continue;
            for (NodeId v = 0; v < n; ++v) {
                if (match[v] == c && key(u, c) < key(v, c)) return false;
            }
        }
    }
    return true;
}

// Mutual-closest-pair simulation over Floyd-Warshall distances: repeatedly
// pick the globally smallest remaining pair by exhaustive search.
inline std::vector<CenterIndex> brute_force_matching(const Instance& inst,
                                                     const std::vector<std::vector<double>>& apsp) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    std::vector<CenterIndex> match(n, ~CenterIndex{0});
    std::vector<std::size_t> left(inst.quotas().begin(), inst.quotas().end());
    for (std::size_t step = 0; step < n; ++step) {
        bool found = false;
        PairKey best{};
        for (NodeId u = 0; u < n; ++u) {
            if (match[u] != ~CenterIndex{0}) continue;
            for (CenterIndex c = 0; c < k; ++c) {
                if (left[c] == 0) continue;
                const PairKey p{apsp[inst.center_node(c)][u], u, c};
                if (!found || p < best) {
                    best = p;
                    found = true;
                }
            }
        }
        match[best.node] = best.center;
        --left[best.center];
    }
    return match;
}

// Random connected graph: a random spanning tree plus extra edges, with small
// integer weights so that distance ties are common.
inline std::shared_ptr<const RoadGraph> random_graph(SplitMix64& rng, std::size_t n, std::size_t extra,
                                                     int max_weight) {
    GraphBuilder b;
    b.add_node(1);
    for (std::size_t v = 1; v < n; ++v) {
        const auto u = static_cast<std::int64_t>(rng.below(v)) + 1;
        b.add_edge(u, static_cast<std::int64_t>(v) + 1, static_cast<double>(1 + rng.below(max_weight)));
    }
    for (std::size_t e = 0; e < extra && n > 1; ++e) {
        const auto u = static_cast<std::int64_t>(rng.below(n)) + 1;
        const auto v = static_cast<std::int64_t>(rng.below(n)) + 1;
        if (u != v) b.add_edge(u, v, static_cast<double>(1 + rng.below(max_weight)));
    }
    return std::make_shared<const RoadGraph>(std::move(b).build());
}

// k random distinct centers with random positive quotas summing to n.
inline Instance random_instance(SplitMix64& rng, std::shared_ptr<const RoadGraph> g, std::size_t k,
                                bool equal) {
    const std::size_t n = g->node_count();
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
    perm.resize(k);
    std::vector<std::size_t> quotas(k, 1);
    if (equal) {
        quotas = equal_quotas(n, k);
    } else {
        for (std::size_t r = k; r < n; ++r) ++quotas[rng.below(k)];
    }
    return Instance(std::move(g), std::move(perm), std::move(quotas));
}

inline std::shared_ptr<const RoadGraph> shared(RoadGraph g) { return std::make_shared<const RoadGraph>(std::move(g)); }

}  // namespace testing_support
