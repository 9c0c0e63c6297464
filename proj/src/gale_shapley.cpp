#include "stabledist/gale_shapley.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

namespace stabledist {

namespace {

constexpr CenterIndex kUnmatched = ~CenterIndex{0};

void check_tables(const Instance& inst, const PreferenceTables& prefs) {
    if (prefs.node_count() != inst.node_count() || prefs.center_count() != inst.center_count()) {
        throw std::invalid_argument("preference tables do not match the instance");
    }
}

Assignment collect(const PreferenceTables& prefs, const std::vector<CenterIndex>& match) {
    Assignment a{match, std::vector<Length>(match.size())};
    for (NodeId u = 0; u < match.size(); ++u) a.dist[u] = prefs.distance(match[u], u);
    return a;
}

}  // namespace

PreferenceTables::PreferenceTables(std::size_t node_count, std::size_t center_count)
    : n_(node_count), k_(center_count) {}

std::uint64_t PreferenceTables::estimate_bytes(std::size_t n, std::size_t k) noexcept {
    return static_cast<std::uint64_t>(n) * k * MemoryBudget::kPairEntryBytes;
}

PreferenceTables build_preferences(const Instance& inst, const MemoryBudget& budget, unsigned threads) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    budget.require("gale-shapley preference tables", PreferenceTables::estimate_bytes(n, k));

    PreferenceTables t(n, k);
    t.dist_.resize(n * k);
    t.center_prefs_.resize(n * k);
    t.node_prefs_.resize(n * k);

    auto fill_centers = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const DistRow row = dijkstra(inst.graph(), inst.center_node(static_cast<CenterIndex>(c)));
            std::copy(row.dist.begin(), row.dist.end(), t.dist_.begin() + static_cast<std::ptrdiff_t>(c * n));
            auto prefs = t.center_prefs_.begin() + static_cast<std::ptrdiff_t>(c * n);
            std::iota(prefs, prefs + static_cast<std::ptrdiff_t>(n), NodeId{0});
            // Same center on both sides, so (dist, node) decides the Score order.
            std::sort(prefs, prefs + static_cast<std::ptrdiff_t>(n), [&](NodeId a, NodeId b) {
                return row.dist[a] < row.dist[b] || (row.dist[a] == row.dist[b] && a < b);
            });
        }
    };
    auto fill_nodes = [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            auto prefs = t.node_prefs_.begin() + static_cast<std::ptrdiff_t>(u * k);
            std::iota(prefs, prefs + static_cast<std::ptrdiff_t>(k), CenterIndex{0});
            std::sort(prefs, prefs + static_cast<std::ptrdiff_t>(k), [&](CenterIndex a, CenterIndex b) {
                const Length da = t.dist_[a * n + u];
                const Length db = t.dist_[b * n + u];
                return da < db || (da == db && a < b);
            });
        }
    };
    auto parallel = [&](std::size_t count, auto&& body) {
        const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
        if (workers == 1) {
            body(0, count);
            return;
        }
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] { body(count * w / workers, count * (w + 1) / workers); });
        }
    };
    parallel(k, fill_centers);
    parallel(n, fill_nodes);
    return t;
}

Assignment solve_gs_centers(const Instance& inst, const PreferenceTables& prefs, GsStats* stats) {
    check_tables(inst, prefs);
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();

    std::vector<CenterIndex> match(n, kUnmatched);
    std::vector<std::size_t> next(k, 0);
    std::vector<std::size_t> held(k, 0);
    std::vector<bool> queued(k, true);
    std::queue<CenterIndex> free_centers;
    for (CenterIndex c = 0; c < k; ++c) free_centers.push(c);
    std::uint64_t proposals = 0;

    while (!free_centers.empty()) {
        const CenterIndex c = free_centers.front();
        free_centers.pop();
        queued[c] = false;
        const auto list = prefs.center_prefs(c);
        while (held[c] < inst.quota(c)) {
            if (next[c] == n) throw std::logic_error("gs-centers: center exhausted its preference list");
            const NodeId u = list[next[c]++];
            ++proposals;
            const CenterIndex current = match[u];
            if (current == kUnmatched) {
                match[u] = c;
                ++held[c];
            } else if (prefs.score(u, c) < prefs.score(u, current)) {
                match[u] = c;
                ++held[c];
                --held[current];
                if (!queued[current]) {
                    queued[current] = true;
                    free_centers.push(current);
                }
            }
        }
    }
    if (stats) stats->proposals = proposals;
    return collect(prefs, match);
}

Assignment solve_gs_nodes(const Instance& inst, const PreferenceTables& prefs, GsStats* stats) {
    check_tables(inst, prefs);
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();

    std::vector<CenterIndex> match(n, kUnmatched);
    std::vector<std::size_t> next(n, 0);
    // Max-heap per center: top is the least preferred current member.
    std::vector<std::priority_queue<Score>> members(k);
    std::vector<NodeId> free_nodes(n);
    std::iota(free_nodes.rbegin(), free_nodes.rend(), NodeId{0});
    std::uint64_t proposals = 0;

    while (!free_nodes.empty()) {
        const NodeId u = free_nodes.back();
        free_nodes.pop_back();
        if (next[u] == k) throw std::logic_error("gs-nodes: node exhausted its preference list");
        const CenterIndex c = prefs.node_prefs(u)[next[u]++];
        ++proposals;
        const Score s = prefs.score(u, c);
        auto& heap = members[c];
        if (heap.size() < inst.quota(c)) {
            heap.push(s);
            match[u] = c;
        } else if (s < heap.top()) {
            const NodeId bumped = heap.top().node;
            heap.pop();
            match[bumped] = kUnmatched;
            free_nodes.push_back(bumped);
            heap.push(s);
            match[u] = c;
        } else {
            free_nodes.push_back(u);
        }
    }
    if (stats) stats->proposals = proposals;
    return collect(prefs, match);
}

}  // namespace stabledist
