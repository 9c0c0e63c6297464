#include "stabledist/nnc.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace stabledist {

namespace {

constexpr CenterIndex kUnmatched = ~CenterIndex{0};

struct Agent {
    Side side;
    std::uint32_t id;
    friend bool operator==(const Agent&, const Agent&) = default;
};

struct ChainEntry {
    Agent agent;
    // Score of the link to the entry below; unused for the bottom entry.
    Score link;
};

}  // namespace

Assignment solve_nnc(const Instance& inst, const OracleFactory& factory, const NncOptions& options) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    auto nodes = factory(inst, Side::node);
    auto centers = factory(inst, Side::center);

    Assignment result{std::vector<CenterIndex>(n, kUnmatched), std::vector<Length>(n, 0)};
    std::vector<std::size_t> remaining(inst.quotas().begin(), inst.quotas().end());
    std::vector<bool> node_on_stack(n, false);
    std::vector<bool> center_on_stack(k, false);
    auto on_stack = [&](const Agent& a) -> std::vector<bool>::reference {
        return a.side == Side::node ? node_on_stack[a.id] : center_on_stack[a.id];
    };

    std::vector<ChainEntry> stack;
    NncStats stats;
    std::size_t matched = 0;
    NodeId seed_cursor = 0;
    constexpr NodeId kNoSeed = std::numeric_limits<NodeId>::max();
    NodeId first_seed = options.first_seed.value_or(kNoSeed);
    if (options.first_seed && first_seed >= n) throw std::out_of_range("solve_nnc: seed node out of range");

    auto push = [&](Agent a, Score link) {
        on_stack(a) = true;
        stack.push_back({a, link});
        ++stats.stack_pushes;
    };
    auto pop = [&] {
        on_stack(stack.back().agent) = false;
        stack.pop_back();
    };

    while (matched < n) {
        if (stack.empty()) {
            NodeId seed;
            if (first_seed != kNoSeed) {
                seed = first_seed;
                first_seed = kNoSeed;
            } else {
                while (result.match[seed_cursor] != kUnmatched) ++seed_cursor;
                seed = seed_cursor;
            }
            push({Side::node, seed}, Score{});
            ++stats.seeds;
        }

        const Agent top = stack.back().agent;
        DnnOracle& oracle = top.side == Side::node ? *centers : *nodes;
        const auto hit = oracle.nearest(top.id);
        ++stats.queries;
        if (!hit) throw std::logic_error("solve_nnc: no active neighbor for the top of the chain");
        if (!oracle.active(hit->element)) throw std::logic_error("solve_nnc: oracle returned an inactive element");

        const Agent next{top.side == Side::node ? Side::center : Side::node, hit->element};
        const NodeId u = top.side == Side::node ? top.id : next.id;
        const CenterIndex c = top.side == Side::node ? next.id : top.id;
        const Score link{hit->dist, u, c};

        if (!on_stack(next)) {
            if (stack.size() > 1 && !(link < stack.back().link)) {
                throw std::logic_error("solve_nnc: chain link did not strictly decrease");
            }
            push(next, link);
            continue;
        }

        if (stack.size() < 2 || !(stack[stack.size() - 2].agent == next)) {
            throw std::logic_error("solve_nnc: nearest neighbor on the stack is not second from top");
        }
        result.match[u] = c;
        result.dist[u] = link.dist;
        ++matched;
        ++stats.matches;
        if (options.on_match) options.on_match(link);
        nodes->remove(u);
        if (--remaining[c] == 0) centers->remove(c);

        pop();
        const bool keep = options.keep_center && top.side == Side::node && remaining[c] > 0;
        if (!keep) pop();
    }

    stats.oracle_work = nodes->work() + centers->work();
    if (options.stats) *options.stats = stats;
    return result;
}

Assignment solve_mutual_closest(const Instance& inst, const MutualOptions& options) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    options.budget.require("mutual-closest pair table", static_cast<std::uint64_t>(n) * k * sizeof(Score));

    // Scanning every pair in ascending Score order and taking the first one
    // whose node is unmatched and whose center has quota left yields the
    // global minimum over the remaining pairs at every step.
    std::vector<Score> pairs;
    pairs.reserve(n * k);
    for (CenterIndex c = 0; c < k; ++c) {
        const DistRow row = dijkstra(inst.graph(), inst.center_node(c));
        for (NodeId u = 0; u < n; ++u) pairs.push_back({row.dist[u], u, c});
    }
    std::sort(pairs.begin(), pairs.end());

    Assignment result{std::vector<CenterIndex>(n, kUnmatched), std::vector<Length>(n, 0)};
    std::vector<std::size_t> remaining(inst.quotas().begin(), inst.quotas().end());
    std::size_t matched = 0;
    for (const Score& s : pairs) {
        if (matched == n) break;
        if (result.match[s.node] != kUnmatched || remaining[s.center] == 0) continue;
        result.match[s.node] = s.center;
        result.dist[s.node] = s.dist;
        --remaining[s.center];
        ++matched;
        if (options.on_match) options.on_match(s);
    }
    return result;
}

}  // namespace stabledist
