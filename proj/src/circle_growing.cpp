#include "stabledist/circle_growing.hpp"

#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace stabledist {

namespace {

constexpr CenterIndex kUnmatched = ~CenterIndex{0};

class SettledSets {
public:
    SettledSets(std::size_t n, std::size_t k) : words_((n + 63) / 64), bits_(words_ * k, 0) {}

    bool test(CenterIndex c, NodeId u) const noexcept {
        return (bits_[c * words_ + u / 64] >> (u % 64)) & 1u;
    }
    void set(CenterIndex c, NodeId u) noexcept { bits_[c * words_ + u / 64] |= std::uint64_t{1} << (u % 64); }

private:
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace

CircleRun solve_circle_growing(const Instance& inst, const CircleOptions& options) {
    const auto& g = inst.graph();
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    options.budget.require("circle-growing settled sets", (static_cast<std::uint64_t>(n) * k + 7) / 8);

    SettledSets settled(n, k);
    std::vector<std::size_t> remaining(inst.quotas().begin(), inst.quotas().end());
    std::vector<bool> halted(k, false);
    CircleRun run{{std::vector<CenterIndex>(n, kUnmatched), std::vector<Length>(n, 0)}, std::nullopt};
    auto& match = run.assignment.match;
    CircleCounters counters;

    auto trace = [&](const char* event, CenterIndex c, NodeId u, Length d) {
        if (!options.trace) return;
        *options.trace << event << '\t' << g.original_id(inst.center_node(c)) << '\t' << g.original_id(u) << '\t'
                       << format_length(d) << '\n';
    };

    std::priority_queue<Score, std::vector<Score>, std::greater<>> queue;
    for (CenterIndex c = 0; c < k; ++c) {
        queue.push({0, inst.center_node(c), c});
        ++counters.pushed_total;
    }

    std::size_t matched = 0;
    Score last{};
    bool popped_any = false;
    while (matched < n) {
        if (queue.empty()) throw std::logic_error("circle-growing: queue drained before all nodes matched");
        const Score top = queue.top();
        queue.pop();
        const auto [d, u, c] = top;
        if (halted[c] || settled.test(c, u)) continue;
        if (popped_any && top < last) throw std::logic_error("circle-growing: pop order not monotone");
        last = top;
        popped_any = true;

        settled.set(c, u);
        ++counters.settled_total;
        trace("settle", c, u, d);

        if (match[u] == kUnmatched) {
            match[u] = c;
            run.assignment.dist[u] = d;
            ++matched;
            trace("match", c, u, d);
            if (options.on_match) options.on_match(top);
            if (--remaining[c] == 0) {
                halted[c] = true;
                trace("halt", c, u, d);
                continue;
            }
        }
        for (const Arc& a : g.neighbors(u)) {
            if (!settled.test(c, a.target)) {
                queue.push({d + a.weight, a.target, c});
                ++counters.pushed_total;
            }
        }
    }
    if (options.instrument) run.counters = counters;
    return run;
}

CircleCounters work_counters(const CircleRun& run) {
    if (!run.counters) throw std::logic_error("work_counters: run was not instrumented");
    return *run.counters;
}

}  // namespace stabledist
