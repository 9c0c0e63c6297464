#pragma once

#include "stabledist/model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

namespace stabledist {

struct CircleCounters {
    std::uint64_t settled_total = 0;
    std::uint64_t pushed_total = 0;
};

struct CircleOptions {
    bool instrument = true;
    MemoryBudget budget{};
    // Line-delimited `event<TAB>center<TAB>node<TAB>distance` records
    // (event is settle, match or halt; ids are original ids).
    std::ostream* trace = nullptr;
    // Called with the pair's Score each time a node is matched.
    std::function<void(const Score&)> on_match;
};

struct CircleRun {
    Assignment assignment;
    std::optional<CircleCounters> counters;
};

/**
 * Grows one Dijkstra search per center from a single merged queue ordered by
 * Score. The first active search to settle an unmatched node claims it; a
 * search stops as soon as its center's quota is filled. Searches keep growing
 * through nodes already claimed by other centers.
 *
 * Per-center settled sets are n-bit bitsets, so the run refuses (MemoryRefusal)
 * when k*n/8 bytes exceed the budget.
 */
CircleRun solve_circle_growing(const Instance& inst, const CircleOptions& options = {});

// Throws std::logic_error when the run was not instrumented.
CircleCounters work_counters(const CircleRun& run);

}  // namespace stabledist
