#pragma once

#include "stabledist/model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

namespace stabledist {

// Which side's agents an oracle keeps: unmatched nodes (queried by center
// index) or centers with remaining quota (queried by node id).
enum class Side { node, center };

struct NearestHit {
    std::uint32_t element;
    Length dist;
};

/**
 * Dynamic nearest-neighbor structure over one side of the matching.
 *
 * nearest(q) returns the active element minimizing the Score of the pair
 * (q, element), or nullopt when no element is active. Removed elements are
 * never returned again.
 */
class DnnOracle {
public:
    virtual ~DnnOracle() = default;

    virtual std::optional<NearestHit> nearest(std::uint32_t query) = 0;
    virtual void remove(std::uint32_t element) = 0;
    virtual bool active(std::uint32_t element) const = 0;
    // Graph nodes settled by all searches so far.
    virtual std::uint64_t work() const = 0;
};

using OracleFactory = std::function<std::unique_ptr<DnnOracle>(const Instance&, Side)>;

// Fresh Dijkstra per query, stopped at the first settled active element.
std::unique_ptr<DnnOracle> truncated_dijkstra_oracle(const Instance& inst, Side side);

// Center side: graph Voronoi labels of the active centers, repaired locally
// when a center is removed. Node side: one resumable search per center,
// since a center's nearest unmatched node only moves outward.
std::unique_ptr<DnnOracle> incremental_oracle(const Instance& inst, Side side);

OracleFactory truncated_dijkstra_factory();
OracleFactory incremental_factory();

struct NncStats {
    std::uint64_t stack_pushes = 0;
    std::uint64_t seeds = 0;
    std::uint64_t matches = 0;
    std::uint64_t queries = 0;
    std::uint64_t oracle_work = 0;
};

struct NncOptions {
    // After a match where the center sat below the node and still has quota,
    // leave the center on the stack instead of popping both.
    bool keep_center = true;
    // Node used for the very first seed; later seeds take the lowest-id unmatched node.
    std::optional<NodeId> first_seed;
    std::function<void(const Score&)> on_match;
    NncStats* stats = nullptr;
};

/**
 * Nearest-neighbor chain matching. Grows a stack in which each agent is the
 * nearest neighbor of the one below it; when the top's nearest neighbor is
 * already on the stack it is the entry just below, and the two are matched.
 *
 * Throws std::logic_error when an internal invariant fails: the oracle
 * returns an inactive element, a pushed link is not strictly closer than the
 * previous one, or the top's nearest neighbor is deeper in the stack.
 */
Assignment solve_nnc(const Instance& inst, const OracleFactory& factory = incremental_factory(),
                     const NncOptions& options = {});

struct MutualOptions {
    MemoryBudget budget{};
    // Called with each matched pair, in match order.
    std::function<void(const Score&)> on_match;
};

// Repeatedly matches the globally closest unmatched node / unfilled center
// pair over the full distance table. Reference solver for small instances.
Assignment solve_mutual_closest(const Instance& inst, const MutualOptions& options = {});

}  // namespace stabledist
