#pragma once

#include "stabledist/graph.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabledist {

using CenterIndex = std::uint32_t;

// Instance violates a structural requirement (quota sum, connectivity, ...).
class InfeasibleInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A solver declined to run because its working set would exceed the budget.
class MemoryRefusal : public std::runtime_error {
public:
    MemoryRefusal(std::string algorithm, std::uint64_t needed, std::uint64_t cap);
    std::uint64_t needed_bytes() const noexcept { return needed_; }
    std::uint64_t cap_bytes() const noexcept { return cap_; }

private:
    std::uint64_t needed_;
    std::uint64_t cap_;
};

struct MemoryBudget {
    // One materialized (node, center) pair in the GS tables: its distance and
    // its slot in each side's preference list.
    static constexpr std::uint64_t kPairEntryBytes = sizeof(Length) + sizeof(NodeId) + sizeof(CenterIndex);
    static constexpr std::uint64_t kDefaultBytes = 2ULL << 30;

    std::uint64_t bytes = kDefaultBytes;

    static MemoryBudget pair_entries(std::uint64_t entries) { return {entries * kPairEntryBytes}; }
    static MemoryBudget unlimited() { return {~std::uint64_t{0}}; }

    // Throws MemoryRefusal when needed exceeds the budget.
    void require(const std::string& algorithm, std::uint64_t needed) const;
};

/**
 * Preference value of a (node, center) pair, shared by both sides.
 *
 * Ordered lexicographically on (dist, node, center). Distinct pairs never
 * compare equal, so every preference list is strict and the node's ranking
 * of centers agrees with each center's ranking of nodes.
 */
struct Score {
    Length dist = 0;
    NodeId node = 0;
    CenterIndex center = 0;

    friend bool operator==(const Score&, const Score&) = default;
};

std::strong_ordering score_cmp(const Score& a, const Score& b) noexcept;

inline std::strong_ordering operator<=>(const Score& a, const Score& b) noexcept { return score_cmp(a, b); }

/**
 * A graph, its centers (in index order) and per-center quotas.
 *
 * Construction validates: centers distinct and in range, quotas positive and
 * summing to node_count, graph connected. Throws InfeasibleInstance otherwise.
 */
class Instance {
public:
    Instance(std::shared_ptr<const RoadGraph> graph, std::vector<NodeId> centers, std::vector<std::size_t> quotas);

    static Instance with_equal_quotas(std::shared_ptr<const RoadGraph> graph, std::vector<NodeId> centers);

    const RoadGraph& graph() const noexcept { return *graph_; }
    const std::shared_ptr<const RoadGraph>& graph_ptr() const noexcept { return graph_; }
    std::size_t node_count() const noexcept { return graph_->node_count(); }
    std::size_t center_count() const noexcept { return centers_.size(); }
    NodeId center_node(CenterIndex c) const noexcept { return centers_[c]; }
    std::span<const NodeId> centers() const noexcept { return centers_; }
    std::size_t quota(CenterIndex c) const noexcept { return quotas_[c]; }
    std::span<const std::size_t> quotas() const noexcept { return quotas_; }

private:
    std::shared_ptr<const RoadGraph> graph_;
    std::vector<NodeId> centers_;
    std::vector<std::size_t> quotas_;
};

// Node -> center matching, with the shortest-path length to the assigned center.
struct Assignment {
    std::vector<CenterIndex> match;
    std::vector<Length> dist;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

// k quotas of floor(n/k) or ceil(n/k); the first n mod k centers get the larger one.
std::vector<std::size_t> equal_quotas(std::size_t n, std::size_t k);

// One Dijkstra row per center, in center-index order.
std::vector<DistRow> center_distances(const Instance& inst);

struct StabilityVerdict {
    enum class Kind { stable, quota_violation, blocking_pair };

    Kind kind = Kind::stable;
    // quota_violation
    CenterIndex center = 0;
    std::size_t expected = 0;
    std::size_t actual = 0;
    // blocking_pair: `center` and `node` prefer each other; `current` is the
    // node's own pair, `worst` the center's least preferred member.
    NodeId node = 0;
    Score pair{};
    Score current{};
    Score worst{};

    bool stable() const noexcept { return kind == Kind::stable; }
    std::string describe(const Instance& inst) const;
};

/**
 * Checks the quota invariant, then searches every (node, center) pair for a
 * blocking pair. Reports the blocking pair with the smallest Score.
 * Throws std::invalid_argument on a malformed assignment or distance table.
 */
StabilityVerdict verify_stable(const Instance& inst, const Assignment& a, std::span<const DistRow> dists);
StabilityVerdict verify_stable(const Instance& inst, const Assignment& a);

// 64-bit FNV-1a over the match array, as 16 lowercase hex digits.
std::string assignment_digest(const Assignment& a);

// TSV: header `node_original_id<TAB>center_original_id<TAB>distance`, one row per node.
void write_assignment_tsv(std::ostream& out, const Instance& inst, const Assignment& a);

struct AssignmentRow {
    std::int64_t node_original_id;
    std::int64_t center_original_id;
    Length dist;
};
std::vector<AssignmentRow> read_assignment_tsv(std::istream& in);

// Maps rows onto the instance. Throws ParseError when ids do not line up with
// the graph and its centers.
Assignment assignment_from_rows(const Instance& inst, std::span<const AssignmentRow> rows);

// Per-center member counts and max/mean assigned distance.
void write_summary_json(std::ostream& out, const Instance& inst, const Assignment& a, const std::string& algorithm);

}  // namespace stabledist
