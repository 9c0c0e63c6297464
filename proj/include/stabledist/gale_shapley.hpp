#pragma once

#include "stabledist/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stabledist {

/**
 * Fully materialized preference lists for the Gale-Shapley solvers.
 *
 * Row-major k x n tables: distance(c, u), the nodes in ascending Score order
 * for each center, and the centers in ascending Score order for each node.
 */
class PreferenceTables {
public:
    PreferenceTables(std::size_t node_count, std::size_t center_count);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t center_count() const noexcept { return k_; }

    Length distance(CenterIndex c, NodeId u) const noexcept { return dist_[c * n_ + u]; }
    Score score(NodeId u, CenterIndex c) const noexcept { return {distance(c, u), u, c}; }

    std::span<const NodeId> center_prefs(CenterIndex c) const noexcept { return {center_prefs_.data() + c * n_, n_}; }
    std::span<const CenterIndex> node_prefs(NodeId u) const noexcept { return {node_prefs_.data() + u * k_, k_}; }

    // Bytes held by the three tables for an n x k instance.
    static std::uint64_t estimate_bytes(std::size_t n, std::size_t k) noexcept;

private:
    friend PreferenceTables build_preferences(const Instance&, const MemoryBudget&, unsigned);

    std::size_t n_;
    std::size_t k_;
    std::vector<Length> dist_;
    std::vector<NodeId> center_prefs_;
    std::vector<CenterIndex> node_prefs_;
};

// Runs one Dijkstra per center (spread over `threads` workers) and sorts both
// sides' lists by Score. Throws MemoryRefusal before allocating when the
// tables would not fit the budget.
PreferenceTables build_preferences(const Instance& inst, const MemoryBudget& budget = {}, unsigned threads = 1);

struct GsStats {
    std::uint64_t proposals = 0;
};

// Centers propose down their lists while under quota; a node keeps the better offer.
Assignment solve_gs_centers(const Instance& inst, const PreferenceTables& prefs, GsStats* stats = nullptr);

// Nodes propose down their lists; a full center drops its worst member for a better proposer.
Assignment solve_gs_nodes(const Instance& inst, const PreferenceTables& prefs, GsStats* stats = nullptr);

}  // namespace stabledist
