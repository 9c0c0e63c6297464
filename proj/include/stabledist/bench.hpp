#pragma once

#include "stabledist/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stabledist {

enum class Algorithm { gs_centers, gs_nodes, circle, nnc, mutual };

std::string_view algorithm_name(Algorithm a) noexcept;
// Accepts gs-centers, gs-nodes, circle, nnc, mutual.
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

enum class OracleKind { incremental, truncated };

struct RunOptions {
    MemoryBudget budget{};
    OracleKind oracle = OracleKind::incremental;
    std::ostream* trace = nullptr;  // circle-growing only
};

struct RunResult {
    Assignment assignment;
    // Proposals (GS), settled nodes (circle), oracle settles (nnc), pairs scanned (mutual).
    std::uint64_t work = 0;
};

// Dispatches to one solver. GS runs include building the preference tables.
// Throws MemoryRefusal when the solver's working set exceeds the budget.
RunResult run_algorithm(const Instance& inst, Algorithm algorithm, const RunOptions& options = {});

// k distinct nodes from 0..n-1 by partial Fisher-Yates over splitmix64
// bounded draws, returned in ascending order.
std::vector<NodeId> sample_centers(std::size_t n, std::size_t k, std::uint64_t seed);

// Seed of center set `index` for a given k: first splitmix64 output from
// state base ^ (k << 32) ^ index.
std::uint64_t center_set_seed(std::uint64_t base, std::size_t k, std::size_t index) noexcept;

struct BenchConfig {
    std::string graph_name;
    std::shared_ptr<const RoadGraph> graph;
    std::vector<std::size_t> ks;
    std::size_t runs = 10;
    std::uint64_t seed = 1;
    std::vector<Algorithm> algorithms;
    RunOptions run{};
    // Above 1, center sets run concurrently and time_ms is left blank.
    unsigned jobs = 1;
};

enum class Outcome { ok, refused_memory };

struct BenchRecord {
    std::string graph;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;  // center_set_seed for this record
    std::size_t center_set = 0;
    Algorithm algorithm{};
    std::optional<double> time_ms;
    std::uint64_t work = 0;
    Outcome outcome = Outcome::ok;
    std::string digest;  // empty unless ok
};

// Every algorithm runs on the same center sets. Memory refusals become
// records; an invalid config throws std::invalid_argument.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

// Header: graph,n,m,k,seed,center_set,algorithm,time_ms,work,outcome,digest
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

}  // namespace stabledist
