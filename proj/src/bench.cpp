#include "stabledist/bench.hpp"

#include "stabledist/circle_growing.hpp"
#include "stabledist/gale_shapley.hpp"
#include "stabledist/nnc.hpp"
#include "stabledist/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace stabledist {

std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::gs_centers: return "gs-centers";
        case Algorithm::gs_nodes: return "gs-nodes";
        case Algorithm::circle: return "circle";
        case Algorithm::nnc: return "nnc";
        case Algorithm::mutual: return "mutual";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    for (Algorithm a : {Algorithm::gs_centers, Algorithm::gs_nodes, Algorithm::circle, Algorithm::nnc,
                        Algorithm::mutual}) {
        if (algorithm_name(a) == name) return a;
    }
    return std::nullopt;
}

RunResult run_algorithm(const Instance& inst, Algorithm algorithm, const RunOptions& options) {
    RunResult result;
    switch (algorithm) {
        case Algorithm::gs_centers:
        case Algorithm::gs_nodes: {
            const auto prefs = build_preferences(inst, options.budget);
            GsStats stats;
            result.assignment = algorithm == Algorithm::gs_centers ? solve_gs_centers(inst, prefs, &stats)
                                                                   : solve_gs_nodes(inst, prefs, &stats);
            result.work = stats.proposals;
            break;
        }
        case Algorithm::circle: {
            CircleOptions opts;
            opts.budget = options.budget;
            opts.trace = options.trace;
            auto run = solve_circle_growing(inst, opts);
            result.work = work_counters(run).settled_total;
            result.assignment = std::move(run.assignment);
            break;
        }
        case Algorithm::nnc: {
            NncStats stats;
            NncOptions opts;
            opts.stats = &stats;
            const auto factory =
                options.oracle == OracleKind::truncated ? truncated_dijkstra_factory() : incremental_factory();
            result.assignment = solve_nnc(inst, factory, opts);
            result.work = stats.oracle_work;
            break;
        }
        case Algorithm::mutual: {
            MutualOptions opts;
            opts.budget = options.budget;
            result.assignment = solve_mutual_closest(inst, opts);
            result.work = static_cast<std::uint64_t>(inst.node_count()) * inst.center_count();
            break;
        }
    }
    return result;
}

std::vector<NodeId> sample_centers(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("sample_centers: k exceeds n");
    SplitMix64 rng(seed);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
    }
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return perm;
}

std::uint64_t center_set_seed(std::uint64_t base, std::size_t k, std::size_t index) noexcept {
    return SplitMix64(base ^ (static_cast<std::uint64_t>(k) << 32) ^ index).next();
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    if (!cfg.graph) throw std::invalid_argument("bench: no graph");
    const std::size_t n = cfg.graph->node_count();
    if (cfg.runs == 0) throw std::invalid_argument("bench: runs must be at least 1");
    if (cfg.algorithms.empty()) throw std::invalid_argument("bench: no algorithms selected");
    for (std::size_t k : cfg.ks) {
        if (k == 0 || k > n) throw std::invalid_argument("bench: k=" + std::to_string(k) + " outside 1..n");
    }
    if (cfg.ks.empty()) throw std::invalid_argument("bench: no k values");

    struct Task {
        std::size_t k;
        std::size_t index;
    };
    std::vector<Task> tasks;
    for (std::size_t k : cfg.ks) {
        for (std::size_t j = 0; j < cfg.runs; ++j) tasks.push_back({k, j});
    }
    const std::size_t per_task = cfg.algorithms.size();
    std::vector<BenchRecord> records(tasks.size() * per_task);
    const bool timed = cfg.jobs <= 1;

    auto run_task = [&](std::size_t t) {
        const auto [k, j] = tasks[t];
        const std::uint64_t seed = center_set_seed(cfg.seed, k, j);
        const Instance inst = Instance::with_equal_quotas(cfg.graph, sample_centers(n, k, seed));
        for (std::size_t a = 0; a < per_task; ++a) {
            BenchRecord& r = records[t * per_task + a];
            r.graph = cfg.graph_name;
            r.n = n;
            r.m = cfg.graph->edge_count();
            r.k = k;
            r.seed = seed;
            r.center_set = j;
            r.algorithm = cfg.algorithms[a];
            const auto start = std::chrono::steady_clock::now();
            try {
                const RunResult result = run_algorithm(inst, r.algorithm, cfg.run);
                const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
                if (timed) r.time_ms = elapsed.count();
                r.work = result.work;
                r.outcome = Outcome::ok;
                r.digest = assignment_digest(result.assignment);
            } catch (const MemoryRefusal&) {
                r.outcome = Outcome::refused_memory;
            }
        }
    };

    if (timed) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < cfg.jobs; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) run_task(t);
            });
        }
    }
    return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "graph,n,m,k,seed,center_set,algorithm,time_ms,work,outcome,digest\n";
    for (const BenchRecord& r : records) {
        out << r.graph << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.seed << ',' << r.center_set << ','
            << algorithm_name(r.algorithm) << ',';
        if (r.time_ms) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", *r.time_ms);
            out << buf;
        }
        out << ',' << r.work << ',' << (r.outcome == Outcome::ok ? "ok" : "refused-memory") << ',' << r.digest
            << '\n';
    }
}

}  // namespace stabledist
