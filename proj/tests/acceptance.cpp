// Acceptance checks. Run with criterion numbers as arguments (default: all);
// prints one PASS/FAIL line per criterion and exits nonzero if any failed.

#include "stabledist/bench.hpp"
#include "stabledist/circle_growing.hpp"
#include "stabledist/cli.hpp"
#include "stabledist/gale_shapley.hpp"
#include "stabledist/nnc.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace stabledist;
using testing_support::shared;

namespace {

// Pinned thresholds.
constexpr int kEquivalenceInstances = 200;
constexpr int kPerturbationsPerInstance = 10;
constexpr double kMinBlockingRate = 1.0;  // every swap across districts changes the unique solution
constexpr std::size_t kSweepSide = 100;
constexpr std::size_t kSweepRuns = 5;
constexpr double kMinGsGrowth = 10.0;
constexpr double kMaxNncSpread = 2.5;
constexpr std::size_t kCircleRuns = 10;
constexpr double kMaxSpearman = 0.0;
constexpr double kMinPathSettledFactor = 1.8;
constexpr std::size_t kCapPairEntries = 1000000;
constexpr int kOracleInstances = 1000;

struct Verdict {
    bool pass;
    std::string detail;
};

std::vector<std::size_t> sweep_ks() {
    std::vector<std::size_t> ks;
    for (std::size_t k = 2; k <= 512; k *= 2) ks.push_back(k);
    return ks;
}

std::shared_ptr<const RoadGraph> sweep_graph() {
    static const auto g = shared(make_grid_graph(kSweepSide, kSweepSide, 1));
    return g;
}

// Mean time_ms per k for one algorithm over the sweep.
std::map<std::size_t, double> mean_times(Algorithm algo, OracleKind oracle = OracleKind::incremental) {
    BenchConfig cfg;
    cfg.graph_name = "grid100";
    cfg.graph = sweep_graph();
    cfg.ks = sweep_ks();
    cfg.runs = kSweepRuns;
    cfg.algorithms = {algo};
    cfg.run.budget = MemoryBudget::unlimited();
    cfg.run.oracle = oracle;
    std::map<std::size_t, double> sum;
    for (const auto& r : run_bench(cfg)) sum[r.k] += *r.time_ms;
    for (auto& [k, t] : sum) t /= kSweepRuns;
    return sum;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

std::string table(const std::map<std::size_t, double>& m) {
    std::string s;
    for (const auto& [k, v] : m) s += (s.empty() ? "" : " ") + std::to_string(k) + ":" + fmt(v);
    return s;
}

std::vector<CenterIndex> run(const Instance& inst, Algorithm a) { return run_algorithm(inst, a).assignment.match; }

const std::vector<Algorithm> kAllAlgorithms{Algorithm::gs_centers, Algorithm::gs_nodes, Algorithm::circle,
                                            Algorithm::nnc, Algorithm::mutual};

// Criteria 1 and 2 share the instance generator.
template <class Fn>
void for_each_random_grid_instance(Fn&& fn) {
    SplitMix64 rng(20190301);
    const std::size_t k_choices[] = {1, 2, 5, 17, 0};
    for (int i = 0; i < kEquivalenceInstances; ++i) {
        const std::size_t w = 2 + rng.below(49);
        const std::size_t h = 2 + rng.below(49);
        const auto g = shared(make_grid_graph(w, h, rng.next()));
        const std::size_t n = g->node_count();
        std::size_t k = k_choices[i % 5];
        if (k == 0) k = std::max<std::size_t>(1, n / 4);
        k = std::min(k, n);
        const Instance inst = testing_support::random_instance(rng, g, k, (i / 5) % 2 == 0);
        fn(inst, rng);
    }
}

Verdict criterion_1() {
    int agree = 0;
    std::string first_bad;
    for_each_random_grid_instance([&](const Instance& inst, SplitMix64&) {
        const auto ref = run(inst, Algorithm::mutual);
        bool same = true;
        for (Algorithm a : kAllAlgorithms) same = same && run(inst, a) == ref;
        same = same && solve_nnc(inst, truncated_dijkstra_factory()).match == ref;
        if (same) {
            ++agree;
        } else if (first_bad.empty()) {
            first_bad = " first mismatch at n=" + std::to_string(inst.node_count()) +
                        " k=" + std::to_string(inst.center_count());
        }
    });
    return {agree == kEquivalenceInstances,
            std::to_string(agree) + "/" + std::to_string(kEquivalenceInstances) + " instances identical" + first_bad};
}

Verdict criterion_2() {
    std::size_t outputs = 0, stable = 0, swaps = 0, blocked = 0;
    for_each_random_grid_instance([&](const Instance& inst, SplitMix64& rng) {
        Assignment base;
        for (Algorithm a : kAllAlgorithms) {
            base = run_algorithm(inst, a).assignment;
            ++outputs;
            stable += verify_stable(inst, base).stable();
        }
        if (inst.center_count() == 1) return;
        const auto rows = center_distances(inst);
        const std::size_t n = inst.node_count();
        for (int p = 0; p < kPerturbationsPerInstance; ++p) {
            NodeId u = 0, v = 0;
            do {
                u = static_cast<NodeId>(rng.below(n));
                v = static_cast<NodeId>(rng.below(n));
            } while (base.match[u] == base.match[v]);
            Assignment a = base;
            std::swap(a.match[u], a.match[v]);
            a.dist[u] = rows[a.match[u]].dist[u];
            a.dist[v] = rows[a.match[v]].dist[v];
            ++swaps;
            blocked += verify_stable(inst, a, rows).kind == StabilityVerdict::Kind::blocking_pair;
        }
    });
    const double rate = swaps ? static_cast<double>(blocked) / static_cast<double>(swaps) : 1.0;
    return {stable == outputs && rate >= kMinBlockingRate,
            std::to_string(stable) + "/" + std::to_string(outputs) + " solver outputs stable; " +
                std::to_string(blocked) + "/" + std::to_string(swaps) + " swaps blocked (rate " + fmt(rate) + ")"};
}

Verdict criterion_3() {
    const auto t = mean_times(Algorithm::gs_centers);
    double mk = 0, mt = 0;
    for (const auto& [k, v] : t) {
        mk += static_cast<double>(k);
        mt += v;
    }
    mk /= static_cast<double>(t.size());
    mt /= static_cast<double>(t.size());
    double num = 0, den = 0;
    for (const auto& [k, v] : t) {
        num += (static_cast<double>(k) - mk) * (v - mt);
        den += (static_cast<double>(k) - mk) * (static_cast<double>(k) - mk);
    }
    const double slope = num / den;
    const double growth = t.at(512) / t.at(2);
    return {slope > 0 && growth >= kMinGsGrowth,
            "slope " + fmt(slope) + " ms/k, k=512/k=2 ratio " + fmt(growth) + "; mean ms " + table(t)};
}

double spread(const std::map<std::size_t, double>& t) {
    double lo = kInfinity, hi = 0;
    for (const auto& [k, v] : t) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo;
}

// Judged on the default oracle; the truncated-Dijkstra baseline is reported alongside.
Verdict criterion_4() {
    const auto t = mean_times(Algorithm::nnc);
    const auto base = mean_times(Algorithm::nnc, OracleKind::truncated);
    return {spread(t) <= kMaxNncSpread, "max/min " + fmt(spread(t)) + "; mean ms " + table(t) +
                                            "; truncated oracle max/min " + fmt(spread(base)) + ", mean ms " + table(base)};
}

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (double y : x) {
            less += y < x[i];
            equal += y == x[i];
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1) / 2;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - mean) * (rb[i] - mean);
        da += (ra[i] - mean) * (ra[i] - mean);
        db += (rb[i] - mean) * (rb[i] - mean);
    }
    return num / std::sqrt(da * db);
}

Verdict criterion_5() {
    BenchConfig cfg;
    cfg.graph_name = "grid100";
    cfg.graph = sweep_graph();
    cfg.ks = {2, 8, 32, 128};
    cfg.runs = kCircleRuns;
    cfg.algorithms = {Algorithm::circle};
    std::map<std::size_t, double> settled, per_instance;
    for (const auto& r : run_bench(cfg)) settled[r.k] += static_cast<double>(r.work) / kCircleRuns;
    for (const auto& [k, s] : settled) per_instance[k] = s / static_cast<double>(k);
    std::vector<double> ks, means;
    for (const auto& [k, s] : settled) {
        ks.push_back(static_cast<double>(k));
        means.push_back(s);
    }
    const double rho = spearman(ks, means);
    return {rho <= kMaxSpearman, "spearman " + fmt(rho) + "; mean settled_total " + table(settled) +
                                      "; per circle " + table(per_instance)};
}

Verdict criterion_6() {
    const std::size_t n = 1000;
    const Instance inst(shared(make_path_graph(n)), {0, 1}, {500, 500});
    const auto settled = work_counters(solve_circle_growing(inst)).settled_total;
    const double need = kMinPathSettledFactor * static_cast<double>(n);
    return {static_cast<double>(settled) >= need,
            "settled_total " + std::to_string(settled) + " (need >= " + fmt(need) + ")"};
}

Verdict criterion_7() {
    BenchConfig cfg;
    cfg.graph_name = "grid100";
    cfg.graph = sweep_graph();
    cfg.ks = {512};
    cfg.runs = 1;
    cfg.algorithms = {Algorithm::gs_centers, Algorithm::gs_nodes, Algorithm::circle, Algorithm::nnc};
    cfg.run.budget = MemoryBudget::pair_entries(kCapPairEntries);
    const auto records = run_bench(cfg);
    std::ostringstream csv;
    write_bench_csv(csv, records);
    bool ok = records.size() == 4;
    std::string detail;
    for (const auto& r : records) {
        const bool gs = r.algorithm == Algorithm::gs_centers || r.algorithm == Algorithm::gs_nodes;
        const Outcome want = gs ? Outcome::refused_memory : Outcome::ok;
        ok = ok && r.outcome == want && gs == r.digest.empty();
        detail += std::string(algorithm_name(r.algorithm)) + "=" +
                  (r.outcome == Outcome::ok ? "ok" : "refused-memory") + " ";
    }
    ok = ok && csv.str().find(",gs-centers,") != std::string::npos &&
         csv.str().find("refused-memory") != std::string::npos;
    return {ok, detail + "(cap " + std::to_string(kCapPairEntries) + " pair entries, n=10000, k=512)"};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Drops the time_ms column, the one field that measures the machine.
std::string without_time(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream fields(line);
        for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
        if (cells.size() > 7) cells.erase(cells.begin() + 7);
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += '\n';
    }
    return out;
}

Verdict criterion_8() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("stabledist_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto f = [&](const std::string& name) { return (dir / name).string(); };

    // Each invocation writes into a per-round subdirectory; the outputs of the
    // two rounds are compared byte for byte.
    auto round = [&](const std::string& tag) {
        std::map<std::string, std::string> files;
        std::ostringstream out, err;
        auto call = [&](std::vector<std::string> args, const std::string& stdout_name) {
            out.str("");
            run_cli(args, out, err);
            if (!stdout_name.empty()) files[stdout_name] = out.str();
        };
        const std::string g = f(tag + "grid.tsv");
        call({"generate", "--grid", "30x20", "--jitter-seed", "7", "-o", g}, "");
        files["grid.tsv"] = slurp(g);
        for (Algorithm a : kAllAlgorithms) {
            const std::string name(algorithm_name(a));
            call({"solve", "--algo", name, "--random-centers", "9", "--seed", "3", g, "-o", f(tag + name + ".tsv"),
                  "--summary", f(tag + name + ".json")},
                 "");
            for (const char* ext : {".tsv", ".json"}) files[name + ext] = slurp(f(tag + name + ext));
        }
        call({"solve", "--random-centers", "9", "--seed", "3", g, "--trace", f(tag + "circle.trace")}, "");
        files["circle.trace"] = slurp(f(tag + "circle.trace"));
        call({"verify", "--random-centers", "9", "--seed", "3", "--assignment", f(tag + "circle.tsv"), g}, "verify.txt");
        call({"render", "--assignment", f(tag + "circle.tsv"), g, "-o", f(tag + "map.svg"), "--geojson",
              f(tag + "map.geojson")},
             "");
        files["map.svg"] = slurp(f(tag + "map.svg"));
        files["map.geojson"] = slurp(f(tag + "map.geojson"));
        call({"bench", "--k", "2,8", "--runs", "2", "--algos", "gs-centers,circle,nnc", "--jobs", "2", "--graph-name", "grid", g}, "bench_jobs.csv");
        call({"bench", "--k", "2,8", "--runs", "2", "--algos", "gs-centers,circle,nnc", "--graph-name", "grid", g}, "bench.csv");
        files["bench.csv"] = without_time(files["bench.csv"]);
        return files;
    };
    const auto a = round("a_");
    const auto b = round("b_");
    fs::remove_all(dir);

    std::string differing;
    std::string empty;
    for (const auto& [name, bytes] : a) {
        if (bytes.empty()) empty += " " + name;
        if (b.at(name) != bytes) differing += " " + name;
    }
    return {differing.empty() && empty.empty(),
            std::to_string(a.size()) + " outputs compared" + (empty.empty() ? "" : "; empty:" + empty) +
                (differing.empty() ? "" : "; differ:" + differing) + " (bench.csv compared without time_ms)"};
}

Verdict criterion_9() {
    SplitMix64 rng(42);
    std::size_t steps = 0, mutual = 0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const std::size_t n = 1 + rng.below(40);
        const auto g = testing_support::random_graph(rng, n, rng.below(n + 1), 1 + static_cast<int>(rng.below(4)));
        const Instance inst = testing_support::random_instance(rng, g, 1 + rng.below(n), rng.below(2) == 0);
        const auto apsp = testing_support::floyd_warshall(*g);
        const std::size_t k = inst.center_count();
        std::vector<bool> matched(n, false);
        std::vector<std::size_t> left(inst.quotas().begin(), inst.quotas().end());
        auto key = [&](NodeId u, CenterIndex c) {
            return testing_support::PairKey{apsp[inst.center_node(c)][u], u, c};
        };
        MutualOptions opts;
        opts.on_match = [&](const Score& s) {
            ++steps;
            bool ok = !matched[s.node] && left[s.center] > 0;
            for (CenterIndex c = 0; ok && c < k; ++c)
                if (left[c] > 0 && key(s.node, c) < key(s.node, s.center)) ok = false;
            for (NodeId u = 0; ok && u < n; ++u)
                if (!matched[u] && key(u, s.center) < key(s.node, s.center)) ok = false;
            ok = ok && key(s.node, s.center).dist == s.dist;
            mutual += ok;
            matched[s.node] = true;
            --left[s.center];
        };
        solve_mutual_closest(inst, opts);
    }
    return {steps > 0 && mutual == steps,
            std::to_string(mutual) + "/" + std::to_string(steps) + " selections were mutual closest pairs over " +
                std::to_string(kOracleInstances) + " instances"};
}

const std::map<int, std::pair<const char*, std::function<Verdict()>>> kCriteria{
    {1, {"all solvers produce identical assignments", criterion_1}},
    {2, {"solver outputs stable, perturbations blocked", criterion_2}},
    {3, {"GS_C time grows with k", criterion_3}},
    {4, {"NNC time flat in k", criterion_4}},
    {5, {"circle-growing settled_total non-increasing in k", criterion_5}},
    {6, {"circle-growing degenerate path", criterion_6}},
    {7, {"GS memory refusal is a recorded outcome", criterion_7}},
    {8, {"CLI outputs are deterministic", criterion_8}},
    {9, {"mutual-closest selections are mutual closest pairs", criterion_9}},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (const auto& [id, c] : kCriteria) ids.push_back(id);

    int failed = 0;
    for (int id : ids) {
        const auto it = kCriteria.find(id);
        if (it == kCriteria.end()) {
            std::cout << "criterion " << id << ": FAIL unknown criterion\n";
            ++failed;
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = it->second.second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << it->second.first << "  ["
                  << v.detail << "] (" << fmt(secs) << " s)" << std::endl;
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
