#include "stabledist/cli.hpp"

#include "stabledist/bench.hpp"
#include "stabledist/graph.hpp"
#include "stabledist/model.hpp"
#include "stabledist/render.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace stabledist {

namespace {

// Carries an exit code out of a subcommand.
struct CliFailure {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw CliFailure{code, std::move(message)}; }

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kExitParseError, "cannot open " + path);
    return in;
}

struct GraphInput {
    std::vector<std::string> paths;
    bool largest_component = false;
};

struct LoadedGraph {
    std::shared_ptr<const RoadGraph> graph;
    bool dimacs = false;
};

LoadedGraph load_graph(const GraphInput& input, std::ostream& err) {
    if (input.paths.empty() || input.paths.size() > 2) fail(kExitParseError, "expected a graph file (and optional .co)");
    LoadedGraph loaded;
    RoadGraph g;
    const std::string& main = input.paths[0];
    auto in = open_input(main);
    if (ends_with(main, ".gr")) {
        loaded.dimacs = true;
        if (input.paths.size() == 2) {
            auto co = open_input(input.paths[1]);
            g = parse_dimacs(in, &co);
        } else {
            g = parse_dimacs(in);
        }
    } else {
        if (input.paths.size() == 2) fail(kExitParseError, "a coordinate file is only accepted with a .gr graph");
        g = parse_tsv(in);
    }

    if (input.largest_component) {
        RoadGraph trimmed = largest_component(g);
        err << "largest component: " << trimmed.node_count() << " of " << g.node_count() << " nodes (-"
            << g.node_count() - trimmed.node_count() << "), " << trimmed.edge_count() << " of " << g.edge_count()
            << " edges (-" << g.edge_count() - trimmed.edge_count() << ")\n";
        g = std::move(trimmed);
    } else if (!is_connected(g)) {
        fail(kExitInfeasible, "graph is not connected; rerun with --largest-component to keep its largest component");
    }
    loaded.graph = std::make_shared<const RoadGraph>(std::move(g));
    return loaded;
}

std::vector<std::int64_t> read_id_list(const std::string& path, const char* what) {
    auto in = open_input(path);
    std::vector<std::int64_t> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token) || token[0] == '#') continue;
        try {
            std::size_t used = 0;
            ids.push_back(std::stoll(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            fail(kExitParseError, path + ": line " + std::to_string(lineno) + ": malformed " + what);
        }
    }
    return ids;
}

struct InstanceSource {
    std::string centers_file;
    std::size_t random_centers = 0;
    std::uint64_t seed = 1;
    std::string quotas = "equal";
};

void add_instance_options(CLI::App& cmd, InstanceSource& src) {
    auto* file = cmd.add_option("--centers", src.centers_file, "File of center node ids, one per line");
    auto* random = cmd.add_option("--random-centers", src.random_centers, "Draw k random centers");
    file->excludes(random);
    random->excludes(file);
    cmd.add_option("--seed", src.seed, "Seed for --random-centers")->capture_default_str();
    cmd.add_option("--quotas", src.quotas, "'equal' or a file of per-center quotas")->capture_default_str();
}

Instance build_instance(const std::shared_ptr<const RoadGraph>& g, const InstanceSource& src) {
    std::vector<NodeId> centers;
    if (!src.centers_file.empty()) {
        for (std::int64_t id : read_id_list(src.centers_file, "center id")) {
            const auto u = g->find_original(id);
            if (!u) fail(kExitParseError, "center " + std::to_string(id) + " is not in the graph");
            centers.push_back(*u);
        }
    } else if (src.random_centers > 0) {
        if (src.random_centers > g->node_count()) {
            fail(kExitInfeasible, "--random-centers " + std::to_string(src.random_centers) + " exceeds n=" +
                                      std::to_string(g->node_count()));
        }
        centers = sample_centers(g->node_count(), src.random_centers, src.seed);
    } else {
        fail(kExitParseError, "give exactly one of --centers or --random-centers");
    }

    std::vector<std::size_t> quotas;
    if (src.quotas == "equal") {
        if (centers.empty() || centers.size() > g->node_count()) fail(kExitInfeasible, "need 1 <= k <= n centers");
        quotas = equal_quotas(g->node_count(), centers.size());
    } else {
        for (std::int64_t q : read_id_list(src.quotas, "quota")) {
            if (q <= 0) fail(kExitInfeasible, "quotas must be positive");
            quotas.push_back(static_cast<std::size_t>(q));
        }
    }
    return Instance(g, std::move(centers), std::move(quotas));
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) fail(kExitParseError, "cannot write " + path);
        }
        stream_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

MemoryBudget budget_from(std::uint64_t cap, bool unlimited) {
    return unlimited ? MemoryBudget::unlimited() : MemoryBudget{cap};
}

OracleKind oracle_from(const std::string& name) {
    if (name == "incremental") return OracleKind::incremental;
    if (name == "truncated") return OracleKind::truncated;
    fail(kExitParseError, "unknown oracle '" + name + "'");
}

Assignment read_assignment(const std::string& path, const Instance& inst) {
    auto in = open_input(path);
    const auto rows = read_assignment_tsv(in);
    return assignment_from_rows(inst, rows);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stable shortest-path districting of weighted graphs"};
    app.require_subcommand(1);

    GraphInput graph_input;
    InstanceSource source;
    std::string algo = "circle";
    std::string output, summary, trace_path, assignment_path, geojson_path, oracle = "incremental";
    std::uint64_t memory_cap = MemoryBudget::kDefaultBytes;
    bool no_memory_cap = false;

    auto add_graph = [&](CLI::App& cmd) {
        cmd.add_option("graph", graph_input.paths, "Graph file (.gr [.co] or TSV edge list)")->required();
        cmd.add_flag("--largest-component", graph_input.largest_component, "Keep only the largest connected component");
    };
    auto add_memory = [&](CLI::App& cmd) {
        cmd.add_option("--memory-cap", memory_cap, "Refuse runs needing more bytes than this")->capture_default_str();
        cmd.add_flag("--no-memory-cap", no_memory_cap, "Lift the memory cap");
    };

    auto* solve = app.add_subcommand("solve", "Compute the stable assignment");
    add_graph(*solve);
    add_instance_options(*solve, source);
    add_memory(*solve);
    solve->add_option("--algo", algo, "gs-centers, gs-nodes, circle, nnc or mutual")->capture_default_str();
    solve->add_option("--oracle", oracle, "NNC oracle: incremental or truncated")->capture_default_str();
    solve->add_option("-o,--output", output, "Assignment TSV (default: stdout)");
    solve->add_option("--summary", summary, "Write a JSON summary");
    solve->add_option("--trace", trace_path, "Circle-growing event trace");

    auto* verify = app.add_subcommand("verify", "Check an assignment for stability");
    add_graph(*verify);
    add_instance_options(*verify, source);
    verify->add_option("--assignment", assignment_path, "Assignment TSV")->required();

    std::vector<std::size_t> ks;
    std::vector<std::string> algos;
    std::size_t runs = 10;
    unsigned jobs = 1;
    std::string graph_name;
    auto* bench = app.add_subcommand("bench", "Time algorithms over random center sets");
    add_graph(*bench);
    add_memory(*bench);
    bench->add_option("--k", ks, "Comma-separated k values")->delimiter(',')->required();
    bench->add_option("--runs", runs, "Center sets per k")->capture_default_str();
    bench->add_option("--seed", source.seed, "Base seed")->capture_default_str();
    bench->add_option("--algos", algos, "Comma-separated algorithms")->delimiter(',')->required();
    bench->add_option("--oracle", oracle, "NNC oracle: incremental or truncated")->capture_default_str();
    bench->add_option("--jobs", jobs, "Concurrent center sets (disables timing)")->capture_default_str();
    bench->add_option("--graph-name", graph_name, "Name for the graph column (default: file name)");
    bench->add_option("-o,--output", output, "CSV output (default: stdout)");

    auto* render = app.add_subcommand("render", "Draw a district map");
    add_graph(*render);
    render->add_option("--assignment", assignment_path, "Assignment TSV")->required();
    render->add_option("--centers", source.centers_file, "Center order (default: derived from the assignment)");
    render->add_option("-o,--output", output, "SVG output (default: stdout)");
    render->add_option("--geojson", geojson_path, "Also write GeoJSON");

    std::string grid;
    std::optional<std::uint64_t> jitter_seed;
    auto* generate = app.add_subcommand("generate", "Write a synthetic grid graph as TSV");
    generate->add_option("--grid", grid, "WxH")->required();
    generate->add_option("--jitter-seed", jitter_seed, "Draw weights from [1,2) with this seed");
    generate->add_option("-o,--output", output, "TSV output (default: stdout)");

    std::vector<const char*> argv{"stabledist"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitParseError;
    }

    try {
        if (solve->parsed()) {
            const auto algorithm = parse_algorithm(algo);
            if (!algorithm) fail(kExitParseError, "unknown algorithm '" + algo + "'");
            const auto loaded = load_graph(graph_input, err);
            const Instance inst = build_instance(loaded.graph, source);
            RunOptions opts{budget_from(memory_cap, no_memory_cap), oracle_from(oracle), nullptr};
            std::ofstream trace;
            if (!trace_path.empty()) {
                trace.open(trace_path, std::ios::binary);
                if (!trace) fail(kExitParseError, "cannot write " + trace_path);
                opts.trace = &trace;
            }
            const auto start = std::chrono::steady_clock::now();
            const RunResult result = run_algorithm(inst, *algorithm, opts);
            const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
            Output o(output, out);
            write_assignment_tsv(o.stream(), inst, result.assignment);
            if (!summary.empty()) {
                Output s(summary, out);
                write_summary_json(s.stream(), inst, result.assignment, algo);
            }
            err << "n=" << inst.node_count() << " m=" << inst.graph().edge_count() << " k=" << inst.center_count()
                << " algorithm=" << algo << " time_ms=" << elapsed.count() << '\n';
        } else if (verify->parsed()) {
            const auto loaded = load_graph(graph_input, err);
            const Instance inst = build_instance(loaded.graph, source);
            const Assignment a = read_assignment(assignment_path, inst);
            const StabilityVerdict verdict = verify_stable(inst, a);
            out << verdict.describe(inst) << '\n';
            if (!verdict.stable()) return kExitUnstable;
        } else if (bench->parsed()) {
            BenchConfig cfg;
            const auto loaded = load_graph(graph_input, err);
            cfg.graph = loaded.graph;
            cfg.graph_name = graph_name.empty() ? std::filesystem::path(graph_input.paths[0]).stem().string() : graph_name;
            cfg.ks = ks;
            cfg.runs = runs;
            cfg.seed = source.seed;
            for (const auto& name : algos) {
                const auto a = parse_algorithm(name);
                if (!a) fail(kExitParseError, "unknown algorithm '" + name + "'");
                cfg.algorithms.push_back(*a);
            }
            cfg.run = {budget_from(memory_cap, no_memory_cap), oracle_from(oracle), nullptr};
            cfg.jobs = jobs;
            for (std::size_t k : ks) {
                if (k == 0 || k > cfg.graph->node_count()) fail(kExitInfeasible, "k=" + std::to_string(k) + " outside 1..n");
            }
            const auto records = run_bench(cfg);
            Output o(output, out);
            write_bench_csv(o.stream(), records);
        } else if (render->parsed()) {
            const auto loaded = load_graph(graph_input, err);
            const auto& g = *loaded.graph;
            if (!g.has_coords()) fail(kExitParseError, "render needs node coordinates");
            auto in = open_input(assignment_path);
            const auto rows = read_assignment_tsv(in);

            std::vector<NodeId> centers;
            std::map<NodeId, std::size_t> members;
            for (const auto& row : rows) {
                const auto c = g.find_original(row.center_original_id);
                if (!c) fail(kExitParseError, "center " + std::to_string(row.center_original_id) + " is not in the graph");
                ++members[*c];
            }
            if (!source.centers_file.empty()) {
                for (std::int64_t id : read_id_list(source.centers_file, "center id")) {
                    const auto u = g.find_original(id);
                    if (!u) fail(kExitParseError, "center " + std::to_string(id) + " is not in the graph");
                    centers.push_back(*u);
                }
            } else {
                for (const auto& [c, count] : members) centers.push_back(c);
            }
            std::vector<std::size_t> quotas;
            for (NodeId c : centers) quotas.push_back(members[c]);
            const Instance inst(loaded.graph, centers, quotas);
            const Assignment a = assignment_from_rows(inst, rows);
            Output o(output, out);
            o.stream() << render_svg(inst, a);
            if (!geojson_path.empty()) {
                Output gj(geojson_path, out);
                gj.stream() << render_geojson(inst, a, loaded.dimacs ? 1e-6 : 1.0);
            }
        } else if (generate->parsed()) {
            const auto x = grid.find('x');
            std::size_t w = 0, h = 0;
            try {
                if (x == std::string::npos) throw std::invalid_argument(grid);
                w = std::stoul(grid.substr(0, x));
                h = std::stoul(grid.substr(x + 1));
            } catch (const std::exception&) {
                fail(kExitParseError, "--grid expects WxH, got '" + grid + "'");
            }
            if (w == 0 || h == 0) fail(kExitParseError, "--grid dimensions must be positive");
            Output o(output, out);
            write_tsv(o.stream(), make_grid_graph(w, h, jitter_seed));
        }
    } catch (const CliFailure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const InfeasibleInstance& e) {
        err << "infeasible instance: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const MemoryRefusal& e) {
        err << "memory refusal: " << e.what() << '\n';
        return kExitMemoryRefusal;
    }
    return kExitOk;
}

}  // namespace stabledist
