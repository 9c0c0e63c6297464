#include "stabledist/graph.hpp"

#include "stabledist/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <string_view>

namespace stabledist {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::optional<NodeId> RoadGraph::find_original(std::int64_t original) const {
    auto it = std::lower_bound(original_ids_.begin(), original_ids_.end(), original);
    if (it == original_ids_.end() || *it != original) return std::nullopt;
    return static_cast<NodeId>(it - original_ids_.begin());
}

std::vector<Edge> RoadGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
        for (const Arc& a : neighbors(u)) {
            if (u < a.target) out.push_back({u, a.target, a.weight});
        }
    }
    return out;
}

void GraphBuilder::add_node(std::int64_t original) { nodes_.push_back(original); }

void GraphBuilder::add_edge(std::int64_t u, std::int64_t v, Length w) {
    if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
    if (!(w > 0) || !std::isfinite(w)) {
        throw GraphError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                         " has non-positive or non-finite weight");
    }
    nodes_.push_back(u);
    nodes_.push_back(v);
    edges_.push_back({u, v, w});
}

void GraphBuilder::set_coord(std::int64_t original, Point p) {
    nodes_.push_back(original);
    coords_.emplace_back(original, p);
}

RoadGraph GraphBuilder::build() && {
    RoadGraph g;
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    g.original_ids_ = std::move(nodes_);
    const std::size_t n = g.original_ids_.size();

    auto dense = [&](std::int64_t original) { return *g.find_original(original); };

    struct DenseEdge {
        NodeId a;
        NodeId b;
        Length w;
    };
    std::vector<DenseEdge> es;
    es.reserve(edges_.size());
    for (const RawEdge& e : edges_) {
        NodeId a = dense(e.u);
        NodeId b = dense(e.v);
        if (a > b) std::swap(a, b);
        es.push_back({a, b, e.w});
    }
    std::sort(es.begin(), es.end(), [](const DenseEdge& x, const DenseEdge& y) {
        return std::tie(x.a, x.b, x.w) < std::tie(y.a, y.b, y.w);
    });
    // Sorted by weight within a pair, so keeping the first copy keeps the minimum.
    es.erase(std::unique(es.begin(), es.end(),
                         [](const DenseEdge& x, const DenseEdge& y) { return x.a == y.a && x.b == y.b; }),
             es.end());

    std::vector<std::size_t> degree(n + 1, 0);
    for (const DenseEdge& e : es) {
        ++degree[e.a];
        ++degree[e.b];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + degree[u];
    g.arcs_.resize(2 * es.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const DenseEdge& e : es) {
        g.arcs_[fill[e.a]++] = {e.b, e.w};
        g.arcs_[fill[e.b]++] = {e.a, e.w};
    }
    for (std::size_t u = 0; u < n; ++u) {
        std::sort(g.arcs_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                  g.arcs_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]),
                  [](const Arc& x, const Arc& y) { return x.target < y.target; });
    }

    if (!coords_.empty()) {
        g.coords_.assign(n, Point{});
        std::vector<bool> seen(n, false);
        for (const auto& [original, p] : coords_) {
            const NodeId u = dense(original);
            g.coords_[u] = p;
            seen[u] = true;
        }
        for (std::size_t u = 0; u < n; ++u) {
            if (!seen[u]) {
                throw GraphError("missing coordinate for node " + std::to_string(g.original_ids_[u]));
            }
        }
    }
    return g;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

RoadGraph parse_dimacs(std::istream& gr, std::istream* co) {
    GraphBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    std::int64_t n = -1;

    while (std::getline(gr, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0] == "c") continue;
        if (f[0] == "p") {
            if (n >= 0) throw ParseError(lineno, "duplicate problem line");
            if (f.size() != 4 || f[1] != "sp") throw ParseError(lineno, "malformed header, expected 'p sp n m'");
            n = parse_number<std::int64_t>(f[2], lineno, "node count");
            parse_number<std::int64_t>(f[3], lineno, "arc count");
            if (n <= 0) throw ParseError(lineno, "malformed header, node count must be positive");
            for (std::int64_t id = 1; id <= n; ++id) builder.add_node(id);
        } else if (f[0] == "a") {
            if (n < 0) throw ParseError(lineno, "arc before 'p sp' header");
            if (f.size() != 4) throw ParseError(lineno, "malformed arc line, expected 'a u v w'");
            const auto u = parse_number<std::int64_t>(f[1], lineno, "node id");
            const auto v = parse_number<std::int64_t>(f[2], lineno, "node id");
            const auto w = parse_number<double>(f[3], lineno, "weight");
            if (u < 1 || u > n || v < 1 || v > n) {
                throw ParseError(lineno, "arc references node outside 1.." + std::to_string(n));
            }
            if (!(w > 0) || !std::isfinite(w)) throw ParseError(lineno, "non-positive weight");
            if (u == v) throw ParseError(lineno, "self-loop at node " + std::to_string(u));
            builder.add_edge(u, v, w);
        } else {
            throw ParseError(lineno, "unknown line type '" + std::string(f[0]) + "'");
        }
    }
    if (n < 0) throw ParseError(0, "missing 'p sp n m' header");

    if (co) {
        lineno = 0;
        while (std::getline(*co, line)) {
            ++lineno;
            const auto f = split_fields(line);
            if (f.empty() || f[0] == "c" || f[0] == "p") continue;
            if (f[0] != "v" || f.size() != 4) throw ParseError(lineno, "malformed coordinate line, expected 'v id x y'");
            const auto id = parse_number<std::int64_t>(f[1], lineno, "node id");
            if (id < 1 || id > n) throw ParseError(lineno, "coordinate for unknown node " + std::to_string(id));
            builder.set_coord(id, {parse_number<double>(f[2], lineno, "coordinate"),
                                   parse_number<double>(f[3], lineno, "coordinate")});
        }
    }
    try {
        return std::move(builder).build();
    } catch (const GraphError& e) {
        throw ParseError(0, e.what());
    }
}

RoadGraph parse_tsv(std::istream& in) {
    GraphBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    bool any = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        if (f[0] == "#node") {
            const auto id = f.size() >= 2 ? parse_number<std::int64_t>(f[1], lineno, "node id") : 0;
            if (f.size() == 2) {
                builder.add_node(id);
            } else if (f.size() == 4) {
                builder.set_coord(id, {parse_number<double>(f[2], lineno, "coordinate"),
                                       parse_number<double>(f[3], lineno, "coordinate")});
            } else {
                throw ParseError(lineno, "malformed node line, expected '#node id [x y]'");
            }
            any = true;
            continue;
        }
        if (f[0].front() == '#') continue;
        if (f.size() != 3) throw ParseError(lineno, "malformed edge line, expected 'u v w'");
        const auto u = parse_number<std::int64_t>(f[0], lineno, "node id");
        const auto v = parse_number<std::int64_t>(f[1], lineno, "node id");
        const auto w = parse_number<double>(f[2], lineno, "weight");
        if (u == v) throw ParseError(lineno, "self-loop at node " + std::to_string(u));
        if (!(w > 0) || !std::isfinite(w)) throw ParseError(lineno, "non-positive weight");
        builder.add_edge(u, v, w);
        any = true;
    }
    if (!any) throw ParseError(0, "empty graph");
    try {
        return std::move(builder).build();
    } catch (const GraphError& e) {
        throw ParseError(0, e.what());
    }
}

std::string format_length(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_tsv(std::ostream& out, const RoadGraph& g) {
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (g.has_coords()) {
            out << "#node\t" << g.original_id(u) << '\t' << format_length(g.coord(u).x) << '\t'
                << format_length(g.coord(u).y) << '\n';
        } else if (g.neighbors(u).empty()) {
            out << "#node\t" << g.original_id(u) << '\n';
        }
    }
    for (const Edge& e : g.edges()) {
        out << g.original_id(e.u) << '\t' << g.original_id(e.v) << '\t' << format_length(e.w) << '\n';
    }
}

namespace {

// Component label per node, numbered in order of smallest member.
std::vector<std::uint32_t> component_labels(const RoadGraph& g, std::uint32_t& count) {
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label(g.node_count(), kUnset);
    std::vector<NodeId> stack;
    count = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
        if (label[s] != kUnset) continue;
        label[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (const Arc& a : g.neighbors(u)) {
                if (label[a.target] == kUnset) {
                    label[a.target] = count;
                    stack.push_back(a.target);
                }
            }
        }
        ++count;
    }
    return label;
}

}  // namespace

bool is_connected(const RoadGraph& g) {
    if (g.node_count() == 0) return false;
    std::uint32_t count = 0;
    component_labels(g, count);
    return count == 1;
}

RoadGraph largest_component(const RoadGraph& g) {
    if (g.node_count() == 0) throw GraphError("largest_component: empty graph");
    std::uint32_t count = 0;
    const auto label = component_labels(g, count);
    if (count == 1) return g;

    std::vector<std::size_t> size(count, 0);
    for (auto l : label) ++size[l];
    // Labels follow the smallest dense id, which is also the smallest original id,
    // so max_element's first-wins rule applies the tie-break.
    const auto best = static_cast<std::uint32_t>(std::max_element(size.begin(), size.end()) - size.begin());

    GraphBuilder builder;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (label[u] != best) continue;
        builder.add_node(g.original_id(u));
        if (g.has_coords()) builder.set_coord(g.original_id(u), g.coord(u));
        for (const Arc& a : g.neighbors(u)) {
            if (u < a.target) builder.add_edge(g.original_id(u), g.original_id(a.target), a.weight);
        }
    }
    return std::move(builder).build();
}

DistRow dijkstra(const RoadGraph& g, NodeId source) {
    if (source >= g.node_count()) throw GraphError("dijkstra: source " + std::to_string(source) + " out of range");
    DistRow row{source, std::vector<Length>(g.node_count(), kInfinity)};
    auto& dist = row.dist;
    using Entry = std::pair<Length, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[source] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const Arc& a : g.neighbors(u)) {
            const Length nd = d + a.weight;
            if (nd < dist[a.target]) {
                dist[a.target] = nd;
                heap.emplace(nd, a.target);
            }
        }
    }
    return row;
}

RoadGraph make_grid_graph(std::size_t width, std::size_t height, std::optional<std::uint64_t> jitter_seed) {
    if (width == 0 || height == 0) throw GraphError("grid dimensions must be positive");
    std::optional<SplitMix64> rng;
    if (jitter_seed) rng.emplace(*jitter_seed);
    auto weight = [&] { return rng ? 1.0 + std::ldexp(static_cast<double>(rng->next() >> 44), -20) : 1.0; };
    auto id = [&](std::size_t x, std::size_t y) { return static_cast<std::int64_t>(y * width + x + 1); };

    GraphBuilder builder;
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            builder.set_coord(id(x, y), {static_cast<double>(x), static_cast<double>(y)});
            if (x + 1 < width) builder.add_edge(id(x, y), id(x + 1, y), weight());
            if (y + 1 < height) builder.add_edge(id(x, y), id(x, y + 1), weight());
        }
    }
    return std::move(builder).build();
}

RoadGraph make_path_graph(std::size_t n) {
    if (n == 0) throw GraphError("path length must be positive");
    GraphBuilder builder;
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<std::int64_t>(i + 1);
        builder.set_coord(id, {static_cast<double>(i), 0.0});
        if (i + 1 < n) builder.add_edge(id, id + 1, 1.0);
    }
    return std::move(builder).build();
}

}  // namespace stabledist
