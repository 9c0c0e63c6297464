#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabledist {

using NodeId = std::uint32_t;
using Length = double;

inline constexpr Length kInfinity = std::numeric_limits<Length>::infinity();

// Thrown by the readers; line is 1-based, 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0;
    double y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Arc {
    NodeId target;
    Length weight;
    friend bool operator==(const Arc&, const Arc&) = default;
};

struct Edge {
    NodeId u;
    NodeId v;
    Length w;
};

/**
 * Immutable weighted undirected graph in compressed adjacency form.
 *
 * Every undirected edge is stored as two arcs with equal weight. Node ids are
 * dense; original_id() maps back to the identifier used in the source file.
 * Construct through GraphBuilder, the parsers, or make_grid_graph().
 */
class RoadGraph {
public:
    RoadGraph() = default;

    std::size_t node_count() const noexcept { return original_ids_.size(); }
    std::size_t edge_count() const noexcept { return arcs_.size() / 2; }

    std::span<const Arc> neighbors(NodeId u) const noexcept {
        return {arcs_.data() + offsets_[u], arcs_.data() + offsets_[u + 1]};
    }

    std::int64_t original_id(NodeId u) const noexcept { return original_ids_[u]; }
    std::span<const std::int64_t> original_ids() const noexcept { return original_ids_; }
    std::optional<NodeId> find_original(std::int64_t original) const;

    bool has_coords() const noexcept { return !coords_.empty(); }
    const Point& coord(NodeId u) const noexcept { return coords_[u]; }
    std::span<const Point> coords() const noexcept { return coords_; }

    // Each undirected edge once, with u < v, in ascending (u, v) order.
    std::vector<Edge> edges() const;

    friend bool operator==(const RoadGraph&, const RoadGraph&) = default;

private:
    friend class GraphBuilder;

    std::vector<std::size_t> offsets_{0};
    std::vector<Arc> arcs_;
    std::vector<std::int64_t> original_ids_;
    std::vector<Point> coords_;
};

/**
 * Collects nodes and edges, then normalizes them into a RoadGraph: arcs are
 * symmetrized, parallel edges collapse to the minimum weight, and node ids
 * are assigned in ascending original-id order.
 */
class GraphBuilder {
public:
    void add_node(std::int64_t original);
    // Throws GraphError on self-loops and on non-positive or non-finite weights.
    void add_edge(std::int64_t u, std::int64_t v, Length w);
    void set_coord(std::int64_t original, Point p);

    // Throws GraphError when some but not all nodes received coordinates.
    RoadGraph build() &&;

private:
    struct RawEdge {
        std::int64_t u;
        std::int64_t v;
        Length w;
    };
    std::vector<std::int64_t> nodes_;
    std::vector<RawEdge> edges_;
    std::vector<std::pair<std::int64_t, Point>> coords_;
};

// DIMACS shortest-path challenge formats: `p sp n m` / `a u v w` (.gr) and `v id x y` (.co).
RoadGraph parse_dimacs(std::istream& gr, std::istream* co = nullptr);

// `u v w` edge lines (tab or space separated) plus optional `#node id x y` lines.
RoadGraph parse_tsv(std::istream& in);
void write_tsv(std::ostream& out, const RoadGraph& g);

// Induced subgraph on the largest connected component. Ties between
// equal-size components go to the one holding the smallest original id.
RoadGraph largest_component(const RoadGraph& g);

bool is_connected(const RoadGraph& g);

// Shortest-path distances from one source; unreachable nodes get kInfinity.
struct DistRow {
    NodeId source = 0;
    std::vector<Length> dist;
};

DistRow dijkstra(const RoadGraph& g, NodeId source);

// W x H grid with unit weights; when jitter_seed is set each weight is drawn
// from [1, 2) on a 2^-20 lattice, so path sums are exact and distances do not
// depend on the direction they were summed in. Node (x, y) has original id y*W + x + 1 and coordinate (x, y).
RoadGraph make_grid_graph(std::size_t width, std::size_t height,
                          std::optional<std::uint64_t> jitter_seed = std::nullopt);

// Path 0 - 1 - ... - (n-1) with unit weights and coordinates along the x axis.
RoadGraph make_path_graph(std::size_t n);

// Shortest decimal representation that parses back to the same double.
std::string format_length(double value);

}  // namespace stabledist
