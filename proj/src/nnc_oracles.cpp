#include "stabledist/nnc.hpp"

#include <functional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace stabledist {

namespace {

constexpr std::uint32_t kNone = ~std::uint32_t{0};

// Element ids on either side, translated to and from graph nodes.
class SideMap {
public:
    SideMap(const Instance& inst, Side side) : inst_(inst), side_(side) {
        if (side == Side::center) {
            center_at_.assign(inst.node_count(), kNone);
            for (CenterIndex c = 0; c < inst.center_count(); ++c) center_at_[inst.center_node(c)] = c;
        }
    }

    std::size_t element_count() const { return side_ == Side::node ? inst_.node_count() : inst_.center_count(); }
    std::size_t query_count() const { return side_ == Side::node ? inst_.center_count() : inst_.node_count(); }

    // Graph node a query starts from.
    NodeId query_node(std::uint32_t q) const { return side_ == Side::node ? inst_.center_node(q) : q; }
    // Element located at graph node v, or kNone.
    std::uint32_t element_at(NodeId v) const { return side_ == Side::node ? v : center_at_[v]; }

    void check_query(std::uint32_t q) const {
        if (q >= query_count()) throw std::out_of_range("oracle query out of range");
    }
    void check_element(std::uint32_t e) const {
        if (e >= element_count()) throw std::out_of_range("oracle element out of range");
    }

private:
    const Instance& inst_;
    Side side_;
    std::vector<std::uint32_t> center_at_;
};

class TruncatedDijkstraOracle final : public DnnOracle {
public:
    TruncatedDijkstraOracle(const Instance& inst, Side side)
        : graph_(inst.graph()),
          map_(inst, side),
          active_(map_.element_count(), true),
          active_count_(map_.element_count()),
          dist_(inst.node_count(), kInfinity),
          stamp_(inst.node_count(), 0) {}

    std::optional<NearestHit> nearest(std::uint32_t query) override {
        map_.check_query(query);
        if (active_count_ == 0) return std::nullopt;
        ++epoch_;
        const NodeId source = map_.query_node(query);
        // Equal-distance settles go in Score order: the element id breaks ties
        // (node id on the node side, center index on the center side).
        using Entry = std::tuple<Length, std::uint64_t, NodeId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        relax(heap, source, 0);
        while (!heap.empty()) {
            const auto [d, key, v] = heap.top();
            heap.pop();
            if (d > distance(v)) continue;
            ++work_;
            const std::uint32_t e = map_.element_at(v);
            if (e != kNone && active_[e]) return NearestHit{e, d};
            for (const Arc& a : graph_.neighbors(v)) relax(heap, a.target, d + a.weight);
        }
        return std::nullopt;
    }

    void remove(std::uint32_t element) override {
        map_.check_element(element);
        if (active_[element]) {
            active_[element] = false;
            --active_count_;
        }
    }

    bool active(std::uint32_t element) const override { return element < active_.size() && active_[element]; }
    std::uint64_t work() const override { return work_; }

private:
    Length distance(NodeId v) const { return stamp_[v] == epoch_ ? dist_[v] : kInfinity; }

    template <class Heap>
    void relax(Heap& heap, NodeId v, Length d) {
        if (d >= distance(v)) return;
        stamp_[v] = epoch_;
        dist_[v] = d;
        const std::uint32_t e = map_.element_at(v);
        const std::uint64_t key = e != kNone ? e : (std::uint64_t{1} << 32) + v;
        heap.emplace(d, key, v);
    }

    const RoadGraph& graph_;
    SideMap map_;
    std::vector<bool> active_;
    std::size_t active_count_;
    std::vector<Length> dist_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::uint64_t work_ = 0;
};

// Exact nearest active center for every node, keyed (distance, center index).
class VoronoiCenterOracle final : public DnnOracle {
public:
    explicit VoronoiCenterOracle(const Instance& inst)
        : inst_(inst),
          active_(inst.center_count(), true),
          active_count_(inst.center_count()),
          label_(inst.node_count(), Label{kInfinity, kNone}),
          cell_stamp_(inst.node_count(), 0) {
        Heap heap;
        for (CenterIndex c = 0; c < inst.center_count(); ++c) improve(heap, inst.center_node(c), {0, c});
        run(heap, false);
    }

    std::optional<NearestHit> nearest(std::uint32_t query) override {
        if (query >= inst_.node_count()) throw std::out_of_range("oracle query out of range");
        if (active_count_ == 0) return std::nullopt;
        return NearestHit{label_[query].center, label_[query].dist};
    }

    void remove(std::uint32_t element) override {
        if (element >= inst_.center_count()) throw std::out_of_range("oracle element out of range");
        if (!active_[element]) return;
        active_[element] = false;
        --active_count_;

        // A cell is connected through its shortest-path tree, so a flood from
        // the center over same-owner nodes collects all of it.
        const auto& g = inst_.graph();
        ++epoch_;
        std::vector<NodeId> cell{inst_.center_node(element)};
        cell_stamp_[cell[0]] = epoch_;
        for (std::size_t i = 0; i < cell.size(); ++i) {
            for (const Arc& a : g.neighbors(cell[i])) {
                if (label_[a.target].center == element && cell_stamp_[a.target] != epoch_) {
                    cell_stamp_[a.target] = epoch_;
                    cell.push_back(a.target);
                }
            }
        }
        for (NodeId v : cell) label_[v] = {kInfinity, kNone};
        work_ += cell.size();

        Heap heap;
        for (NodeId v : cell) {
            for (const Arc& a : g.neighbors(v)) {
                const Label& outside = label_[a.target];
                if (!in_cell(a.target) && outside.center != kNone) {
                    improve(heap, v, {outside.dist + a.weight, outside.center});
                }
            }
        }
        run(heap, true);
    }

    bool active(std::uint32_t element) const override { return element < active_.size() && active_[element]; }
    std::uint64_t work() const override { return work_; }

private:
    struct Label {
        Length dist;
        CenterIndex center;
        friend bool operator<(const Label& a, const Label& b) {
            return std::tie(a.dist, a.center) < std::tie(b.dist, b.center);
        }
    };
    using Entry = std::pair<Label, NodeId>;
    struct EntryGreater {
        bool operator()(const Entry& a, const Entry& b) const { return b.first < a.first; }
    };
    using Heap = std::priority_queue<Entry, std::vector<Entry>, EntryGreater>;

    void improve(Heap& heap, NodeId v, Label candidate) {
        if (candidate < label_[v]) {
            label_[v] = candidate;
            heap.emplace(candidate, v);
        }
    }

    // Multi-source Dijkstra over labels. A repair only relabels the removed
    // cell; labels outside it were optimal over a superset of centers.
    void run(Heap& heap, bool within_cell) {
        const auto& g = inst_.graph();
        while (!heap.empty()) {
            const auto [label, v] = heap.top();
            heap.pop();
            if (label_[v] < label) continue;
            ++work_;
            for (const Arc& a : g.neighbors(v)) {
                if (within_cell && !in_cell(a.target)) continue;
                improve(heap, a.target, {label.dist + a.weight, label.center});
            }
        }
    }

    bool in_cell(NodeId v) const { return cell_stamp_[v] == epoch_; }

    const Instance& inst_;
    std::vector<bool> active_;
    std::size_t active_count_;
    std::vector<Label> label_;
    std::vector<std::uint32_t> cell_stamp_;
    std::uint32_t epoch_ = 0;
    std::uint64_t work_ = 0;
};

// Nearest unmatched node per center from a persistent Dijkstra frontier.
class ResumableNodeOracle final : public DnnOracle {
public:
    explicit ResumableNodeOracle(const Instance& inst)
        : inst_(inst), active_(inst.node_count(), true), active_count_(inst.node_count()), searches_(inst.center_count()) {
        for (CenterIndex c = 0; c < inst.center_count(); ++c) {
            auto& s = searches_[c];
            s.tentative[inst.center_node(c)] = State{0, false};
            s.heap.emplace(0, inst.center_node(c));
        }
    }

    std::optional<NearestHit> nearest(std::uint32_t query) override {
        if (query >= inst_.center_count()) throw std::out_of_range("oracle query out of range");
        if (active_count_ == 0) return std::nullopt;
        auto& s = searches_[query];
        while (!s.heap.empty()) {
            const auto [d, v] = s.heap.top();
            auto it = s.tentative.find(v);
            if (it->second.settled || d > it->second.dist) {
                s.heap.pop();
                continue;
            }
            if (active_[v]) return NearestHit{v, d};
            s.heap.pop();
            it->second.settled = true;
            ++work_;
            for (const Arc& a : inst_.graph().neighbors(v)) {
                const Length nd = d + a.weight;
                auto [slot, fresh] = s.tentative.try_emplace(a.target, State{nd, false});
                if (fresh || (!slot->second.settled && nd < slot->second.dist)) {
                    slot->second.dist = nd;
                    s.heap.emplace(nd, a.target);
                }
            }
        }
        return std::nullopt;
    }

    void remove(std::uint32_t element) override {
        if (element >= inst_.node_count()) throw std::out_of_range("oracle element out of range");
        if (active_[element]) {
            active_[element] = false;
            --active_count_;
        }
    }

    bool active(std::uint32_t element) const override { return element < active_.size() && active_[element]; }
    std::uint64_t work() const override { return work_; }

private:
    struct State {
        Length dist;
        bool settled;
    };
    struct Search {
        // (distance, node): equal distances resolve to the smaller node id.
        std::priority_queue<std::pair<Length, NodeId>, std::vector<std::pair<Length, NodeId>>, std::greater<>> heap;
        std::unordered_map<NodeId, State> tentative;
    };

    const Instance& inst_;
    std::vector<bool> active_;
    std::size_t active_count_;
    std::vector<Search> searches_;
    std::uint64_t work_ = 0;
};

}  // namespace

std::unique_ptr<DnnOracle> truncated_dijkstra_oracle(const Instance& inst, Side side) {
    return std::make_unique<TruncatedDijkstraOracle>(inst, side);
}

std::unique_ptr<DnnOracle> incremental_oracle(const Instance& inst, Side side) {
    if (side == Side::center) return std::make_unique<VoronoiCenterOracle>(inst);
    return std::make_unique<ResumableNodeOracle>(inst);
}

OracleFactory truncated_dijkstra_factory() { return truncated_dijkstra_oracle; }
OracleFactory incremental_factory() { return incremental_oracle; }

}  // namespace stabledist
