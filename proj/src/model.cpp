#include "stabledist/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace stabledist {

MemoryRefusal::MemoryRefusal(std::string algorithm, std::uint64_t needed, std::uint64_t cap)
    : std::runtime_error(algorithm + " needs ~" + std::to_string(needed) + " bytes, above the memory cap of " +
                         std::to_string(cap) + " bytes"),
      needed_(needed),
      cap_(cap) {}

void MemoryBudget::require(const std::string& algorithm, std::uint64_t needed) const {
    if (needed > bytes) throw MemoryRefusal(algorithm, needed, bytes);
}

std::strong_ordering score_cmp(const Score& a, const Score& b) noexcept {
    if (a.dist < b.dist) return std::strong_ordering::less;
    if (b.dist < a.dist) return std::strong_ordering::greater;
    if (auto c = a.node <=> b.node; c != 0) return c;
    return a.center <=> b.center;
}

Instance::Instance(std::shared_ptr<const RoadGraph> graph, std::vector<NodeId> centers,
                   std::vector<std::size_t> quotas)
    : graph_(std::move(graph)), centers_(std::move(centers)), quotas_(std::move(quotas)) {
    if (!graph_ || graph_->node_count() == 0) throw InfeasibleInstance("empty graph");
    const std::size_t n = graph_->node_count();
    if (centers_.empty()) throw InfeasibleInstance("no centers given");
    if (quotas_.size() != centers_.size()) {
        throw InfeasibleInstance(std::to_string(quotas_.size()) + " quotas given for " +
                                 std::to_string(centers_.size()) + " centers");
    }
    std::vector<bool> seen(n, false);
    for (NodeId c : centers_) {
        if (c >= n) throw InfeasibleInstance("center " + std::to_string(c) + " out of range");
        if (seen[c]) throw InfeasibleInstance("center node " + std::to_string(graph_->original_id(c)) + " repeated");
        seen[c] = true;
    }
    for (std::size_t q : quotas_) {
        if (q == 0) throw InfeasibleInstance("quotas must be positive");
    }
    const std::size_t total = std::accumulate(quotas_.begin(), quotas_.end(), std::size_t{0});
    if (total != n) {
        const std::string gap = total < n ? std::to_string(n - total) + " short of" : std::to_string(total - n) + " over";
        throw InfeasibleInstance("quota sum " + std::to_string(total) + " is " + gap + " n=" + std::to_string(n));
    }
    if (!is_connected(*graph_)) throw InfeasibleInstance("graph is not connected");
}

Instance Instance::with_equal_quotas(std::shared_ptr<const RoadGraph> graph, std::vector<NodeId> centers) {
    const std::size_t n = graph ? graph->node_count() : 0;
    const std::size_t k = centers.size();
    if (k == 0 || k > n) throw InfeasibleInstance("need 1 <= k <= n centers");
    return Instance(std::move(graph), std::move(centers), equal_quotas(n, k));
}

std::vector<std::size_t> equal_quotas(std::size_t n, std::size_t k) {
    if (k == 0 || k > n) throw std::invalid_argument("equal_quotas: need 1 <= k <= n");
    std::vector<std::size_t> q(k, n / k);
    for (std::size_t i = 0; i < n % k; ++i) ++q[i];
    return q;
}

std::vector<DistRow> center_distances(const Instance& inst) {
    std::vector<DistRow> rows;
    rows.reserve(inst.center_count());
    for (NodeId c : inst.centers()) rows.push_back(dijkstra(inst.graph(), c));
    return rows;
}

std::string StabilityVerdict::describe(const Instance& inst) const {
    const auto& g = inst.graph();
    std::ostringstream out;
    switch (kind) {
        case Kind::stable:
            out << "STABLE";
            break;
        case Kind::quota_violation:
            out << "quota violation: center " << g.original_id(inst.center_node(center)) << " has " << actual
                << " nodes, quota " << expected;
            break;
        case Kind::blocking_pair:
            out << "blocking pair: node " << g.original_id(node) << " and center "
                << g.original_id(inst.center_node(center)) << " at distance " << format_length(pair.dist)
                << "; node is assigned to center " << g.original_id(inst.center_node(current.center))
                << " at distance " << format_length(current.dist) << "; center's farthest member is node "
                << g.original_id(worst.node) << " at distance " << format_length(worst.dist);
            break;
    }
    return out.str();
}

StabilityVerdict verify_stable(const Instance& inst, const Assignment& a, std::span<const DistRow> dists) {
    const std::size_t n = inst.node_count();
    const std::size_t k = inst.center_count();
    if (a.match.size() != n) throw std::invalid_argument("assignment size does not match node count");
    if (dists.size() != k) throw std::invalid_argument("need one distance row per center");
    for (std::size_t c = 0; c < k; ++c) {
        if (dists[c].dist.size() != n || dists[c].source != inst.center_node(static_cast<CenterIndex>(c))) {
            throw std::invalid_argument("distance row does not belong to center " + std::to_string(c));
        }
    }

    StabilityVerdict verdict;
    std::vector<std::size_t> count(k, 0);
    for (CenterIndex m : a.match) {
        if (m >= k) throw std::invalid_argument("assignment references center index " + std::to_string(m));
        ++count[m];
    }
    for (CenterIndex c = 0; c < k; ++c) {
        if (count[c] != inst.quota(c)) {
            verdict.kind = StabilityVerdict::Kind::quota_violation;
            verdict.center = c;
            verdict.expected = inst.quota(c);
            verdict.actual = count[c];
            return verdict;
        }
    }

    auto score = [&](NodeId u, CenterIndex c) { return Score{dists[c].dist[u], u, c}; };

    std::vector<Score> worst(k);
    std::vector<bool> has_member(k, false);
    for (NodeId u = 0; u < n; ++u) {
        const CenterIndex c = a.match[u];
        const Score s = score(u, c);
        if (!has_member[c] || worst[c] < s) worst[c] = s;
        has_member[c] = true;
    }

    bool found = false;
    for (NodeId u = 0; u < n; ++u) {
        const Score own = score(u, a.match[u]);
        for (CenterIndex c = 0; c < k; ++c) {
            if (c == a.match[u]) continue;
            const Score s = score(u, c);
            if (s < own && s < worst[c] && (!found || s < verdict.pair)) {
                found = true;
                verdict.kind = StabilityVerdict::Kind::blocking_pair;
                verdict.node = u;
                verdict.center = c;
                verdict.pair = s;
                verdict.current = own;
                verdict.worst = worst[c];
            }
        }
    }
    return verdict;
}

StabilityVerdict verify_stable(const Instance& inst, const Assignment& a) {
    const auto rows = center_distances(inst);
    return verify_stable(inst, a, rows);
}

std::string assignment_digest(const Assignment& a) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (CenterIndex m : a.match) {
        for (int byte = 0; byte < 4; ++byte) {
            h ^= (m >> (8 * byte)) & 0xFFu;
            h *= 0x100000001B3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_assignment_tsv(std::ostream& out, const Instance& inst, const Assignment& a) {
    const auto& g = inst.graph();
    out << "node_original_id\tcenter_original_id\tdistance\n";
    for (NodeId u = 0; u < a.match.size(); ++u) {
        out << g.original_id(u) << '\t' << g.original_id(inst.center_node(a.match[u])) << '\t'
            << format_length(a.dist[u]) << '\n';
    }
}

std::vector<AssignmentRow> read_assignment_tsv(std::istream& in) {
    std::vector<AssignmentRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("node_original_id", 0) == 0) continue;
        std::istringstream fields(line);
        AssignmentRow row{};
        std::string extra;
        if (!(fields >> row.node_original_id >> row.center_original_id >> row.dist) || (fields >> extra)) {
            throw ParseError(lineno, "malformed assignment row");
        }
        rows.push_back(row);
    }
    return rows;
}

Assignment assignment_from_rows(const Instance& inst, std::span<const AssignmentRow> rows) {
    const auto& g = inst.graph();
    const std::size_t n = inst.node_count();
    std::unordered_map<std::int64_t, CenterIndex> center_of;
    for (CenterIndex c = 0; c < inst.center_count(); ++c) center_of[g.original_id(inst.center_node(c))] = c;

    Assignment a{std::vector<CenterIndex>(n, 0), std::vector<Length>(n, 0)};
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto u = g.find_original(row.node_original_id);
        if (!u) throw ParseError(i + 2, "node " + std::to_string(row.node_original_id) + " is not in the graph");
        if (seen[*u]) throw ParseError(i + 2, "node " + std::to_string(row.node_original_id) + " assigned twice");
        const auto c = center_of.find(row.center_original_id);
        if (c == center_of.end()) {
            throw ParseError(i + 2, "node " + std::to_string(row.center_original_id) + " is not a center");
        }
        seen[*u] = true;
        a.match[*u] = c->second;
        a.dist[*u] = row.dist;
    }
    if (rows.size() != n) {
        throw ParseError(0, "assignment covers " + std::to_string(rows.size()) + " of " + std::to_string(n) + " nodes");
    }
    return a;
}

void write_summary_json(std::ostream& out, const Instance& inst, const Assignment& a, const std::string& algorithm) {
    using nlohmann::ordered_json;
    const auto& g = inst.graph();
    const std::size_t k = inst.center_count();
    std::vector<std::size_t> members(k, 0);
    std::vector<Length> max_d(k, 0), sum_d(k, 0);
    for (NodeId u = 0; u < a.match.size(); ++u) {
        const CenterIndex c = a.match[u];
        ++members[c];
        max_d[c] = std::max(max_d[c], a.dist[u]);
        sum_d[c] += a.dist[u];
    }

    ordered_json centers = ordered_json::array();
    for (CenterIndex c = 0; c < k; ++c) {
        centers.push_back({{"center", g.original_id(inst.center_node(c))},
                           {"quota", inst.quota(c)},
                           {"members", members[c]},
                           {"max_distance", max_d[c]},
                           {"mean_distance", members[c] ? sum_d[c] / static_cast<double>(members[c]) : 0.0}});
    }
    const Length total = std::accumulate(sum_d.begin(), sum_d.end(), Length{0});
    ordered_json doc = {{"algorithm", algorithm},
                        {"n", inst.node_count()},
                        {"m", g.edge_count()},
                        {"k", k},
                        {"max_distance", a.dist.empty() ? 0.0 : *std::max_element(a.dist.begin(), a.dist.end())},
                        {"mean_distance", a.dist.empty() ? 0.0 : total / static_cast<double>(a.dist.size())},
                        {"digest", assignment_digest(a)},
                        {"centers", std::move(centers)}};
    out << doc.dump(2) << '\n';
}

}  // namespace stabledist
