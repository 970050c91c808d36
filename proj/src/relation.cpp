#include "msckit/relation.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace msckit {

std::size_t RelationGraph::edge_count() const {
    std::size_t c = 0;
    for (const auto& r : rows_) c += r.count();
    return c;
}

std::vector<std::pair<int, int>> RelationGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t a = 0; a < rows_.size(); ++a)
        for (auto b = rows_[a].find_first(); b != Row::npos; b = rows_[a].find_next(b))
            out.emplace_back(static_cast<int>(a), static_cast<int>(b));
    return out;
}

RelationGraph& RelationGraph::unite(const RelationGraph& other) {
    if (other.size() != size()) throw std::invalid_argument("relation size mismatch");
    for (std::size_t a = 0; a < rows_.size(); ++a) rows_[a] |= other.rows_[a];
    return *this;
}

bool RelationGraph::subset_of(const RelationGraph& other) const {
    if (other.size() != size()) throw std::invalid_argument("relation size mismatch");
    for (std::size_t a = 0; a < rows_.size(); ++a)
        if (!rows_[a].is_subset_of(other.rows_[a])) return false;
    return true;
}

std::vector<std::pair<int, int>> RelationGraph::difference(const RelationGraph& other) const {
    std::vector<std::pair<int, int>> out;
    for (auto [a, b] : edges())
        if (!other.has(a, b)) out.emplace_back(a, b);
    return out;
}

RelationGraph transitive_closure(const RelationGraph& r, bool reflexive) {
    // Warshall on bit rows: if i reaches k, i inherits k's successors.
    const std::size_t n = r.size();
    std::vector<RelationGraph::Row> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = r.successors(static_cast<int>(i));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (rows[i].test(k)) rows[i] |= rows[k];
    RelationGraph out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j = rows[i].find_first(); j != RelationGraph::Row::npos; j = rows[i].find_next(j))
            out.add(static_cast<int>(i), static_cast<int>(j));
        if (reflexive) out.add(static_cast<int>(i), static_cast<int>(i));
    }
    return out;
}

AcyclicityResult is_acyclic(const RelationGraph& r) {
    const int n = static_cast<int>(r.size());
    AcyclicityResult res;
    // shortest cycle: BFS from every node back to itself
    for (int s = 0; s < n; ++s) {
        if (r.has(s, s)) {
            res.acyclic = false;
            res.cycle = {s};
            return res;
        }
    }
    std::vector<int> best;
    for (int s = 0; s < n; ++s) {
        std::vector<int> parent(n, -1);
        std::vector<int> dist(n, -1);
        std::deque<int> q;
        dist[s] = 0;
        q.push_back(s);
        int closing = -1;
        while (!q.empty() && closing < 0) {
            int u = q.front();
            q.pop_front();
            if (!best.empty() && dist[u] + 1 >= static_cast<int>(best.size())) break;
            const auto& row = r.successors(u);
            for (auto v = row.find_first(); v != RelationGraph::Row::npos; v = row.find_next(v)) {
                int w = static_cast<int>(v);
                if (w == s) {
                    closing = u;
                    break;
                }
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                }
            }
        }
        if (closing < 0) continue;
        std::vector<int> cyc;
        for (int v = closing; v != -1; v = parent[v]) cyc.push_back(v);
        std::reverse(cyc.begin(), cyc.end());
        if (best.empty() || cyc.size() < best.size()) best = cyc;
    }
    if (!best.empty()) {
        res.acyclic = false;
        res.cycle = best;
    }
    return res;
}

std::optional<std::vector<int>> topological_order(const RelationGraph& r) {
    const int n = static_cast<int>(r.size());
    std::vector<int> indeg(n, 0);
    for (auto [a, b] : r.edges()) ++indeg[b];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<int> out;
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        out.push_back(u);
        const auto& row = r.successors(u);
        for (auto v = row.find_first(); v != RelationGraph::Row::npos; v = row.find_next(v))
            if (--indeg[v] == 0) ready.push(static_cast<int>(v));
    }
    if (static_cast<int>(out.size()) != n) return std::nullopt;
    return out;
}

}  // namespace msckit
