#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace msckit {

// Finite binary relation over 0..n-1, stored as successor bitsets.
class RelationGraph {
public:
    using Row = boost::dynamic_bitset<>;

    RelationGraph() = default;
    explicit RelationGraph(std::size_t n) : rows_(n, Row(n)) {}

    std::size_t size() const { return rows_.size(); }
    void add(int a, int b) { rows_.at(a).set(b); }
    void remove(int a, int b) { rows_.at(a).reset(b); }
    bool has(int a, int b) const { return rows_.at(a).test(b); }
    const Row& successors(int a) const { return rows_.at(a); }

    std::size_t edge_count() const;
    std::vector<std::pair<int, int>> edges() const;
    RelationGraph& unite(const RelationGraph& other);
    bool subset_of(const RelationGraph& other) const;
    // edges of this not in other
    std::vector<std::pair<int, int>> difference(const RelationGraph& other) const;

    friend bool operator==(const RelationGraph& a, const RelationGraph& b) { return a.rows_ == b.rows_; }

private:
    std::vector<Row> rows_;
};

RelationGraph transitive_closure(const RelationGraph& r, bool reflexive = false);

struct AcyclicityResult {
    bool acyclic = true;
    // e0 e1 ... ek with (ei, ei+1) edges and (ek, e0) an edge; shortest possible
    std::vector<int> cycle;
};

AcyclicityResult is_acyclic(const RelationGraph& r);

// Kahn's algorithm, smallest available node first. Empty optional on a cycle.
std::optional<std::vector<int>> topological_order(const RelationGraph& r);

}  // namespace msckit
