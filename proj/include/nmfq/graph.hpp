// Graph type plus the deterministic and seeded generators used by the
// experiments: rings of cliques, overlapping cliques, the three-group
// counterexample graph, and random two-module graphs.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nmfq/common.hpp"

namespace nmfq {

// Sorted, strictly increasing node indices.
using NodeSet = std::vector<int>;

inline NodeSet sorted_node_set(std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

inline NodeSet node_set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool node_sets_intersect(const NodeSet& a, const NodeSet& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) return true;
        if (*ia < *ib) ++ia; else ++ib;
    }
    return false;
}

// Undirected weighted graph on nodes 0..n-1 with a dense symmetric
// non-negative weight matrix. Values are immutable after construction by
// convention; all generators return fresh graphs.
class Graph {
  public:
    Graph() = default;
    explicit Graph(int n) : n_(n), w_(n, n, 0.0) {
        if (n < 0) throw std::invalid_argument("Graph: negative node count");
    }

    int num_nodes() const { return n_; }
    double weight(int i, int j) const { return w_(i, j); }
    const Matrix& weights() const { return w_; }

    void set_weight(int i, int j, double v) {
        check_node(i);
        check_node(j);
        if (v < 0) throw std::invalid_argument("Graph: negative edge weight");
        w_(i, j) = v;
        w_(j, i) = v;
    }

    // i<j pairs with positive weight
    std::vector<std::pair<int, int>> positive_edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (w_(i, j) > 0) out.emplace_back(i, j);
        return out;
    }

    size_t num_positive_edges() const { return positive_edges().size(); }

    double total_squared_weight() const {  // sum over ordered pairs, diagonal included
        double s = 0.0;
        for (double x : w_.data()) s += x * x;
        return s;
    }

    friend bool operator==(const Graph& a, const Graph& b) = default;

  private:
    void check_node(int i) const {
        if (i < 0 || i >= n_) throw std::invalid_argument("Graph: node index out of range");
    }

    int n_ = 0;
    Matrix w_;
};

inline Graph empty_graph(int n) { return Graph(n); }

inline Graph complete_graph(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set_weight(i, j, 1.0);
    return g;
}

// Ring of `num_cliques` cliques of `clique_size` nodes. Clique k occupies
// nodes [k*m, (k+1)*m); the last node of clique k is joined to the first
// node of clique k+1 (mod num_cliques). A single clique gets no ring edge.
inline Graph ring_of_cliques(int num_cliques, int clique_size) {
    if (num_cliques < 1) throw std::invalid_argument("ring_of_cliques: need at least one clique");
    if (clique_size < 2) throw std::invalid_argument("ring_of_cliques: clique_size must be >= 2");
    const int m = clique_size;
    Graph g(num_cliques * m);
    for (int k = 0; k < num_cliques; ++k) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) g.set_weight(k * m + i, k * m + j, 1.0);
    }
    if (num_cliques > 1) {
        for (int k = 0; k < num_cliques; ++k) {
            int u = k * m + (m - 1);
            int v = ((k + 1) % num_cliques) * m;
            g.set_weight(u, v, 1.0);
        }
    }
    return g;
}

// Two cliques of `clique_size` nodes sharing exactly `overlap` nodes.
// Shared nodes come first: 0..overlap-1, then the exclusive nodes of each
// clique.
inline Graph overlapping_cliques(int clique_size, int overlap) {
    if (clique_size < 2) throw std::invalid_argument("overlapping_cliques: clique_size must be >= 2");
    if (overlap < 1 || overlap >= clique_size)
        throw std::invalid_argument("overlapping_cliques: overlap must be in [1, clique_size)");
    const int excl = clique_size - overlap;
    Graph g(overlap + 2 * excl);
    auto clique_nodes = [&](int which) {
        NodeSet nodes;
        for (int s = 0; s < overlap; ++s) nodes.push_back(s);
        for (int e = 0; e < excl; ++e) nodes.push_back(overlap + which * excl + e);
        return nodes;
    };
    for (int which = 0; which < 2; ++which) {
        NodeSet nodes = clique_nodes(which);
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j) g.set_weight(nodes[i], nodes[j], 1.0);
    }
    return g;
}

struct Figure1Graph {
    Graph graph;
    NodeSet gray;      // the subgraph kept when zooming in
    int disputed_node; // the node whose assignment flips
};

// 16-node counterexample: clique A (0-4), near-clique B (5-9, edge 5-6
// missing), bridge node 10, clique C (11-15). Node 4 of A is joined to
// nodes 5,6,7 of B; the bridge node touches 9 (in B) and 12 (in C).
// This exact edge list is part of the repository contract; see README.
inline Figure1Graph figure1_graph() {
    Figure1Graph out;
    Graph g(16);
    auto clique = [&](int lo) {
        for (int i = lo; i < lo + 5; ++i)
            for (int j = i + 1; j < lo + 5; ++j) g.set_weight(i, j, 1.0);
    };
    clique(0);    // A
    clique(5);    // B, then remove one edge to make it an almost-clique
    clique(11);   // C
    g.set_weight(5, 6, 0.0);
    g.set_weight(4, 5, 1.0);
    g.set_weight(4, 6, 1.0);
    g.set_weight(4, 7, 1.0);
    g.set_weight(9, 10, 1.0);
    g.set_weight(10, 12, 1.0);
    out.graph = std::move(g);
    out.gray = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    out.disputed_node = 10;
    return out;
}

// Two blocks of `nodes_per_module` nodes; exactly `within_edges` distinct
// unit edges sampled uniformly inside each block (independent samples) and
// `between_edges` distinct unit edges between blocks. Deterministic in the
// seed.
inline Graph two_modules(int nodes_per_module, int within_edges, int between_edges, uint64_t seed) {
    const int n = nodes_per_module;
    if (n < 1) throw std::invalid_argument("two_modules: nodes_per_module must be positive");
    const long long within_cap = static_cast<long long>(n) * (n - 1) / 2;
    const long long between_cap = static_cast<long long>(n) * n;
    if (within_edges < 0 || within_edges > within_cap)
        throw std::invalid_argument("two_modules: within_edges exceeds capacity");
    if (between_edges < 0 || between_edges > between_cap)
        throw std::invalid_argument("two_modules: between_edges exceeds capacity");

    Graph g(2 * n);
    auto sample_pairs = [](std::vector<std::pair<int, int>>& pool, int k, Rng& rng) {
        // partial Fisher-Yates: the first k entries are the sample
        for (int i = 0; i < k; ++i) {
            int j = i + rng.next_below(static_cast<int>(pool.size()) - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
    };
    for (int block = 0; block < 2; ++block) {
        std::vector<std::pair<int, int>> pool;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pool.emplace_back(block * n + i, block * n + j);
        Rng rng(derive_seed(seed, 100 + block));
        sample_pairs(pool, within_edges, rng);
        for (auto [u, v] : pool) g.set_weight(u, v, 1.0);
    }
    {
        std::vector<std::pair<int, int>> pool;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) pool.emplace_back(i, n + j);
        Rng rng(derive_seed(seed, 200));
        sample_pairs(pool, between_edges, rng);
        for (auto [u, v] : pool) g.set_weight(u, v, 1.0);
    }
    return g;
}

// Block-diagonal union; nodes of g2 are shifted by g1.num_nodes().
inline Graph disjoint_union(const Graph& g1, const Graph& g2) {
    const int n1 = g1.num_nodes();
    const int n2 = g2.num_nodes();
    Graph g(n1 + n2);
    for (int i = 0; i < n1; ++i)
        for (int j = i + 1; j < n1; ++j)
            if (g1.weight(i, j) > 0) g.set_weight(i, j, g1.weight(i, j));
    for (int i = 0; i < n2; ++i)
        for (int j = i + 1; j < n2; ++j)
            if (g2.weight(i, j) > 0) g.set_weight(n1 + i, n1 + j, g2.weight(i, j));
    return g;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<int> to_parent;  // local index -> node in the parent graph
};

// Restriction of g to the nodes in s; keeps the relabeling map so
// clusterings can be carried between the graph and the subgraph.
inline InducedSubgraph induced_subgraph(const Graph& g, const NodeSet& s) {
    InducedSubgraph out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= g.num_nodes())
            throw std::invalid_argument("induced_subgraph: node index out of range");
        if (i > 0 && s[i] <= s[i - 1])
            throw std::invalid_argument("induced_subgraph: node set must be strictly increasing");
    }
    out.graph = Graph(static_cast<int>(s.size()));
    out.to_parent.assign(s.begin(), s.end());
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (g.weight(s[i], s[j]) > 0) out.graph.set_weight(static_cast<int>(i), static_cast<int>(j), g.weight(s[i], s[j]));
    return out;
}

}  // namespace nmfq
