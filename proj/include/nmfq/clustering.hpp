// Soft and hard cluster types, support computation, and the multiset
// algebra on clusterings (union, symmetric difference, relabeling).

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nmfq/graph.hpp"

namespace nmfq {

// A soft cluster stores strictly positive membership coefficients only;
// an absent node has coefficient zero. `w` is the second membership map
// used by the two-sided factorization; `precision` is the per-cluster
// inverse-variance parameter carried by the ARD objective.
struct SoftCluster {
    std::map<int, double> h;
    std::optional<std::map<int, double>> w;
    std::optional<double> precision;

    friend bool operator==(const SoftCluster&, const SoftCluster&) = default;
};

// Multiset of clusters; duplicates are allowed and never collapsed.
using Clustering = std::vector<SoftCluster>;

inline SoftCluster make_cluster(std::map<int, double> h) {
    for (auto& [node, coeff] : h)
        if (coeff <= 0) throw std::invalid_argument("SoftCluster: coefficients must be positive");
    SoftCluster c;
    c.h = std::move(h);
    return c;
}

// Binary cluster over a node set, h = 1 on every member.
inline SoftCluster unit_cluster(const NodeSet& nodes) {
    SoftCluster c;
    for (int i : nodes) c.h[i] = 1.0;
    return c;
}

inline NodeSet support(const SoftCluster& c) {
    NodeSet out;
    for (const auto& [node, coeff] : c.h) out.push_back(node);
    if (c.w) {
        for (const auto& [node, coeff] : *c.w) out.push_back(node);
        out = sorted_node_set(std::move(out));
    }
    return out;
}

inline NodeSet clustering_support(const Clustering& cs) {
    NodeSet out;
    for (const auto& c : cs) {
        NodeSet s = support(c);
        out.insert(out.end(), s.begin(), s.end());
    }
    return sorted_node_set(std::move(out));
}

// Multiset union = concatenation.
inline Clustering clustering_union(const Clustering& a, const Clustering& b) {
    Clustering out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Multiset symmetric difference under exact structural equality.
inline Clustering symmetric_difference(const Clustering& a, const Clustering& b) {
    Clustering rest = b;
    Clustering out;
    for (const auto& c : a) {
        bool matched = false;
        for (size_t i = 0; i < rest.size(); ++i) {
            if (rest[i] == c) {
                rest.erase(rest.begin() + static_cast<long>(i));
                matched = true;
                break;
            }
        }
        if (!matched) out.push_back(c);
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

// Relabel every node index by +shift.
inline Clustering embed(const Clustering& cs, int shift) {
    Clustering out;
    out.reserve(cs.size());
    for (const auto& c : cs) {
        SoftCluster e;
        for (const auto& [node, coeff] : c.h) e.h[node + shift] = coeff;
        if (c.w) {
            e.w.emplace();
            for (const auto& [node, coeff] : *c.w) (*e.w)[node + shift] = coeff;
        }
        e.precision = c.precision;
        out.push_back(std::move(e));
    }
    return out;
}

// Total assignment of every node to one cluster id.
struct HardClustering {
    std::vector<int> assignment;

    int num_nodes() const { return static_cast<int>(assignment.size()); }
    int num_clusters() const {
        int k = 0;
        for (int c : assignment) k = std::max(k, c + 1);
        return k;
    }
    friend bool operator==(const HardClustering&, const HardClustering&) = default;
    friend auto operator<=>(const HardClustering&, const HardClustering&) = default;
};

// Binary membership encoding of a partition (h = 1 on each block).
inline Clustering to_clustering(const HardClustering& hc) {
    Clustering out(hc.num_clusters());
    for (int i = 0; i < hc.num_nodes(); ++i) out[hc.assignment[i]].h[i] = 1.0;
    return out;
}

// Assign each node to its largest-membership cluster; ties go to the
// lowest cluster index. Fails if some node has no positive membership.
// Cluster ids in the result are indices into `cs`.
inline HardClustering harden(const Clustering& cs, const Graph& g) {
    HardClustering out;
    out.assignment.assign(g.num_nodes(), -1);
    for (int i = 0; i < g.num_nodes(); ++i) {
        double best = 0.0;
        int best_c = -1;
        for (size_t c = 0; c < cs.size(); ++c) {
            auto it = cs[c].h.find(i);
            if (it == cs[c].h.end()) continue;
            if (best_c < 0 || it->second > best) {
                best = it->second;
                best_c = static_cast<int>(c);
            }
        }
        if (best_c < 0) throw std::invalid_argument("harden: node has no positive membership in any cluster");
        out.assignment[i] = best_c;
    }
    return out;
}

// First-seen renumbering, for comparing partitions regardless of labels.
inline HardClustering canonical(const HardClustering& hc) {
    HardClustering out = hc;
    std::map<int, int> remap;
    for (int& a : out.assignment) {
        auto [it, fresh] = remap.try_emplace(a, static_cast<int>(remap.size()));
        a = it->second;
    }
    return out;
}

// Drop coefficients below eps; used on optimizer output so that "support"
// is well defined on numeric results.
inline Clustering prune_clustering(const Clustering& cs, double eps = kSupportEps) {
    Clustering out;
    out.reserve(cs.size());
    for (const auto& c : cs) {
        SoftCluster p;
        for (const auto& [node, coeff] : c.h)
            if (coeff >= eps) p.h[node] = coeff;
        if (c.w) {
            p.w.emplace();
            for (const auto& [node, coeff] : *c.w)
                if (coeff >= eps) (*p.w)[node] = coeff;
        }
        p.precision = c.precision;
        out.push_back(std::move(p));
    }
    return out;
}

// A clustering whose clusters are binary, disjoint and cover every node
// can be read back as a partition. Cluster ids follow multiset order.
inline HardClustering as_partition(const Clustering& cs, const Graph& g) {
    HardClustering out;
    out.assignment.assign(g.num_nodes(), -1);
    for (size_t c = 0; c < cs.size(); ++c) {
        if (cs[c].w) throw std::invalid_argument("as_partition: two-sided cluster in a hard clustering");
        for (const auto& [node, coeff] : cs[c].h) {
            if (node < 0 || node >= g.num_nodes())
                throw std::invalid_argument("as_partition: node out of range");
            if (out.assignment[node] != -1)
                throw std::invalid_argument("as_partition: clusters overlap");
            out.assignment[node] = static_cast<int>(c);
        }
    }
    for (int a : out.assignment)
        if (a == -1) throw std::invalid_argument("as_partition: node not covered");
    return out;
}

}  // namespace nmfq
