// Mechanical checkers for the locality-style properties: locality of a
// quality function on a concrete instance, equality of quality
// differences for additively decomposable functions, resolution-limit-
// freeness by exhaustive search, fixed-cluster-count variants, and the
// two scripted counterexample verifications.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmfq/clustering.hpp"
#include "nmfq/graph.hpp"
#include "nmfq/optimize.hpp"
#include "nmfq/quality.hpp"

namespace nmfq {

// Instance preconditions are checked separately from verdicts: a bad
// instance is a caller error, not a locality violation.
struct MalformedInstance : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two graphs with a common subgraph, clusterings of the two graphs, and a
// pair of alternative clusterings of the common part. The common part is
// given by its embeddings into both graphs; d and d_alt use local indices
// 0..|GS|-1.
struct LocalityInstance {
    Graph g1, g2;
    NodeSet gs_in_g1, gs_in_g2;
    Clustering c1, c2;     // in g1 / g2 coordinates
    Clustering d, d_alt;   // in common-subgraph coordinates
};

namespace detail {

inline Clustering map_clustering(const Clustering& cs, const std::vector<int>& node_map) {
    Clustering out;
    out.reserve(cs.size());
    for (const auto& c : cs) {
        SoftCluster mc;
        for (const auto& [node, coeff] : c.h) mc.h[node_map.at(node)] = coeff;
        if (c.w) {
            mc.w.emplace();
            for (const auto& [node, coeff] : *c.w) (*mc.w)[node_map.at(node)] = coeff;
        }
        mc.precision = c.precision;
        out.push_back(std::move(mc));
    }
    return out;
}

// node -> shared id: common-subgraph position for embedded nodes,
// disjoint ranges for the graphs' own nodes.
inline std::vector<int> common_ids(const Graph& g, const NodeSet& gs_nodes, int own_base) {
    std::vector<int> map(g.num_nodes());
    for (int v = 0; v < g.num_nodes(); ++v) map[v] = own_base + v;
    for (size_t p = 0; p < gs_nodes.size(); ++p) map[gs_nodes[p]] = static_cast<int>(p);
    return map;
}

}  // namespace detail

inline void validate_instance(const LocalityInstance& inst) {
    const size_t s = inst.gs_in_g1.size();
    if (inst.gs_in_g2.size() != s) throw MalformedInstance("locality instance: embedding sizes differ");
    auto check_embedding = [&](const NodeSet& e, const Graph& g) {
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] < 0 || e[i] >= g.num_nodes())
                throw MalformedInstance("locality instance: embedded node out of range");
            if (i > 0 && e[i] <= e[i - 1])
                throw MalformedInstance("locality instance: embeddings must be strictly increasing");
        }
    };
    check_embedding(inst.gs_in_g1, inst.g1);
    check_embedding(inst.gs_in_g2, inst.g2);
    for (size_t i = 0; i < s; ++i)
        for (size_t j = 0; j < s; ++j)
            if (inst.g1.weight(inst.gs_in_g1[i], inst.gs_in_g1[j]) !=
                inst.g2.weight(inst.gs_in_g2[i], inst.gs_in_g2[j]))
                throw MalformedInstance("locality instance: the two embeddings induce different subgraphs");
    for (const Clustering* dc : {&inst.d, &inst.d_alt})
        for (const auto& c : *dc)
            for (int v : support(c))
                if (v < 0 || v >= static_cast<int>(s))
                    throw MalformedInstance("locality instance: d/d_alt node outside the common subgraph");

    // precondition of the locality definition:
    // support(c1 sym-diff c2) and support(d union d_alt) must be disjoint
    const int base1 = static_cast<int>(s);
    const int base2 = static_cast<int>(s) + inst.g1.num_nodes();
    Clustering m1 = detail::map_clustering(inst.c1, detail::common_ids(inst.g1, inst.gs_in_g1, base1));
    Clustering m2 = detail::map_clustering(inst.c2, detail::common_ids(inst.g2, inst.gs_in_g2, base2));
    NodeSet changed = clustering_support(symmetric_difference(m1, m2));
    NodeSet fixed = clustering_support(clustering_union(inst.d, inst.d_alt));
    if (node_sets_intersect(changed, fixed))
        throw MalformedInstance("locality instance: changing clusters overlap support(d union d_alt)");
}

struct LocalityVerdict {
    bool holds = true;
    // q(g1, c1+d), q(g1, c1+d_alt), q(g2, c2+d), q(g2, c2+d_alt)
    double q1_d = 0, q1_alt = 0, q2_d = 0, q2_alt = 0;
};

namespace detail {

// Trichotomy with a tiny relative tolerance: qualities within rounding
// noise of each other count as tied, so exact mathematical ties cannot
// flip the biconditional through the last bits of the sums.
inline int cmp_sign(double a, double b) {
    if (a == b) return 0;
    if (std::isinf(a) || std::isinf(b)) return (a > b) - (a < b);
    double tol = 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    if (std::fabs(a - b) <= tol) return 0;
    return (a > b) - (a < b);
}

inline std::array<double, 4> four_qualities(const QualitySpec& spec, const LocalityInstance& inst) {
    std::vector<int> to_g1(inst.gs_in_g1.begin(), inst.gs_in_g1.end());
    std::vector<int> to_g2(inst.gs_in_g2.begin(), inst.gs_in_g2.end());
    Clustering d1 = map_clustering(inst.d, to_g1);
    Clustering a1 = map_clustering(inst.d_alt, to_g1);
    Clustering d2 = map_clustering(inst.d, to_g2);
    Clustering a2 = map_clustering(inst.d_alt, to_g2);
    return {evaluate(spec, inst.g1, clustering_union(inst.c1, d1)),
            evaluate(spec, inst.g1, clustering_union(inst.c1, a1)),
            evaluate(spec, inst.g2, clustering_union(inst.c2, d2)),
            evaluate(spec, inst.g2, clustering_union(inst.c2, a2))};
}

}  // namespace detail

// Does "d at least as good as d_alt" agree between the two graphs?
inline LocalityVerdict check_locality(const QualitySpec& spec, const LocalityInstance& inst) {
    validate_instance(inst);
    auto [q1d, q1a, q2d, q2a] = detail::four_qualities(spec, inst);
    LocalityVerdict v{true, q1d, q1a, q2d, q2a};
    v.holds = detail::cmp_sign(q1d, q1a) == detail::cmp_sign(q2d, q2a);
    return v;
}

struct DifferenceVerdict {
    bool equal = true;
    double diff1 = 0, diff2 = 0;
    double q1_d = 0, q1_alt = 0, q2_d = 0, q2_alt = 0;
};

// For additively decomposable quality functions the two differences are
// equal exactly; checked to 1e-9 relative.
inline DifferenceVerdict check_additive_difference(const QualitySpec& spec, const LocalityInstance& inst,
                                                   double rel_tol = 1e-9) {
    validate_instance(inst);
    auto [q1d, q1a, q2d, q2a] = detail::four_qualities(spec, inst);
    DifferenceVerdict v;
    v.q1_d = q1d;
    v.q1_alt = q1a;
    v.q2_d = q2d;
    v.q2_alt = q2a;
    v.diff1 = q1d - q1a;
    v.diff2 = q2d - q2a;
    if (std::isfinite(v.diff1) && std::isfinite(v.diff2)) {
        v.equal = std::fabs(v.diff1 - v.diff2) <=
                  rel_tol * std::max({1.0, std::fabs(v.diff1), std::fabs(v.diff2)});
    } else {
        // same infinite sign pattern counts as equal
        v.equal = detail::cmp_sign(q1d, q1a) == detail::cmp_sign(q2d, q2a) &&
                  std::isinf(v.diff1) == std::isinf(v.diff2);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Resolution-limit-freeness on one graph, by exhaustive search

struct RlfVerdict {
    bool holds = true;
    // on violation: the optimal partition, the subset of it, and the best
    // quality the subset achieves vs the optimum on the induced subgraph
    std::optional<HardClustering> witness_optimal;
    std::optional<Clustering> witness_subset;
    double witness_quality = 0, witness_best = 0;
};

// For every q-optimal partition C and every proper nonempty subset D of
// its clusters, D must be among the optimal partitions of the subgraph
// induced by support(D). Ties are handled by using the full argmax set.
inline RlfVerdict check_rlf_instance(const QualitySpec& spec, const Graph& g, int max_n = 10) {
    if (max_n > 10) throw std::invalid_argument("check_rlf_instance: max_n capped at 10");
    if (g.num_nodes() > max_n) throw std::invalid_argument("check_rlf_instance: graph too large");
    std::vector<HardClustering> optima = exhaustive_hard_optimum(g, spec);
    for (const HardClustering& hc : optima) {
        Clustering blocks = to_clustering(hc);
        const size_t k = blocks.size();
        if (k < 2) continue;  // no proper nonempty subsets to test
        for (uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
            Clustering subset;
            for (size_t c = 0; c < k; ++c)
                if (mask & (1u << c)) subset.push_back(blocks[c]);
            NodeSet supp = clustering_support(subset);
            InducedSubgraph sub = induced_subgraph(g, supp);
            std::vector<int> to_local(g.num_nodes(), -1);
            for (size_t p = 0; p < sub.to_parent.size(); ++p) to_local[sub.to_parent[p]] = static_cast<int>(p);
            Clustering local = detail::map_clustering(subset, to_local);
            HardClustering d_hard = canonical(as_partition(local, sub.graph));
            std::vector<HardClustering> sub_optima = exhaustive_hard_optimum(sub.graph, spec);
            bool member = false;
            for (const HardClustering& opt : sub_optima)
                if (canonical(opt) == d_hard) {
                    member = true;
                    break;
                }
            if (!member) {
                RlfVerdict v;
                v.holds = false;
                v.witness_optimal = hc;
                v.witness_subset = subset;
                v.witness_quality = evaluate_hard(spec, sub.graph, d_hard);
                v.witness_best = evaluate_hard(spec, sub.graph, sub_optima.front());
                return v;
            }
        }
    }
    return RlfVerdict{};
}

// ---------------------------------------------------------------------------
// Fixed cluster count

// With per-side bookkeeping (no global_k) this is the fixed-size locality
// definition: each evaluation is constrained to its own declared count,
// which always matches, so it reduces to plain locality. With global_k
// set, the count restriction is encoded inside the quality function
// (q = -inf unless |C| = k); that encoding is the one that breaks
// locality.
inline LocalityVerdict check_fixed_size_locality(const QualitySpec& spec, const LocalityInstance& inst,
                                                 int k1, int k2, int m, int m_alt,
                                                 std::optional<int> global_k = std::nullopt) {
    validate_instance(inst);
    if (k1 != static_cast<int>(inst.c1.size()) || k2 != static_cast<int>(inst.c2.size()) ||
        m != static_cast<int>(inst.d.size()) || m_alt != static_cast<int>(inst.d_alt.size()))
        throw std::invalid_argument("check_fixed_size_locality: declared cluster counts do not match the clusterings");
    auto [q1d, q1a, q2d, q2a] = detail::four_qualities(spec, inst);
    if (global_k) {
        if (k1 + m != *global_k) q1d = kNegInf;
        if (k1 + m_alt != *global_k) q1a = kNegInf;
        if (k2 + m != *global_k) q2d = kNegInf;
        if (k2 + m_alt != *global_k) q2a = kNegInf;
    }
    LocalityVerdict v{true, q1d, q1a, q2d, q2a};
    v.holds = detail::cmp_sign(q1d, q1a) == detail::cmp_sign(q2d, q2a);
    return v;
}

// ---------------------------------------------------------------------------
// Hard-clustering identity: the symmetric Euclidean objective restricted
// to partitions equals the Potts objective at gamma = 1/2 up to the
// clustering-independent constant -1/2 sum a_ij^2, so their argmax sets
// over partitions coincide.

struct Theorem1Report {
    int graphs = 0;
    double max_abs_error = 0.0;     // worst |(q_hard - q_cpm) - constant|
    bool argmax_sets_match = true;
    bool ok = false;
};

inline Theorem1Report verify_theorem1(int num_graphs, int max_nodes, uint64_t seed,
                                      double tol = 1e-9) {
    Theorem1Report rep;
    Rng rng(derive_seed(seed, 0x7431u));
    for (int t = 0; t < num_graphs; ++t) {
        int n = 2 + rng.next_below(max_nodes - 1);
        Graph g(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.next_unit() < 0.7) g.set_weight(i, j, rng.next_unit());
        const double constant = -0.5 * g.total_squared_weight();
        CpmParams half{0.5};
        for_each_partition(n, [&](const HardClustering& hc) {
            double lhs = q_sym_nmf_hard(g, hc) - q_cpm(g, hc, half);
            rep.max_abs_error = std::max(rep.max_abs_error, std::fabs(lhs - constant));
        });
        std::vector<HardClustering> a = exhaustive_hard_optimum(g, SymNmfHardParams{});
        std::vector<HardClustering> b = exhaustive_hard_optimum(g, half);
        if (a != b) rep.argmax_sets_match = false;
        ++rep.graphs;
    }
    rep.ok = rep.argmax_sets_match && rep.max_abs_error <= tol;
    return rep;
}

inline nlohmann::json to_json(const Theorem1Report& r) {
    return {{"graphs", r.graphs},
            {"max_abs_error", r.max_abs_error},
            {"argmax_sets_match", r.argmax_sets_match},
            {"ok", r.ok}};
}

// ---------------------------------------------------------------------------
// Fixed counterexample instances

// Seven and six isolated nodes; the max+min cluster-size quality prefers
// different clusterings of the shared six nodes depending on the extra
// node. Qualities are exactly 5, 4, 5, 6.
inline LocalityInstance theorem3_instance() {
    LocalityInstance inst;
    inst.g1 = empty_graph(7);
    inst.g2 = empty_graph(6);
    inst.gs_in_g1 = {0, 1, 2, 3, 4, 5};
    inst.gs_in_g2 = {0, 1, 2, 3, 4, 5};
    inst.d = {unit_cluster({0, 1, 2, 3}), unit_cluster({4}), unit_cluster({5})};
    inst.d_alt = {unit_cluster({0, 1, 2}), unit_cluster({3, 4, 5})};
    inst.c1 = {unit_cluster({6})};
    inst.c2 = {};
    return inst;
}

// ---------------------------------------------------------------------------
// ARD counterexample

struct Theorem4Report {
    // single ring: one cluster per clique (plus the nodes the connecting
    // edges reach into) vs five two-clique clusters padded with five
    // empty clusters; double ring: two copies of each
    double q_single_separate = 0, q_single_merged = 0;
    double q_double_separate = 0, q_double_merged = 0;
    bool single_ring_separate_wins = false;
    bool double_ring_merged_wins = false;
    bool locality_violated = false;
    bool conclusive = false;
    Clustering separate, merged;  // optimized single-ring clusterings
};

inline Theorem4Report verify_theorem4(const BayNmfParams& p, const OptimizerConfig& cfg,
                                      int num_cliques = 10, int clique_size = 5) {
    if (num_cliques % 2 != 0) throw std::invalid_argument("verify_theorem4: need an even number of cliques");
    const Graph ring = ring_of_cliques(num_cliques, clique_size);
    const int n = ring.num_nodes();

    std::vector<NodeSet> separate_supports;
    for (int k = 0; k < num_cliques; ++k)
        separate_supports.push_back(detail::ring_run_support(num_cliques, clique_size, k, 1));
    std::vector<NodeSet> merged_supports;
    for (int j = 0; j < num_cliques / 2; ++j)
        merged_supports.push_back(detail::ring_run_support(num_cliques, clique_size, 2 * j, 2));
    for (int j = 0; j < num_cliques / 2; ++j) merged_supports.push_back(NodeSet{});  // empty clusters

    QualitySpec spec = p;
    OptResult sep = optimize_given_support(ring, separate_supports, spec, cfg);
    OptResult mer = optimize_given_support(ring, merged_supports, spec, cfg);

    Theorem4Report rep;
    rep.separate = sep.clustering;
    rep.merged = mer.clustering;
    rep.q_single_separate = sep.quality;
    rep.q_single_merged = mer.quality;

    const Graph twin = disjoint_union(ring, ring);
    Clustering sep2 = clustering_union(sep.clustering, embed(sep.clustering, n));
    Clustering mer2 = clustering_union(mer.clustering, embed(mer.clustering, n));
    rep.q_double_separate = q_bay_nmf(twin, sep2, p);
    rep.q_double_merged = q_bay_nmf(twin, mer2, p);

    rep.conclusive = std::isfinite(rep.q_single_separate) && std::isfinite(rep.q_single_merged) &&
                     std::isfinite(rep.q_double_separate) && std::isfinite(rep.q_double_merged);
    const double margin = 10.0 * cfg.tol * std::max({1.0, std::fabs(rep.q_single_separate),
                                                     std::fabs(rep.q_double_merged)});
    rep.single_ring_separate_wins = rep.q_single_separate > rep.q_single_merged + margin;
    rep.double_ring_merged_wins = rep.q_double_merged > rep.q_double_separate + margin;

    // locality framing: the same comparison embedded in the double ring
    LocalityInstance inst;
    inst.g1 = ring;
    inst.g2 = twin;
    NodeSet all;
    for (int i = 0; i < n; ++i) all.push_back(i);
    inst.gs_in_g1 = all;
    inst.gs_in_g2 = all;
    inst.c1 = {};
    inst.c2 = embed(sep.clustering, n);
    inst.d = sep.clustering;
    inst.d_alt = mer.clustering;
    DifferenceVerdict dv = check_additive_difference(spec, inst);
    rep.locality_violated = !dv.equal && detail::cmp_sign(dv.diff1, 0.0) != detail::cmp_sign(dv.diff2, 0.0);
    return rep;
}

// ---------------------------------------------------------------------------
// Membership flip on the three-group counterexample graph

struct Figure1FlipRun {
    double full_toward_b = 0, full_toward_c = 0;
    double sub_toward_b = 0, sub_toward_c = 0;
    bool flipped = false;
};

struct Figure1FlipReport {
    std::vector<Figure1FlipRun> runs;
    int flip_count = 0;
};

// Cluster the full 16-node graph with three clusters and the gray
// subgraph with two; the bridge node's hardened assignment (toward the
// near-clique or toward the right clique) should differ.
inline Figure1FlipReport verify_figure1_flip(const OptimizerConfig& cfg, int runs = 10) {
    Figure1Graph fig = figure1_graph();
    InducedSubgraph sub = induced_subgraph(fig.graph, fig.gray);
    const NodeSet b_core = {5, 6, 7, 8, 9};
    const NodeSet c_core = {11, 12, 13, 14, 15};
    std::vector<int> to_local(fig.graph.num_nodes(), -1);
    for (size_t p = 0; p < sub.to_parent.size(); ++p) to_local[sub.to_parent[p]] = static_cast<int>(p);

    auto group_scores = [](const Clustering& cs, const NodeSet& core) {
        std::vector<double> s(cs.size(), 0.0);
        for (size_t c = 0; c < cs.size(); ++c)
            for (int i : core) {
                auto it = cs[c].h.find(i);
                if (it != cs[c].h.end()) s[c] += it->second;
            }
        return s;
    };
    auto argmax = [](const std::vector<double>& v) {
        size_t best = 0;
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[best]) best = i;
        return best;
    };
    auto membership = [](const Clustering& cs, size_t c, int node) {
        auto it = cs[c].h.find(node);
        return it == cs[c].h.end() ? 0.0 : it->second;
    };

    Figure1FlipReport rep;
    for (int run = 0; run < runs; ++run) {
        OptimizerConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(cfg.seed, 7000 + run);
        OptResult full = mu_sym_nmf(fig.graph, 3, run_cfg);
        run_cfg.seed = derive_seed(cfg.seed, 8000 + run);
        OptResult part = mu_sym_nmf(sub.graph, 2, run_cfg);

        Figure1FlipRun r;
        size_t full_b = argmax(group_scores(full.clustering, b_core));
        size_t full_c = argmax(group_scores(full.clustering, c_core));
        r.full_toward_b = membership(full.clustering, full_b, fig.disputed_node);
        r.full_toward_c = membership(full.clustering, full_c, fig.disputed_node);

        NodeSet b_local, c_local;
        for (int i : b_core) b_local.push_back(to_local[i]);
        for (int i : c_core) c_local.push_back(to_local[i]);
        size_t sub_b = argmax(group_scores(part.clustering, b_local));
        size_t sub_c = argmax(group_scores(part.clustering, c_local));
        int disputed_local = to_local[fig.disputed_node];
        r.sub_toward_b = membership(part.clustering, sub_b, disputed_local);
        r.sub_toward_c = membership(part.clustering, sub_c, disputed_local);

        bool full_c_wins = r.full_toward_c > r.full_toward_b;
        bool sub_c_wins = r.sub_toward_c > r.sub_toward_b;
        r.flipped = (full_b != full_c) && (sub_b != sub_c) && (full_c_wins != sub_c_wins);
        rep.flip_count += r.flipped ? 1 : 0;
        rep.runs.push_back(r);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Randomized instances

// Generates instances that satisfy the locality precondition by
// construction, and that keep every evaluation finite for the given
// quality function (coverage-aware for Poisson likelihoods, partitions
// for the hard functions).
inline LocalityInstance random_locality_instance(const QualitySpec& spec, Rng& rng) {
    const bool hard = std::holds_alternative<CpmParams>(spec) ||
                      std::holds_alternative<SymNmfHardParams>(spec) ||
                      std::holds_alternative<ToyMaxMinParams>(spec);
    const auto* lp = std::get_if<LocalPriorConfig>(&spec);
    const bool two_sided = std::holds_alternative<AsymNmfParams>(spec) ||
                           std::holds_alternative<BayNmfParams>(spec);
    const bool needs_cover = std::holds_alternative<BayNmfParams>(spec) ||
                             (lp && lp->edge == EdgeModel::poisson);
    const bool exactly_one = lp && lp->node_prior == NodePrior::exactly_one;
    const bool integer_weights = needs_cover;

    const int s = 3 + rng.next_below(4);      // common part
    const int x1 = 1 + rng.next_below(3);     // extra nodes of g1 / g2
    const int x2 = 1 + rng.next_below(3);

    auto random_partition = [&](int count, int base) {
        std::vector<NodeSet> blocks;
        for (int i = 0; i < count; ++i) {
            int b = rng.next_below(static_cast<int>(blocks.size()) + 1);
            if (b == static_cast<int>(blocks.size())) blocks.emplace_back();
            blocks[b].push_back(base + i);
        }
        Clustering cs;
        for (auto& bl : blocks) cs.push_back(unit_cluster(bl));
        return cs;
    };
    auto random_soft = [&](int lo, int hi, int base, int count) {
        Clustering cs;
        int k = lo + rng.next_below(hi - lo + 1);
        for (int c = 0; c < k; ++c) {
            SoftCluster cl;
            for (int i = 0; i < count; ++i)
                if (rng.next_unit() < 0.6) cl.h[base + i] = rng.uniform(0.2, 1.5);
            if (cl.h.empty()) cl.h[base + rng.next_below(count)] = rng.uniform(0.2, 1.5);
            if (two_sided) {
                cl.w.emplace();
                for (const auto& [node, coeff] : cl.h) (*cl.w)[node] = rng.uniform(0.2, 1.5);
            }
            if (std::holds_alternative<BayNmfParams>(spec)) cl.precision = rng.uniform(0.5, 4.0);
            cs.push_back(std::move(cl));
        }
        return cs;
    };

    LocalityInstance inst;
    Clustering shared;  // clusters present in both c1 and c2, on the common part
    if (hard || exactly_one) {
        inst.d = random_partition(s, 0);
        inst.d_alt = random_partition(s, 0);
        inst.c1 = random_partition(x1, 0);  // bases fixed after graphs are built
        inst.c2 = random_partition(x2, 0);
    } else {
        inst.d = random_soft(1, 3, 0, s);
        inst.d_alt = random_soft(1, 3, 0, s);
        inst.c1 = random_soft(0, 2, 0, x1);
        inst.c2 = random_soft(0, 2, 0, x2);
        if (!needs_cover || rng.next_unit() < 0.5) shared = random_soft(0, 1, 0, s);
    }

    auto covered_by = [](const Clustering& cs, int u, int v) {
        for (const auto& c : cs) {
            NodeSet sup = support(c);
            if (std::binary_search(sup.begin(), sup.end(), u) &&
                std::binary_search(sup.begin(), sup.end(), v))
                return true;
        }
        return false;
    };
    auto draw_weight = [&] {
        return integer_weights ? static_cast<double>(1 + rng.next_below(2)) : rng.uniform(0.1, 2.0);
    };

    // common part first, identical under both embeddings
    Matrix gs_w(s, s, 0.0);
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) {
            if (rng.next_unit() >= 0.5) continue;
            if (needs_cover) {
                bool ok = covered_by(shared, i, j) ||
                          (covered_by(inst.d, i, j) && covered_by(inst.d_alt, i, j));
                if (!ok) continue;
            }
            double w = draw_weight();
            gs_w(i, j) = w;
            gs_w(j, i) = w;
        }

    auto build_graph = [&](int extra, const Clustering& own, Clustering& c_out, NodeSet& gs_nodes) {
        const int n = s + extra;
        // embed the common part at random sorted positions
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        NodeSet gs(perm.begin(), perm.begin() + s);
        std::sort(gs.begin(), gs.end());
        std::vector<int> extras;
        for (int v = 0; v < n; ++v)
            if (!std::binary_search(gs.begin(), gs.end(), v)) extras.push_back(v);

        Graph g(n);
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (gs_w(i, j) > 0) g.set_weight(gs[i], gs[j], gs_w(i, j));
        // edges among the extra nodes
        for (size_t a = 0; a < extras.size(); ++a)
            for (size_t b = a + 1; b < extras.size(); ++b) {
                if (rng.next_unit() >= 0.5) continue;
                if (needs_cover && !covered_by(own, static_cast<int>(a), static_cast<int>(b))) continue;
                g.set_weight(extras[a], extras[b], draw_weight());
            }
        // boundary edges only when nothing requires them to be explained
        if (!needs_cover && !hard) {
            for (int i = 0; i < s; ++i)
                for (size_t b = 0; b < extras.size(); ++b)
                    if (rng.next_unit() < 0.2) g.set_weight(gs[i], extras[b], draw_weight());
        }
        std::vector<int> extra_map(extras.begin(), extras.end());
        c_out = detail::map_clustering(own, extra_map);
        gs_nodes = gs;
        return g;
    };

    Clustering own1 = inst.c1, own2 = inst.c2;
    inst.g1 = build_graph(x1, own1, inst.c1, inst.gs_in_g1);
    inst.g2 = build_graph(x2, own2, inst.c2, inst.gs_in_g2);
    if (hard) {
        // hard quality functions need total partitions; boundary edges are
        // fine because cross-cluster pairs contribute nothing
        for (int i = 0; i < s; ++i)
            for (int v = 0; v < inst.g1.num_nodes(); ++v)
                if (!std::binary_search(inst.gs_in_g1.begin(), inst.gs_in_g1.end(), v) &&
                    rng.next_unit() < 0.2)
                    inst.g1.set_weight(inst.gs_in_g1[i], v, draw_weight());
    }
    if (!shared.empty()) {
        std::vector<int> to_g1(inst.gs_in_g1.begin(), inst.gs_in_g1.end());
        std::vector<int> to_g2(inst.gs_in_g2.begin(), inst.gs_in_g2.end());
        inst.c1 = clustering_union(inst.c1, detail::map_clustering(shared, to_g1));
        inst.c2 = clustering_union(inst.c2, detail::map_clustering(shared, to_g2));
    }
    return inst;
}

// Break a valid instance, either by letting a changing cluster touch the
// fixed clusterings' support or by making the two embeddings disagree.
inline LocalityInstance make_malformed(const LocalityInstance& valid, Rng& rng) {
    LocalityInstance bad = valid;
    NodeSet fixed = clustering_support(clustering_union(bad.d, bad.d_alt));
    if (rng.next_unit() < 0.5 && !fixed.empty()) {
        int local = fixed[rng.next_below(static_cast<int>(fixed.size()))];
        bad.c1.push_back(unit_cluster({bad.gs_in_g1[local]}));
    } else {
        int i = rng.next_below(static_cast<int>(bad.gs_in_g2.size()));
        int j = rng.next_below(static_cast<int>(bad.gs_in_g2.size()));
        if (i == j) j = (j + 1) % static_cast<int>(bad.gs_in_g2.size());
        bad.g2.set_weight(bad.gs_in_g2[i], bad.gs_in_g2[j],
                          bad.g2.weight(bad.gs_in_g2[i], bad.gs_in_g2[j]) + 1.0);
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Randomized suites

struct SuiteResult {
    int checked = 0;
    int violations = 0;
};

inline SuiteResult run_locality_suite(const QualitySpec& spec, int count, uint64_t seed) {
    SuiteResult out;
    Rng rng(derive_seed(seed, 0xD1FFu));
    for (int i = 0; i < count; ++i) {
        LocalityInstance inst = random_locality_instance(spec, rng);
        LocalityVerdict v = check_locality(spec, inst);
        ++out.checked;
        if (!v.holds) ++out.violations;
    }
    return out;
}

inline SuiteResult run_difference_suite(const QualitySpec& spec, int count, uint64_t seed) {
    SuiteResult out;
    Rng rng(derive_seed(seed, 0xD1FFu));
    for (int i = 0; i < count; ++i) {
        LocalityInstance inst = random_locality_instance(spec, rng);
        DifferenceVerdict v = check_additive_difference(spec, inst);
        ++out.checked;
        if (!v.equal) ++out.violations;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json to_json(const LocalityVerdict& v) {
    return {{"verdict", v.holds ? "holds" : "violated"},
            {"q", {v.q1_d, v.q1_alt, v.q2_d, v.q2_alt}}};
}

inline nlohmann::json to_json(const DifferenceVerdict& v) {
    return {{"verdict", v.equal ? "equal" : "unequal"},
            {"diff", {v.diff1, v.diff2}},
            {"q", {v.q1_d, v.q1_alt, v.q2_d, v.q2_alt}}};
}

inline nlohmann::json to_json(const RlfVerdict& v) {
    nlohmann::json j{{"verdict", v.holds ? "holds" : "violated"}};
    if (!v.holds) {
        j["witness_subset_size"] = v.witness_subset ? v.witness_subset->size() : 0;
        j["witness_quality"] = v.witness_quality;
        j["witness_best"] = v.witness_best;
    }
    return j;
}

inline nlohmann::json to_json(const Theorem4Report& r) {
    return {{"q_single_separate", r.q_single_separate},
            {"q_single_merged", r.q_single_merged},
            {"q_double_separate", r.q_double_separate},
            {"q_double_merged", r.q_double_merged},
            {"single_ring_separate_wins", r.single_ring_separate_wins},
            {"double_ring_merged_wins", r.double_ring_merged_wins},
            {"locality_violated", r.locality_violated},
            {"conclusive", r.conclusive}};
}

inline nlohmann::json to_json(const Figure1FlipReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"full_toward_b", run.full_toward_b},
                        {"full_toward_c", run.full_toward_c},
                        {"sub_toward_b", run.sub_toward_b},
                        {"sub_toward_c", run.sub_toward_c},
                        {"flipped", run.flipped}});
    return {{"runs", runs}, {"flip_count", r.flip_count}};
}

}  // namespace nmfq
