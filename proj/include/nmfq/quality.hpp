// Clustering quality functions behind one evaluation interface:
//
//   sym_nmf       q = -1/2 sum_{ij} (a_ij - ahat_ij)^2,  ahat = sum_c h_ci h_cj
//   asym_nmf      same loss with ahat = sum_c w_ci h_cj
//   cpm           q = sum_{ij} (a_ij - gamma) [c_i = c_j]
//   sym_nmf_hard  sym_nmf at the binary encoding of a partition
//   gauss_nmf     sym_nmf plus a half-normal coefficient prior and the
//                 per-cluster/graph normalization constants
//   bay_nmf       Poisson fit with per-cluster precision and a gamma
//                 hyperprior (two-sided factorization, ARD)
//   local_prob    log-likelihood with independent parts per node, cluster
//                 and edge; stays local in the sense that disjoint changes
//                 to the graph cannot flip comparisons
//   toy_maxmin    max |c| + min |c|, a counterexample quality
//
// All double sums run over ordered pairs including i = j. Configurations
// with zero likelihood evaluate to an explicit -infinity rather than
// raising, so comparators stay total.

#pragma once

#include <string>
#include <variant>

#include "nmfq/clustering.hpp"
#include "nmfq/common.hpp"
#include "nmfq/graph.hpp"

namespace nmfq {

// ---------------------------------------------------------------------------
// Parameter types

struct SymNmfParams {
    friend bool operator==(const SymNmfParams&, const SymNmfParams&) = default;
};
struct AsymNmfParams {
    friend bool operator==(const AsymNmfParams&, const AsymNmfParams&) = default;
};
struct SymNmfHardParams {
    friend bool operator==(const SymNmfHardParams&, const SymNmfHardParams&) = default;
};
struct ToyMaxMinParams {
    friend bool operator==(const ToyMaxMinParams&, const ToyMaxMinParams&) = default;
};

struct CpmParams {
    double gamma = 0.5;  // resolution parameter
    friend bool operator==(const CpmParams&, const CpmParams&) = default;
};

struct GaussianNmfParams {
    double sigma = 1.0;  // scale of the half-normal coefficient prior
    friend bool operator==(const GaussianNmfParams&, const GaussianNmfParams&) = default;
};

struct BayNmfParams {
    double shape = 5.0;  // gamma hyperprior shape a
    double rate = 2.0;   // gamma hyperprior rate b
    friend bool operator==(const BayNmfParams&, const BayNmfParams&) = default;
};

enum class NodePrior { poisson, exactly_one, none };
enum class SizePrior { flat, crp };
enum class EdgeModel { poisson, gaussian_unit_variance };

struct LocalPriorConfig {
    NodePrior node_prior = NodePrior::poisson;
    double lambda = 1.0;            // Poisson rate for clusters-per-node
    SizePrior size_prior = SizePrior::flat;
    double coeff_precision = 1.0;   // half-normal precision on supported coefficients
    EdgeModel edge = EdgeModel::poisson;
    double kappa = 0.0;
    // Charge the coefficient-prior normalization for every (cluster, node)
    // pair instead of only supported ones. This reproduces the plain NMF
    // objective with a fixed number of clusters; it is not local.
    bool fixed_normalization = false;
    friend bool operator==(const LocalPriorConfig&, const LocalPriorConfig&) = default;
};

using QualitySpec = std::variant<SymNmfParams, AsymNmfParams, CpmParams, SymNmfHardParams,
                                 GaussianNmfParams, BayNmfParams, LocalPriorConfig, ToyMaxMinParams>;

inline std::string quality_name(const QualitySpec& spec) {
    struct Visitor {
        std::string operator()(const SymNmfParams&) const { return "sym_nmf"; }
        std::string operator()(const AsymNmfParams&) const { return "asym_nmf"; }
        std::string operator()(const CpmParams&) const { return "cpm"; }
        std::string operator()(const SymNmfHardParams&) const { return "sym_nmf_hard"; }
        std::string operator()(const GaussianNmfParams&) const { return "gauss_nmf"; }
        std::string operator()(const BayNmfParams&) const { return "bay_nmf"; }
        std::string operator()(const LocalPriorConfig&) const { return "local_prob"; }
        std::string operator()(const ToyMaxMinParams&) const { return "toy_maxmin"; }
    };
    return std::visit(Visitor{}, spec);
}

// ---------------------------------------------------------------------------
// Predictions

enum class PredictionMode { symmetric, asymmetric };

inline Matrix predicted_adjacency(const Clustering& cs, const Graph& g, PredictionMode mode) {
    const int n = g.num_nodes();
    Matrix ahat(n, n, 0.0);
    for (const auto& c : cs) {
        if (mode == PredictionMode::symmetric) {
            for (const auto& [i, hi] : c.h)
                for (const auto& [j, hj] : c.h) ahat(i, j) += hi * hj;
        } else {
            if (!c.w) throw std::invalid_argument("predicted_adjacency: asymmetric mode requires w");
            for (const auto& [i, wi] : *c.w)
                for (const auto& [j, hj] : c.h) ahat(i, j) += wi * hj;
        }
    }
    return ahat;
}

// ---------------------------------------------------------------------------
// Scalar evaluations

inline double q_sym_nmf(const Graph& g, const Clustering& cs) {
    const int n = g.num_nodes();
    Matrix ahat = predicted_adjacency(cs, g, PredictionMode::symmetric);
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = g.weight(i, j) - ahat(i, j);
            q -= 0.5 * r * r;
        }
    return q;
}

inline double q_asym_nmf(const Graph& g, const Clustering& cs) {
    const int n = g.num_nodes();
    Matrix ahat = predicted_adjacency(cs, g, PredictionMode::asymmetric);
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = g.weight(i, j) - ahat(i, j);
            q -= 0.5 * r * r;
        }
    return q;
}

inline double q_cpm(const Graph& g, const HardClustering& hc, const CpmParams& p) {
    const int n = g.num_nodes();
    if (hc.num_nodes() != n) throw std::invalid_argument("q_cpm: clustering does not cover the graph");
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (hc.assignment[i] == hc.assignment[j]) q += g.weight(i, j) - p.gamma;
    return q;
}

inline double q_sym_nmf_hard(const Graph& g, const HardClustering& hc) {
    if (hc.num_nodes() != g.num_nodes())
        throw std::invalid_argument("q_sym_nmf_hard: clustering does not cover the graph");
    return q_sym_nmf(g, to_clustering(hc));
}

inline double q_gauss_nmf(const Graph& g, const Clustering& cs, const GaussianNmfParams& p) {
    if (p.sigma <= 0) throw std::invalid_argument("q_gauss_nmf: sigma must be positive");
    const int n = g.num_nodes();
    double q = q_sym_nmf(g, cs);
    double sumsq = 0.0;
    for (const auto& c : cs)
        for (const auto& [i, hi] : c.h) sumsq += hi * hi;
    q -= sumsq / (2.0 * p.sigma * p.sigma);
    q += static_cast<double>(n) * n * std::log(std::sqrt(2.0 * M_PI));
    q += static_cast<double>(cs.size()) * n * std::log(std::sqrt(M_PI * p.sigma * p.sigma / 2.0));
    return q;
}

// Edge fit of the ARD objective: -sum_{ij} (v log(v/vhat) + vhat) with
// v log(v/vhat) = 0 when v = 0, and -inf when v > 0 but vhat = 0.
inline double bay_edge_term(const Graph& g, const Matrix& vhat) {
    const int n = g.num_nodes();
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = g.weight(i, j);
            double vh = vhat(i, j);
            if (v > 0) {
                if (vh <= 0) return kNegInf;
                q -= v * std::log(v / vh);
            }
            q -= vh;
        }
    return q;
}

inline double q_bay_nmf(const Graph& g, const Clustering& cs, const BayNmfParams& p) {
    const int n = g.num_nodes();
    for (const auto& c : cs) {
        if (!c.w || !c.precision)
            throw std::invalid_argument("q_bay_nmf: every cluster must carry w and a precision");
        if (*c.precision <= 0) throw std::invalid_argument("q_bay_nmf: precisions must be positive");
    }
    Matrix vhat = predicted_adjacency(cs, g, PredictionMode::asymmetric);
    double q = bay_edge_term(g, vhat);
    if (q == kNegInf) return kNegInf;
    for (const auto& c : cs) {
        double beta = *c.precision;
        double sumsq = 0.0;
        for (const auto& [i, wi] : *c.w) sumsq += wi * wi;
        for (const auto& [i, hi] : c.h) sumsq += hi * hi;
        // the 2|V| log beta term counts all nodes, supported or not
        q -= 0.5 * (beta * sumsq - 2.0 * n * std::log(beta));
        q -= beta * p.rate - (p.shape - 1.0) * std::log(beta);
    }
    return q;
}

namespace detail {

inline double log_node_prior(const LocalPriorConfig& p, int covering) {
    switch (p.node_prior) {
        case NodePrior::poisson:
            return covering * std::log(p.lambda) - p.lambda - log_factorial(covering);
        case NodePrior::exactly_one:
            return covering == 1 ? 0.0 : kNegInf;
        case NodePrior::none:
            return 0.0;
    }
    return 0.0;
}

inline double log_size_prior(const LocalPriorConfig& p, int size) {
    if (p.size_prior == SizePrior::flat) return 0.0;
    // CRP: log (s-1)!; empty clusters contribute nothing
    return size >= 1 ? std::lgamma(static_cast<double>(size)) : 0.0;
}

inline double log_coeff_prior(const LocalPriorConfig& p, double h) {
    return 0.5 * std::log(2.0 * p.coeff_precision / M_PI) - 0.5 * p.coeff_precision * h * h;
}

inline double log_edge_likelihood(const LocalPriorConfig& p, double a, double ahat) {
    if (p.edge == EdgeModel::poisson) {
        if (a > 0 && ahat <= 0) return kNegInf;
        double q = -ahat - log_factorial(a);
        if (a > 0) q += a * std::log(ahat);
        return q;
    }
    double r = a - ahat;
    return -0.5 * r * r - std::log(std::sqrt(2.0 * M_PI));
}

}  // namespace detail

inline double q_local_prob(const Graph& g, const Clustering& cs, const LocalPriorConfig& p) {
    const int n = g.num_nodes();
    if (p.node_prior == NodePrior::poisson && p.lambda <= 0)
        throw std::invalid_argument("q_local_prob: lambda must be positive");
    if (p.coeff_precision <= 0) throw std::invalid_argument("q_local_prob: precision must be positive");
    if (p.edge == EdgeModel::poisson) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                if (!is_nonneg_integer(g.weight(i, j)))
                    throw std::invalid_argument("q_local_prob: Poisson likelihood needs integer weights");
    }

    double q = p.kappa;
    std::vector<int> covering(n, 0);
    for (const auto& c : cs) {
        NodeSet s = support(c);
        for (int i : s) ++covering[i];
        q += detail::log_size_prior(p, static_cast<int>(s.size()));
        for (const auto& [i, hi] : c.h) q += detail::log_coeff_prior(p, hi);
        if (p.fixed_normalization)
            q += (n - static_cast<int>(s.size())) * detail::log_coeff_prior(p, 0.0);
    }
    for (int i = 0; i < n; ++i) {
        double t = detail::log_node_prior(p, covering[i]);
        if (t == kNegInf) return kNegInf;
        q += t;
    }
    Matrix ahat = predicted_adjacency(cs, g, PredictionMode::symmetric);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double t = detail::log_edge_likelihood(p, g.weight(i, j), ahat(i, j));
            if (t == kNegInf) return kNegInf;
            q += t;
        }
    return q;
}

// max |c| + min |c| over support sizes; resolution-limit-free but not local.
inline double toy_maxmin_quality(const Clustering& cs) {
    if (cs.empty()) throw std::invalid_argument("toy_maxmin_quality: empty clustering");
    size_t lo = support(cs.front()).size();
    size_t hi = lo;
    for (const auto& c : cs) {
        size_t s = support(c).size();
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return static_cast<double>(lo + hi);
}

inline double toy_maxmin_quality(const Graph&, const HardClustering& hc) {
    return toy_maxmin_quality(to_clustering(hc));
}

// ---------------------------------------------------------------------------
// Generic entry points

// Evaluate a quality function on a soft clustering. The hard quality
// functions (cpm, sym_nmf_hard) require the clustering to encode a
// partition (binary, disjoint, total).
inline double evaluate(const QualitySpec& spec, const Graph& g, const Clustering& cs) {
    struct Visitor {
        const Graph& g;
        const Clustering& cs;
        double operator()(const SymNmfParams&) const { return q_sym_nmf(g, cs); }
        double operator()(const AsymNmfParams&) const { return q_asym_nmf(g, cs); }
        double operator()(const CpmParams& p) const { return q_cpm(g, as_partition(cs, g), p); }
        double operator()(const SymNmfHardParams&) const { return q_sym_nmf_hard(g, as_partition(cs, g)); }
        double operator()(const GaussianNmfParams& p) const { return q_gauss_nmf(g, cs, p); }
        double operator()(const BayNmfParams& p) const { return q_bay_nmf(g, cs, p); }
        double operator()(const LocalPriorConfig& p) const { return q_local_prob(g, cs, p); }
        double operator()(const ToyMaxMinParams&) const { return toy_maxmin_quality(cs); }
    };
    return std::visit(Visitor{g, cs}, spec);
}

inline double evaluate_hard(const QualitySpec& spec, const Graph& g, const HardClustering& hc) {
    if (std::holds_alternative<CpmParams>(spec)) return q_cpm(g, hc, std::get<CpmParams>(spec));
    if (std::holds_alternative<SymNmfHardParams>(spec)) return q_sym_nmf_hard(g, hc);
    if (std::holds_alternative<ToyMaxMinParams>(spec)) return toy_maxmin_quality(g, hc);
    return evaluate(spec, g, to_clustering(hc));
}

// ---------------------------------------------------------------------------
// Additive decomposition
//
// q = graph_term + sum_c cluster_terms[c] + sum_i node_terms[i]
//     + sum_{ij} edge_terms(i, j)

struct AdditiveParts {
    double graph_term = 0.0;
    std::vector<double> cluster_terms;
    std::vector<double> node_terms;
    Matrix edge_terms;

    double total() const {
        double q = graph_term;
        for (double x : cluster_terms) q += x;
        for (double x : node_terms) q += x;
        for (double x : edge_terms.data()) q += x;
        return q;
    }
};

inline AdditiveParts additive_parts(const QualitySpec& spec, const Graph& g, const Clustering& cs) {
    const int n = g.num_nodes();
    AdditiveParts out;
    out.cluster_terms.assign(cs.size(), 0.0);
    out.node_terms.assign(n, 0.0);
    out.edge_terms = Matrix(n, n, 0.0);

    if (std::holds_alternative<BayNmfParams>(spec))
        throw std::invalid_argument(
            "additive_parts: bay_nmf is not additive: the 2|V| log beta_c term per cluster "
            "depends on the number of nodes, and its kappa depends on the number of clusters");
    if (std::holds_alternative<ToyMaxMinParams>(spec))
        throw std::invalid_argument("additive_parts: toy_maxmin is not additive");
    if (const auto* lp = std::get_if<LocalPriorConfig>(&spec); lp && lp->fixed_normalization)
        throw std::invalid_argument(
            "additive_parts: local_prob with fixed_normalization charges a per-cluster term "
            "proportional to |V| and is not additive");

    if (std::holds_alternative<SymNmfParams>(spec) || std::holds_alternative<AsymNmfParams>(spec) ||
        std::holds_alternative<GaussianNmfParams>(spec) || std::holds_alternative<SymNmfHardParams>(spec)) {
        bool asym = std::holds_alternative<AsymNmfParams>(spec);
        Clustering encoded = std::holds_alternative<SymNmfHardParams>(spec)
                                 ? to_clustering(as_partition(cs, g))
                                 : cs;
        Matrix ahat = predicted_adjacency(encoded, g,
                                          asym ? PredictionMode::asymmetric : PredictionMode::symmetric);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double r = g.weight(i, j) - ahat(i, j);
                out.edge_terms(i, j) = -0.5 * r * r;
            }
        if (const auto* gp = std::get_if<GaussianNmfParams>(&spec)) {
            // the per-cluster normalization is constant only at fixed |C|
            for (size_t c = 0; c < cs.size(); ++c) {
                double sumsq = 0.0;
                for (const auto& [i, hi] : cs[c].h) sumsq += hi * hi;
                out.cluster_terms[c] = -sumsq / (2.0 * gp->sigma * gp->sigma) +
                                       n * std::log(std::sqrt(M_PI * gp->sigma * gp->sigma / 2.0));
            }
            out.graph_term = static_cast<double>(n) * n * std::log(std::sqrt(2.0 * M_PI));
        }
        return out;
    }

    if (const auto* cp = std::get_if<CpmParams>(&spec)) {
        HardClustering hc = as_partition(cs, g);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (hc.assignment[i] == hc.assignment[j])
                    out.edge_terms(i, j) = g.weight(i, j) - cp->gamma;
        return out;
    }

    const auto& p = std::get<LocalPriorConfig>(spec);
    out.graph_term = p.kappa;
    std::vector<int> covering(n, 0);
    for (size_t c = 0; c < cs.size(); ++c) {
        NodeSet s = support(cs[c]);
        for (int i : s) ++covering[i];
        double t = detail::log_size_prior(p, static_cast<int>(s.size()));
        for (const auto& [i, hi] : cs[c].h) t += detail::log_coeff_prior(p, hi);
        out.cluster_terms[c] = t;
    }
    for (int i = 0; i < n; ++i) out.node_terms[i] = detail::log_node_prior(p, covering[i]);
    Matrix ahat = predicted_adjacency(cs, g, PredictionMode::symmetric);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.edge_terms(i, j) = detail::log_edge_likelihood(p, g.weight(i, j), ahat(i, j));
    return out;
}

}  // namespace nmfq
