// Optimizers: multiplicative updates for the matrix-factorization
// objectives, gradient ascent on fixed supports (log-parameterized so
// coefficients stay positive), search over candidate support families,
// and exhaustive search over hard partitions.

#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nmfq/clustering.hpp"
#include "nmfq/common.hpp"
#include "nmfq/graph.hpp"
#include "nmfq/lbfgs.hpp"
#include "nmfq/partition.hpp"
#include "nmfq/quality.hpp"

namespace nmfq {

struct OptimizerConfig {
    int max_iter = 2000;
    double tol = 1e-9;      // relative quality change at convergence
    int restarts = 10;
    uint64_t seed = 0;
    double eps = 1e-12;     // numeric floor keeping multiplicative updates off zero
    bool record_trace = false;
};

struct OptResult {
    Clustering clustering;        // pruned at kSupportEps
    double quality = kNegInf;     // evaluated on the pruned clustering
    std::vector<double> trace;    // per-iteration quality of the winning restart
    int restart = -1;
};

namespace detail {

// One safeguarded multiplicative step: x <- x * m^alpha, halving alpha
// until the objective does not decrease. The plain step (alpha = 1) is
// taken whenever it already is monotone; fixed points are unchanged since
// m = 1 exactly where the gradient vanishes.
template <typename EvalFn>
bool safeguarded_mu_step(std::vector<double>& x, const std::vector<double>& multiplier, double floor,
                         double& q, const EvalFn& eval) {
    const std::vector<double> x0 = x;
    double alpha = 1.0;
    for (int tries = 0; tries < 30; ++tries) {
        for (size_t i = 0; i < x.size(); ++i)
            x[i] = std::max(floor, x0[i] * std::pow(multiplier[i], alpha));
        double q_new = eval();
        if (std::isfinite(q_new) && q_new >= q) {
            q = q_new;
            return true;
        }
        alpha *= 0.5;
    }
    x = x0;
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Multiplicative updates, symmetric Euclidean objective

// k soft clusters maximizing q_sym_nmf locally. Update rule
// h <- h * (A h) / (H H^T h), with step safeguarding so the objective is
// monotone non-decreasing per iteration; best of cfg.restarts random
// initializations.
inline OptResult mu_sym_nmf(const Graph& g, int k, const OptimizerConfig& cfg = {}) {
    if (k < 1) throw std::invalid_argument("mu_sym_nmf: need at least one cluster");
    const int n = g.num_nodes();
    OptResult best;

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(derive_seed(cfg.seed, restart));
        std::vector<double> h(static_cast<size_t>(k) * n);
        for (double& x : h) x = rng.uniform(cfg.eps, 1.0);

        auto q_of = [&](const std::vector<double>& hh) {
            // -1/2 || A - H^T H ||^2 over all ordered pairs
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double ahat = 0.0;
                    for (int c = 0; c < k; ++c) ahat += hh[c * n + i] * hh[c * n + j];
                    double r = g.weight(i, j) - ahat;
                    q -= 0.5 * r * r;
                }
            return q;
        };

        double q = q_of(h);
        std::vector<double> trace;
        if (cfg.record_trace) trace.push_back(q);
        std::vector<double> multiplier(h.size());
        int stall = 0;
        for (int iter = 0; iter < cfg.max_iter; ++iter) {
            // numerator (A h)_ci, denominator (H H^T h)_ci
            std::vector<double> gram(static_cast<size_t>(k) * k, 0.0);
            for (int c = 0; c < k; ++c)
                for (int d = 0; d < k; ++d) {
                    double s = 0.0;
                    for (int j = 0; j < n; ++j) s += h[c * n + j] * h[d * n + j];
                    gram[c * k + d] = s;
                }
            for (int c = 0; c < k; ++c)
                for (int i = 0; i < n; ++i) {
                    double num = 0.0;
                    for (int j = 0; j < n; ++j) num += g.weight(i, j) * h[c * n + j];
                    double den = 0.0;
                    for (int d = 0; d < k; ++d) den += gram[c * k + d] * h[d * n + i];
                    multiplier[c * n + i] = num / std::max(den, cfg.eps);
                }
            double q_prev = q;
            bool moved = detail::safeguarded_mu_step(h, multiplier, cfg.eps, q, [&] { return q_of(h); });
            assert(q >= q_prev - 1e-12);
            if (cfg.record_trace) trace.push_back(q);
            if (!moved) break;
            // quality can converge while weak coefficients are still
            // draining toward the floor; require a quiet stretch
            stall = std::fabs(q - q_prev) <= cfg.tol * std::max(1.0, std::fabs(q)) ? stall + 1 : 0;
            if (stall >= 30) break;
        }

        Clustering cs(k);
        for (int c = 0; c < k; ++c)
            for (int i = 0; i < n; ++i)
                if (h[c * n + i] >= kSupportEps) cs[c].h[i] = h[c * n + i];
        double q_final = q_sym_nmf(g, cs);
        if (restart == 0 || q_final > best.quality) {
            best.clustering = std::move(cs);
            best.quality = q_final;
            best.trace = std::move(trace);
            best.restart = restart;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Multiplicative updates, Poisson fit with per-cluster precision (ARD)

// Alternates multiplicative updates of the two membership matrices with
// the closed-form precision update
//   beta_c = (2|V| + 2(shape-1)) / (sum w^2 + sum h^2 + 2 rate),
// which zeroes the beta_c derivative of the objective. Returns k_max
// clusters, including the ones driven empty.
inline OptResult mu_bay_nmf(const Graph& g, int k_max, const BayNmfParams& p,
                            const OptimizerConfig& cfg = {}) {
    if (k_max < 1) throw std::invalid_argument("mu_bay_nmf: need at least one cluster");
    const int n = g.num_nodes();
    OptResult best;

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(derive_seed(cfg.seed, restart));
        std::vector<double> w(static_cast<size_t>(k_max) * n), h(w.size());
        for (double& x : w) x = rng.uniform(0.1, 1.0);
        for (double& x : h) x = rng.uniform(0.1, 1.0);
        std::vector<double> beta(k_max, p.shape / p.rate);

        auto update_beta = [&] {
            for (int c = 0; c < k_max; ++c) {
                double sumsq = 0.0;
                for (int i = 0; i < n; ++i)
                    sumsq += w[c * n + i] * w[c * n + i] + h[c * n + i] * h[c * n + i];
                beta[c] = (2.0 * n + 2.0 * (p.shape - 1.0)) / (sumsq + 2.0 * p.rate);
            }
        };
        Matrix vhat(n, n, 0.0);
        auto refresh_vhat = [&] {
            std::fill(vhat.data().begin(), vhat.data().end(), 0.0);
            for (int c = 0; c < k_max; ++c)
                for (int i = 0; i < n; ++i) {
                    double wv = w[c * n + i];
                    if (wv == 0.0) continue;
                    for (int j = 0; j < n; ++j) vhat(i, j) += wv * h[c * n + j];
                }
        };
        auto q_of = [&] {
            refresh_vhat();
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
            for (int c = 0; c < k_max; ++c) {
                double sumsq = 0.0;
                for (int i = 0; i < n; ++i)
                    sumsq += w[c * n + i] * w[c * n + i] + h[c * n + i] * h[c * n + i];
                q -= 0.5 * (beta[c] * sumsq - 2.0 * n * std::log(beta[c]));
                q -= beta[c] * p.rate - (p.shape - 1.0) * std::log(beta[c]);
            }
            return q;
        };

        update_beta();
        double q = q_of();
        std::vector<double> trace;
        if (cfg.record_trace) trace.push_back(q);
        std::vector<double> multiplier(w.size());
        int stall = 0;
        for (int iter = 0; iter < cfg.max_iter; ++iter) {
            double q_prev = q;
            // W step: w_ci <- w_ci * (sum_j h_cj v_ij / vhat_ij) / (sum_j h_cj + beta_c w_ci)
            refresh_vhat();
            for (int c = 0; c < k_max; ++c) {
                double hsum = 0.0;
                for (int j = 0; j < n; ++j) hsum += h[c * n + j];
                for (int i = 0; i < n; ++i) {
                    double num = 0.0;
                    for (int j = 0; j < n; ++j) {
                        double v = g.weight(i, j);
                        if (v > 0) num += h[c * n + j] * v / std::max(vhat(i, j), cfg.eps);
                    }
                    double den = hsum + beta[c] * w[c * n + i];
                    multiplier[c * n + i] = num / std::max(den, cfg.eps);
                }
            }
            detail::safeguarded_mu_step(w, multiplier, cfg.eps, q, q_of);
            // H step, mirrored
            refresh_vhat();
            for (int c = 0; c < k_max; ++c) {
                double wsum = 0.0;
                for (int i = 0; i < n; ++i) wsum += w[c * n + i];
                for (int j = 0; j < n; ++j) {
                    double num = 0.0;
                    for (int i = 0; i < n; ++i) {
                        double v = g.weight(i, j);
                        if (v > 0) num += w[c * n + i] * v / std::max(vhat(i, j), cfg.eps);
                    }
                    double den = wsum + beta[c] * h[c * n + j];
                    multiplier[c * n + j] = num / std::max(den, cfg.eps);
                }
            }
            detail::safeguarded_mu_step(h, multiplier, cfg.eps, q, q_of);
            update_beta();  // exact maximizer given W, H
            q = q_of();
            assert(q >= q_prev - 1e-9 * std::max(1.0, std::fabs(q)));
            if (cfg.record_trace) trace.push_back(q);
            // dying clusters keep decaying long after the quality has
            // flattened; stop only after a quiet stretch so they drain
            // below the support threshold
            stall = std::fabs(q - q_prev) <= cfg.tol * std::max(1.0, std::fabs(q)) ? stall + 1 : 0;
            if (stall >= 30) break;
        }

        Clustering cs(k_max);
        for (int c = 0; c < k_max; ++c) {
            cs[c].w.emplace();
            cs[c].precision = beta[c];
            for (int i = 0; i < n; ++i) {
                if (h[c * n + i] >= kSupportEps) cs[c].h[i] = h[c * n + i];
                if (w[c * n + i] >= kSupportEps) (*cs[c].w)[i] = w[c * n + i];
            }
        }
        double q_final = q_bay_nmf(g, cs, p);
        if (restart == 0 || q_final > best.quality) {
            best.clustering = std::move(cs);
            best.quality = q_final;
            best.trace = std::move(trace);
            best.restart = restart;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Fixed-support continuous optimization

namespace detail {

// Coefficients live in log space: theta -> exp(theta). Support membership
// is decided by the caller's search, never by thresholding here.
struct SupportProblem {
    const Graph& g;
    const std::vector<NodeSet>& supports;
    const QualitySpec& spec;
    bool two_sided = false;  // w and h both present
    bool with_precision = false;
    std::vector<int> offset;  // parameter offset per cluster
    int dim = 0;

    SupportProblem(const Graph& g_, const std::vector<NodeSet>& supports_, const QualitySpec& spec_)
        : g(g_), supports(supports_), spec(spec_) {
        if (std::holds_alternative<AsymNmfParams>(spec) || std::holds_alternative<BayNmfParams>(spec))
            two_sided = true;
        with_precision = std::holds_alternative<BayNmfParams>(spec);
        if (!two_sided && !std::holds_alternative<SymNmfParams>(spec) &&
            !std::holds_alternative<GaussianNmfParams>(spec) &&
            !std::holds_alternative<LocalPriorConfig>(spec))
            throw std::invalid_argument("optimize_given_support: quality function is not continuous in coefficients");
        if (const auto* lp = std::get_if<LocalPriorConfig>(&spec); lp && lp->edge == EdgeModel::poisson) {
            for (int i = 0; i < g.num_nodes(); ++i)
                for (int j = i; j < g.num_nodes(); ++j)
                    if (!is_nonneg_integer(g.weight(i, j)))
                        throw std::invalid_argument("optimize_given_support: Poisson likelihood needs integer weights");
        }
        for (const NodeSet& s : supports) {
            for (int i : s)
                if (i < 0 || i >= g.num_nodes())
                    throw std::invalid_argument("optimize_given_support: support node out of range");
            offset.push_back(dim);
            dim += static_cast<int>(s.size()) * (two_sided ? 2 : 1) + (with_precision ? 1 : 0);
        }
    }

    Clustering decode(const std::vector<double>& theta) const {
        Clustering cs(supports.size());
        for (size_t c = 0; c < supports.size(); ++c) {
            const NodeSet& s = supports[c];
            int base = offset[c];
            if (two_sided) cs[c].w.emplace();
            for (size_t t = 0; t < s.size(); ++t) {
                if (two_sided) {
                    (*cs[c].w)[s[t]] = std::exp(theta[base + t]);
                    cs[c].h[s[t]] = std::exp(theta[base + s.size() + t]);
                } else {
                    cs[c].h[s[t]] = std::exp(theta[base + t]);
                }
            }
            if (with_precision) cs[c].precision = std::exp(theta[base + 2 * s.size()]);
        }
        return cs;
    }

    // Returns q and the gradient dq/dtheta.
    double eval(const std::vector<double>& theta, std::vector<double>& grad) const {
        const int n = g.num_nodes();
        grad.assign(dim, 0.0);
        Clustering cs = decode(theta);

        if (const auto* bp = std::get_if<BayNmfParams>(&spec)) {
            Matrix vhat = predicted_adjacency(cs, g, PredictionMode::asymmetric);
            double q = bay_edge_term(g, vhat);
            if (q == kNegInf) return kNegInf;
            // ratio_ij = v_ij / vhat_ij - 1
            Matrix ratio(n, n, -1.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (g.weight(i, j) > 0) ratio(i, j) += g.weight(i, j) / vhat(i, j);
            for (size_t c = 0; c < supports.size(); ++c) {
                const NodeSet& s = supports[c];
                int base = offset[c];
                double beta = *cs[c].precision;
                double sumsq = 0.0;
                for (size_t t = 0; t < s.size(); ++t) {
                    double wv = (*cs[c].w)[s[t]];
                    double hv = cs[c].h[s[t]];
                    sumsq += wv * wv + hv * hv;
                    double gw = -beta * wv;
                    double gh = -beta * hv;
                    for (size_t u = 0; u < s.size(); ++u) {
                        gw += ratio(s[t], s[u]) * cs[c].h[s[u]];
                        gh += ratio(s[u], s[t]) * (*cs[c].w)[s[u]];
                    }
                    grad[base + t] = gw * wv;
                    grad[base + s.size() + t] = gh * hv;
                }
                q -= 0.5 * (beta * sumsq - 2.0 * n * std::log(beta));
                q -= beta * bp->rate - (bp->shape - 1.0) * std::log(beta);
                grad[base + 2 * s.size()] =
                    -beta * (0.5 * sumsq + bp->rate) + (n + bp->shape - 1.0);
            }
            return q;
        }

        if (std::holds_alternative<AsymNmfParams>(spec)) {
            Matrix ahat = predicted_adjacency(cs, g, PredictionMode::asymmetric);
            double q = 0.0;
            Matrix resid(n, n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    resid(i, j) = g.weight(i, j) - ahat(i, j);
                    q -= 0.5 * resid(i, j) * resid(i, j);
                }
            for (size_t c = 0; c < supports.size(); ++c) {
                const NodeSet& s = supports[c];
                int base = offset[c];
                for (size_t t = 0; t < s.size(); ++t) {
                    double wv = (*cs[c].w)[s[t]];
                    double hv = cs[c].h[s[t]];
                    double gw = 0.0, gh = 0.0;
                    for (size_t u = 0; u < s.size(); ++u) {
                        gw += resid(s[t], s[u]) * cs[c].h[s[u]];
                        gh += resid(s[u], s[t]) * (*cs[c].w)[s[u]];
                    }
                    grad[base + t] = gw * wv;
                    grad[base + s.size() + t] = gh * hv;
                }
            }
            return q;
        }

        // symmetric families: sym_nmf, gauss_nmf, local_prob
        Matrix ahat = predicted_adjacency(cs, g, PredictionMode::symmetric);
        double q = 0.0;
        Matrix dedge(n, n, 0.0);  // d q_edge / d ahat
        if (const auto* lp = std::get_if<LocalPriorConfig>(&spec)) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double t = log_edge_likelihood(*lp, g.weight(i, j), ahat(i, j));
                    if (t == kNegInf) return kNegInf;
                    q += t;
                    if (lp->edge == EdgeModel::poisson)
                        dedge(i, j) = (g.weight(i, j) > 0 ? g.weight(i, j) / ahat(i, j) : 0.0) - 1.0;
                    else
                        dedge(i, j) = g.weight(i, j) - ahat(i, j);
                }
            std::vector<int> covering(n, 0);
            for (const auto& c : cs)
                for (const auto& [i, hv] : c.h) ++covering[i];
            for (int i = 0; i < n; ++i) {
                double t = log_node_prior(*lp, covering[i]);
                if (t == kNegInf) return kNegInf;
                q += t;
            }
            q += lp->kappa;
            for (size_t c = 0; c < supports.size(); ++c) {
                q += log_size_prior(*lp, static_cast<int>(supports[c].size()));
                for (const auto& [i, hv] : cs[c].h) q += log_coeff_prior(*lp, hv);
                if (lp->fixed_normalization)
                    q += (n - static_cast<int>(supports[c].size())) * log_coeff_prior(*lp, 0.0);
            }
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double r = g.weight(i, j) - ahat(i, j);
                    q -= 0.5 * r * r;
                    dedge(i, j) = r;
                }
            if (const auto* gp = std::get_if<GaussianNmfParams>(&spec)) {
                double sumsq = 0.0;
                for (const auto& c : cs)
                    for (const auto& [i, hv] : c.h) sumsq += hv * hv;
                q -= sumsq / (2.0 * gp->sigma * gp->sigma);
                q += static_cast<double>(n) * n * std::log(std::sqrt(2.0 * M_PI));
                q += static_cast<double>(cs.size()) * n * std::log(std::sqrt(M_PI * gp->sigma * gp->sigma / 2.0));
            }
        }
        for (size_t c = 0; c < supports.size(); ++c) {
            const NodeSet& s = supports[c];
            int base = offset[c];
            for (size_t t = 0; t < s.size(); ++t) {
                double hv = cs[c].h[s[t]];
                double gh = 0.0;
                for (size_t u = 0; u < s.size(); ++u) gh += 2.0 * dedge(s[t], s[u]) * cs[c].h[s[u]];
                if (const auto* lp = std::get_if<LocalPriorConfig>(&spec))
                    gh -= lp->coeff_precision * hv;
                else if (const auto* gp = std::get_if<GaussianNmfParams>(&spec))
                    gh -= hv / (gp->sigma * gp->sigma);
                grad[base + t] = gh * hv;
            }
        }
        return q;
    }
};

}  // namespace detail

// The fixed-support objective and its analytic gradient, both in
// log-coefficient space. Parameter layout: per cluster, one entry per
// support node (w block first for the two-sided objectives, then h, then
// the log precision for the ARD objective).
inline double support_objective_with_gradient(const Graph& g, const std::vector<NodeSet>& supports,
                                              const QualitySpec& spec, const std::vector<double>& theta,
                                              std::vector<double>& grad) {
    detail::SupportProblem prob(g, supports, spec);
    if (static_cast<int>(theta.size()) != prob.dim)
        throw std::invalid_argument("support_objective_with_gradient: wrong parameter count");
    return prob.eval(theta, grad);
}

inline Clustering decode_support_parameters(const Graph& g, const std::vector<NodeSet>& supports,
                                            const QualitySpec& spec, const std::vector<double>& theta) {
    detail::SupportProblem prob(g, supports, spec);
    return prob.decode(theta);
}

// Maximize the quality over coefficients constrained to the given
// supports. Positivity comes from the log parameterization; the returned
// clustering is pruned at kSupportEps for reporting, while `quality` is
// the value attained by the optimizer.
inline OptResult optimize_given_support(const Graph& g, const std::vector<NodeSet>& supports,
                                        const QualitySpec& spec, const OptimizerConfig& cfg = {}) {
    detail::SupportProblem prob(g, supports, spec);
    OptResult best;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(derive_seed(cfg.seed, 1000 + restart));
        std::vector<double> theta(prob.dim);
        for (size_t c = 0; c < supports.size(); ++c) {
            int base = prob.offset[c];
            int ncoeff = static_cast<int>(supports[c].size()) * (prob.two_sided ? 2 : 1);
            for (int t = 0; t < ncoeff; ++t) theta[base + t] = rng.uniform(-1.6, 0.0);
            if (prob.with_precision) theta[base + ncoeff] = rng.uniform(0.0, 2.0);
        }
        std::vector<double> grad;
        if (prob.eval(theta, grad) == kNegInf) {
            // support cannot explain some positive edge; hopeless for any coefficients
            if (restart == 0) {
                best.clustering = prune_clustering(prob.decode(theta));
                best.quality = kNegInf;
                best.restart = 0;
            }
            continue;
        }
        LbfgsOptions lopt;
        lopt.max_iter = cfg.max_iter;
        lopt.f_tol = cfg.tol;
        std::vector<double> x = theta;
        double neg_q = lbfgs_minimize(
            x,
            [&](const std::vector<double>& xx, std::vector<double>& gg) {
                double q = prob.eval(xx, gg);
                for (double& v : gg) v = -v;
                return -q;
            },
            lopt);
        double q = -neg_q;
        if (restart == 0 || q > best.quality) {
            best.clustering = prune_clustering(prob.decode(x));
            best.quality = q;
            best.restart = restart;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Support-set search

struct CandidateFamily {
    std::string label;
    double cluster_size = 0.0;  // reported sweep label, e.g. cliques per cluster
    std::vector<NodeSet> supports;
};

struct SearchResult {
    size_t best_index = 0;
    OptResult best;
    std::vector<double> qualities;  // one per candidate, same order
    bool tie = false;
};

// Evaluates optimize_given_support on every candidate and keeps the
// argmax; deterministic order, ties resolved to the first found.
inline SearchResult support_search(const Graph& g, const std::vector<CandidateFamily>& candidates,
                                   const QualitySpec& spec, const OptimizerConfig& cfg = {}) {
    if (candidates.empty()) throw std::invalid_argument("support_search: no candidates");
    SearchResult out;
    for (size_t idx = 0; idx < candidates.size(); ++idx) {
        OptResult r = optimize_given_support(g, candidates[idx].supports, spec, cfg);
        out.qualities.push_back(r.quality);
        if (idx == 0 || r.quality > out.best.quality) {
            out.best = std::move(r);
            out.best_index = idx;
        }
    }
    for (size_t idx = 0; idx < candidates.size(); ++idx)
        if (idx != out.best_index && out.qualities[idx] == out.best.quality) out.tie = true;
    return out;
}

// Merge runs of r consecutive cliques into one cluster each (floor(n/r)
// full groups plus a remainder group), with a two-node cluster for every
// ring edge joining two different groups. r = 1 is one cluster per clique
// plus all bridge edges.
inline CandidateFamily ring_merge_family(int num_cliques, int clique_size, int granularity) {
    const int n = num_cliques;
    const int m = clique_size;
    const int r = granularity;
    if (r < 1 || r > n) throw std::invalid_argument("ring_merge_family: granularity out of range");
    CandidateFamily fam;
    const int groups = (n + r - 1) / r;
    fam.label = "merge_" + std::to_string(r);
    fam.cluster_size = static_cast<double>(n) / groups;
    std::vector<int> group_of(n);
    for (int k = 0; k < n; ++k) group_of[k] = std::min(k / r, groups - 1);
    for (int gi = 0; gi < groups; ++gi) {
        NodeSet s;
        for (int k = 0; k < n; ++k)
            if (group_of[k] == gi)
                for (int t = 0; t < m; ++t) s.push_back(k * m + t);
        fam.supports.push_back(sorted_node_set(std::move(s)));
    }
    if (n > 1) {
        for (int k = 0; k < n; ++k) {
            int next = (k + 1) % n;
            if (group_of[k] == group_of[next]) continue;
            NodeSet bridge = sorted_node_set({k * m + (m - 1), next * m});
            fam.supports.push_back(std::move(bridge));
        }
    }
    return fam;
}

inline std::vector<CandidateFamily> ring_merge_families(int num_cliques, int clique_size,
                                                        int max_granularity) {
    std::vector<CandidateFamily> out;
    for (int r = 1; r <= std::min(num_cliques, max_granularity); ++r)
        out.push_back(ring_merge_family(num_cliques, clique_size, r));
    return out;
}

namespace detail {

// support of the cluster for cliques [first, first+count) of a ring,
// extended by the partner endpoints of the two ring edges leaving the run
inline NodeSet ring_run_support(int num_cliques, int clique_size, int first, int count) {
    const int n = num_cliques;
    const int m = clique_size;
    NodeSet s;
    for (int k = first; k < first + count; ++k)
        for (int t = 0; t < m; ++t) s.push_back(((k % n) * m) + t);
    if (count < n) {
        s.push_back((((first - 1 + n) % n) * m) + m - 1);  // last node of the previous clique
        s.push_back((((first + count) % n) * m));          // first node of the next clique
    }
    return sorted_node_set(std::move(s));
}

}  // namespace detail

// Like ring_merge_family, but instead of separate two-node clusters the
// group clusters themselves extend to the partner endpoints of their
// outgoing ring edges. One cluster per group of r cliques, no extras;
// this is the natural candidate set for objectives that charge purely by
// cluster count.
inline CandidateFamily ring_extension_family(int num_cliques, int clique_size, int granularity) {
    const int n = num_cliques;
    const int r = granularity;
    if (r < 1 || r > n) throw std::invalid_argument("ring_extension_family: granularity out of range");
    CandidateFamily fam;
    const int groups = (n + r - 1) / r;
    fam.label = "ext_" + std::to_string(r);
    fam.cluster_size = static_cast<double>(n) / groups;
    for (int gi = 0; gi < groups; ++gi) {
        int first = gi * r;
        int count = std::min(r, n - first);
        fam.supports.push_back(detail::ring_run_support(n, clique_size, first, count));
    }
    return fam;
}

inline std::vector<CandidateFamily> ring_extension_families(int num_cliques, int clique_size,
                                                            int max_granularity) {
    std::vector<CandidateFamily> out;
    for (int r = 1; r <= std::min(num_cliques, max_granularity); ++r)
        out.push_back(ring_extension_family(num_cliques, clique_size, r));
    return out;
}

// Fig-style two-module candidates: (a) one cluster per module plus a
// cluster over the endpoints of between-module edges, (b) everything in
// one cluster.
inline std::vector<CandidateFamily> two_module_candidates(const Graph& g, int module_size) {
    if (g.num_nodes() != 2 * module_size)
        throw std::invalid_argument("two_module_candidates: graph is not two modules of the given size");
    CandidateFamily split;
    split.label = "split";
    split.cluster_size = 1.0;
    NodeSet left, right, bridge;
    for (int i = 0; i < module_size; ++i) left.push_back(i);
    for (int i = module_size; i < 2 * module_size; ++i) right.push_back(i);
    split.supports = {left, right};
    for (auto [u, v] : g.positive_edges())
        if (u < module_size && v >= module_size) {
            bridge.push_back(u);
            bridge.push_back(v);
        }
    bridge = sorted_node_set(std::move(bridge));
    if (!bridge.empty()) split.supports.push_back(bridge);

    CandidateFamily merged;
    merged.label = "merged";
    merged.cluster_size = 2.0;
    NodeSet all;
    for (int i = 0; i < 2 * module_size; ++i) all.push_back(i);
    merged.supports = {all};
    return {split, merged};
}

// All set partitions as support families; optionally each partition also
// gets a variant with a two-node cluster per uncovered positive edge, so
// likelihoods that must explain every edge stay finite.
inline std::vector<CandidateFamily> exhaustive_support_families(const Graph& g, bool add_bridges) {
    const int n = g.num_nodes();
    if (n > 10) throw std::invalid_argument("exhaustive_support_families: refused for n > 10");
    std::vector<CandidateFamily> out;
    for_each_partition(n, [&](const HardClustering& hc) {
        CandidateFamily fam;
        fam.label = "partition_" + std::to_string(out.size());
        std::vector<NodeSet> blocks(hc.num_clusters());
        for (int i = 0; i < n; ++i) blocks[hc.assignment[i]].push_back(i);
        fam.supports = blocks;
        out.push_back(fam);
        if (add_bridges) {
            CandidateFamily bridged = fam;
            bridged.label += "_bridged";
            bool any = false;
            for (auto [u, v] : g.positive_edges())
                if (hc.assignment[u] != hc.assignment[v]) {
                    bridged.supports.push_back({u, v});
                    any = true;
                }
            if (any) out.push_back(std::move(bridged));
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive search over hard partitions

// All q-optimal partitions (the full argmax set, with a tiny tolerance so
// exact ties are kept together).
inline std::vector<HardClustering> exhaustive_hard_optimum(const Graph& g, const QualitySpec& spec,
                                                           double rel_tol = 1e-9) {
    if (!std::holds_alternative<CpmParams>(spec) && !std::holds_alternative<SymNmfHardParams>(spec) &&
        !std::holds_alternative<ToyMaxMinParams>(spec))
        throw std::invalid_argument("exhaustive_hard_optimum: hard quality functions only");
    const int n = g.num_nodes();
    if (n > 10) throw std::invalid_argument("exhaustive_hard_optimum: refused for n > 10");
    std::vector<HardClustering> arg;
    std::vector<double> argq;
    double best = kNegInf;
    for_each_partition(n, [&](const HardClustering& hc) {
        double q = evaluate_hard(spec, g, hc);
        if (q > best) best = q;
        arg.push_back(hc);
        argq.push_back(q);
    });
    std::vector<HardClustering> out;
    double floor = best - rel_tol * std::max(1.0, std::fabs(best));
    for (size_t i = 0; i < arg.size(); ++i)
        if (argq[i] >= floor) out.push_back(std::move(arg[i]));
    return out;
}

}  // namespace nmfq
