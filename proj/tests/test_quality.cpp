#include <doctest.h>

#include <cmath>

#include "nmfq/partition.hpp"
#include "nmfq/quality.hpp"
#include "oracles.hpp"

using namespace nmfq;

namespace {

Graph graph_from_matrix(const Matrix& m) {
    Graph g(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j)
            if (m(i, j) > 0) g.set_weight(i, j, m(i, j));
    return g;
}

bool close(double a, double b, double tol = 1e-12) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("predicted adjacency") {
    Graph g = empty_graph(3);
    Clustering one = {unit_cluster({0, 1})};
    Matrix ahat = predicted_adjacency(one, g, PredictionMode::symmetric);
    CHECK(ahat(0, 1) == 1.0);
    CHECK(ahat(1, 0) == 1.0);
    CHECK(ahat(0, 0) == 1.0);
    CHECK(ahat(2, 2) == 0.0);

    Clustering two = {unit_cluster({0, 1}), unit_cluster({0, 1})};
    CHECK(predicted_adjacency(two, g, PredictionMode::symmetric)(0, 1) == 2.0);

    CHECK(predicted_adjacency({}, g, PredictionMode::symmetric) == Matrix(3, 3, 0.0));
    CHECK_THROWS_AS(predicted_adjacency(one, g, PredictionMode::asymmetric), std::invalid_argument);
}

TEST_CASE("sym nmf quality") {
    // perfect reconstruction scores zero
    Rng rng(41);
    Clustering cs = oracle::random_soft_clustering(rng, 4, 2);
    Graph g = graph_from_matrix(predicted_adjacency(cs, empty_graph(4), PredictionMode::symmetric));
    CHECK(close(q_sym_nmf(g, cs), 0.0, 1e-9));

    Graph k3 = complete_graph(3);
    CHECK(q_sym_nmf(k3, {}) == -0.5 * k3.total_squared_weight());
    CHECK(q_sym_nmf(k3, {unit_cluster({0, 1, 2})}) == -1.5);  // three diagonal residuals of -1
}

TEST_CASE("asym nmf quality") {
    Graph k3 = complete_graph(3);
    Rng rng(43);
    Clustering cs = oracle::random_soft_clustering(rng, 3, 2, /*two_sided=*/true);
    Clustering mirrored = cs;
    for (auto& c : mirrored) *c.w = c.h;  // w = h reproduces the symmetric value
    Clustering plain;
    for (const auto& c : mirrored) plain.push_back(make_cluster(c.h));
    CHECK(close(q_asym_nmf(k3, mirrored), q_sym_nmf(k3, plain)));
    CHECK(q_asym_nmf(k3, {}) == -0.5 * k3.total_squared_weight());

    Graph pair = empty_graph(2);
    pair.set_weight(0, 1, 1.0);
    SoftCluster directed;
    directed.w = std::map<int, double>{{0, 1.0}};
    directed.h = {{1, 1.0}};
    // ahat only predicts the (0,1) entry; the (1,0) residual remains
    CHECK(q_asym_nmf(pair, {directed}) == -0.5);
    CHECK(close(q_asym_nmf(pair, {directed}), oracle::asym_nmf(pair, {directed})));
}

TEST_CASE("cpm quality") {
    CpmParams half{0.5};
    Graph edgeless = empty_graph(4);
    HardClustering singletons{{0, 1, 2, 3}};
    CHECK(q_cpm(edgeless, singletons, half) == -0.5 * 4);

    Graph k3 = complete_graph(3);
    HardClustering merged{{0, 0, 0}};
    CHECK(q_cpm(k3, merged, half) == 1.5);  // 6*(1-1/2) + 3*(0-1/2)

    CpmParams zero{0.0};
    Rng rng(47);
    for (int t = 0; t < 20; ++t) {
        Graph g = oracle::random_graph(rng, 5);
        HardClustering hc = oracle::random_partition(rng, 5);
        double within = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (hc.assignment[i] == hc.assignment[j]) within += g.weight(i, j);
        CHECK(close(q_cpm(g, hc, zero), within));
    }
}

TEST_CASE("hard sym nmf and the gamma = 1/2 identity") {
    Graph edgeless = empty_graph(4);
    HardClustering singletons{{0, 1, 2, 3}};
    CHECK(q_sym_nmf_hard(edgeless, singletons) == -0.5 * 4);
    CHECK(q_sym_nmf_hard(empty_graph(0), HardClustering{}) == 0.0);

    Rng rng(53);
    CpmParams half{0.5};
    for (int t = 0; t < 15; ++t) {
        int n = 2 + rng.next_below(5);
        Graph g = oracle::random_graph(rng, n, false, 0.7);
        double constant = -0.5 * g.total_squared_weight();
        for_each_partition(n, [&](const HardClustering& hc) {
            CHECK(close(q_sym_nmf_hard(g, hc) - q_cpm(g, hc, half), constant, 1e-9));
        });
    }
}

TEST_CASE("bay nmf quality") {
    BayNmfParams p;  // a = 5, b = 2

    // frozen small instance: 2 nodes, 1 unit edge, one cluster w = h = (1,1), beta = 1
    Graph pair = empty_graph(2);
    pair.set_weight(0, 1, 1.0);
    SoftCluster c;
    c.h = {{0, 1.0}, {1, 1.0}};
    c.w = c.h;
    c.precision = 1.0;
    CHECK(q_bay_nmf(pair, {c}, p) == -8.0);
    CHECK(close(q_bay_nmf(pair, {c}, p), oracle::bay_nmf(pair, {c}, 5.0, 2.0)));

    // an empty cluster adds n log(beta) - (beta b - (a-1) log beta); for
    // large beta this is a bonus
    SoftCluster empty;
    empty.w.emplace();
    empty.precision = 27.0;
    double with = q_bay_nmf(pair, {c, empty}, p);
    double without = q_bay_nmf(pair, {c}, p);
    double expected = 2.0 * std::log(27.0) - (27.0 * 2.0 - 4.0 * std::log(27.0));
    CHECK(close(with - without, expected));

    CHECK(q_bay_nmf(empty_graph(2), {}, p) == 0.0);

    // v > 0 with vhat = 0 evaluates to an explicit minus infinity
    SoftCluster off;
    off.h = {{0, 1.0}};
    off.w = std::map<int, double>{{0, 1.0}};
    off.precision = 1.0;
    CHECK(q_bay_nmf(pair, {off}, p) == kNegInf);

    CHECK_THROWS_AS(q_bay_nmf(pair, {unit_cluster({0, 1})}, p), std::invalid_argument);
}

TEST_CASE("gaussian nmf quality") {
    GaussianNmfParams p{1.0};
    Graph k3 = complete_graph(3);
    double S = k3.total_squared_weight();
    CHECK(close(q_gauss_nmf(k3, {}, p), -S / 2 + 9.0 * std::log(std::sqrt(2.0 * M_PI))));

    // adding an empty cluster changes q by exactly |V| log sqrt(pi sigma^2 / 2)
    Rng rng(59);
    Clustering cs = oracle::random_soft_clustering(rng, 3, 2);
    Clustering padded = cs;
    padded.push_back(SoftCluster{});
    CHECK(close(q_gauss_nmf(k3, padded, p) - q_gauss_nmf(k3, cs, p),
                3.0 * std::log(std::sqrt(M_PI / 2.0))));

    // difference to the plain objective is the regularizer plus constants
    double reg = 0.0;
    for (const auto& c : cs)
        for (const auto& [i, hv] : c.h) reg += hv * hv;
    double expect = -reg / 2.0 + 9.0 * std::log(std::sqrt(2.0 * M_PI)) +
                    3.0 * cs.size() * std::log(std::sqrt(M_PI / 2.0));
    CHECK(close(q_gauss_nmf(k3, cs, p) - q_sym_nmf(k3, cs), expect));
}

TEST_CASE("local probabilistic quality") {
    LocalPriorConfig p;  // poisson(1) node prior, flat sizes, beta 1, poisson edges

    // a node covered by no cluster contributes log f(0) = -lambda
    Graph lone = empty_graph(1);
    CHECK(close(q_local_prob(lone, {}, p), -1.0));

    // frozen 2-node instance: q = log(2/pi) - 7
    Graph pair = empty_graph(2);
    pair.set_weight(0, 1, 1.0);
    Clustering one = {unit_cluster({0, 1})};
    CHECK(close(q_local_prob(pair, one, p), std::log(2.0 / M_PI) - 7.0));
    CHECK(close(q_local_prob(pair, one, p), oracle::local_prob(pair, one, p)));

    // with every node in exactly one cluster the exactly_one prior's node
    // term vanishes, matching the hard-clustering flat-prior regime
    LocalPriorConfig hard = p;
    hard.node_prior = NodePrior::exactly_one;
    LocalPriorConfig none = p;
    none.node_prior = NodePrior::none;
    CHECK(close(q_local_prob(pair, one, hard), q_local_prob(pair, one, none)));

    // violations of exactly_one and uncovered positive edges go to -inf
    CHECK(q_local_prob(pair, {}, hard) == kNegInf);
    CHECK(q_local_prob(pair, {}, p) == kNegInf);

    Graph frac = empty_graph(2);
    frac.set_weight(0, 1, 0.5);
    CHECK_THROWS_AS(q_local_prob(frac, one, p), std::invalid_argument);

    LocalPriorConfig gauss = p;
    gauss.edge = EdgeModel::gaussian_unit_variance;
    CHECK(std::isfinite(q_local_prob(frac, one, gauss)));
}

TEST_CASE("node prior is linear in log lambda") {
    Rng rng(61);
    Graph g = oracle::random_graph(rng, 6, true);
    Clustering c1 = oracle::random_soft_clustering(rng, 6, 3);
    Clustering c2 = oracle::random_soft_clustering(rng, 6, 3);
    auto total_coverage = [&](const Clustering& cs) {
        double t = 0.0;
        for (const auto& c : cs) t += static_cast<double>(support(c).size());
        return t;
    };
    LocalPriorConfig lo, hi;
    lo.edge = hi.edge = EdgeModel::gaussian_unit_variance;
    lo.lambda = 0.3;
    hi.lambda = 1.7;
    double d_hi = q_local_prob(g, c1, hi) - q_local_prob(g, c2, hi);
    double d_lo = q_local_prob(g, c1, lo) - q_local_prob(g, c2, lo);
    double slope = total_coverage(c1) - total_coverage(c2);
    CHECK(close(d_hi - d_lo, slope * (std::log(hi.lambda) - std::log(lo.lambda))));
}

TEST_CASE("toy maxmin quality") {
    Clustering proof1 = {unit_cluster({6}), unit_cluster({0, 1, 2, 3}), unit_cluster({4}),
                         unit_cluster({5})};
    CHECK(toy_maxmin_quality(proof1) == 5.0);
    Clustering proof2 = {unit_cluster({6}), unit_cluster({0, 1, 2}), unit_cluster({3, 4, 5})};
    CHECK(toy_maxmin_quality(proof2) == 4.0);
    NodeSet all;
    for (int i = 0; i < 9; ++i) all.push_back(i);
    CHECK(toy_maxmin_quality({unit_cluster(all)}) == 18.0);
    CHECK_THROWS_AS(toy_maxmin_quality(Clustering{}), std::invalid_argument);
}

TEST_CASE("additive decomposition") {
    Graph k3 = complete_graph(3);
    Rng rng(67);

    // sym_nmf: everything lives in the edge terms
    Clustering cs = oracle::random_soft_clustering(rng, 3, 2);
    AdditiveParts parts = additive_parts(SymNmfParams{}, k3, cs);
    CHECK(parts.graph_term == 0.0);
    for (double x : parts.cluster_terms) CHECK(x == 0.0);
    for (double x : parts.node_terms) CHECK(x == 0.0);
    Matrix ahat = predicted_adjacency(cs, k3, PredictionMode::symmetric);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double r = k3.weight(i, j) - ahat(i, j);
            CHECK(close(parts.edge_terms(i, j), -0.5 * r * r));
        }

    // local_prob: node term log f, cluster term log g plus the coefficient
    // prior, edge term the edge log-likelihood, graph term kappa
    LocalPriorConfig lp;
    lp.kappa = 0.25;
    Clustering one = {unit_cluster({0, 1, 2})};
    AdditiveParts lparts = additive_parts(QualitySpec{lp}, k3, one);
    CHECK(lparts.graph_term == 0.25);
    for (double x : lparts.node_terms) CHECK(close(x, -1.0));
    CHECK(lparts.cluster_terms.size() == 1);
    CHECK(close(lparts.cluster_terms[0], 3.0 * 0.5 * std::log(2.0 / M_PI) - 1.5));
    CHECK(close(lparts.total(), q_local_prob(k3, one, lp)));

    // refusal for the ARD objective names the offending term
    try {
        additive_parts(BayNmfParams{}, k3, {});
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("2|V| log beta") != std::string::npos);
    }
    LocalPriorConfig fixed = lp;
    fixed.fixed_normalization = true;
    CHECK_THROWS_AS(additive_parts(QualitySpec{fixed}, k3, one), std::invalid_argument);
    CHECK_THROWS_AS(additive_parts(ToyMaxMinParams{}, k3, one), std::invalid_argument);

    // decomposition consistency on randomized instances
    for (int t = 0; t < 40; ++t) {
        int n = 3 + rng.next_below(10);
        Graph g = oracle::random_graph(rng, n, true);
        Clustering soft = oracle::random_soft_clustering(rng, n, 4);
        std::vector<QualitySpec> specs = {SymNmfParams{}, GaussianNmfParams{1.3}};
        LocalPriorConfig cover_free;
        cover_free.edge = EdgeModel::gaussian_unit_variance;
        cover_free.size_prior = SizePrior::crp;
        specs.push_back(cover_free);
        for (const auto& spec : specs) {
            AdditiveParts ap = additive_parts(spec, g, soft);
            double direct = evaluate(spec, g, soft);
            CHECK(close(ap.total(), direct, 1e-9));
        }
        // the asymmetric and hard variants need suitable clusterings
        Clustering twosided = oracle::random_soft_clustering(rng, n, 4, true);
        AdditiveParts aa = additive_parts(AsymNmfParams{}, g, twosided);
        CHECK(close(aa.total(), q_asym_nmf(g, twosided), 1e-9));
        HardClustering hc = oracle::random_partition(rng, n);
        AdditiveParts ac = additive_parts(CpmParams{0.5}, g, to_clustering(hc));
        CHECK(close(ac.total(), q_cpm(g, hc, CpmParams{0.5}), 1e-9));
    }
}

TEST_CASE("evaluations are pure: identical inputs give bit-identical values") {
    Rng rng(73);
    Graph g = oracle::random_graph(rng, 6, true);
    Clustering cs = oracle::random_soft_clustering(rng, 6, 3);
    LocalPriorConfig lp;
    lp.edge = EdgeModel::gaussian_unit_variance;
    CHECK(q_local_prob(g, cs, lp) == q_local_prob(g, cs, lp));
    CHECK(q_sym_nmf(g, cs) == q_sym_nmf(g, cs));
    CHECK(q_gauss_nmf(g, cs, GaussianNmfParams{0.8}) == q_gauss_nmf(g, cs, GaussianNmfParams{0.8}));
}

TEST_CASE("oracle agreement on random instances") {
    Rng rng(71);
    for (int t = 0; t < 30; ++t) {
        int n = 2 + rng.next_below(7);
        Graph g = oracle::random_graph(rng, n, true);
        Clustering soft = oracle::random_soft_clustering(rng, n, 3);
        CHECK(close(q_sym_nmf(g, soft), oracle::sym_nmf(g, soft)));
        Clustering pair = oracle::random_soft_clustering(rng, n, 3, true, true);
        CHECK(close(q_asym_nmf(g, pair), oracle::asym_nmf(g, pair)));
        HardClustering hc = oracle::random_partition(rng, n);
        CHECK(close(q_cpm(g, hc, CpmParams{0.7}), oracle::cpm(g, hc.assignment, 0.7)));
        CHECK(close(q_sym_nmf_hard(g, hc), oracle::sym_nmf_hard(g, hc.assignment)));
        LocalPriorConfig lp;
        lp.size_prior = SizePrior::crp;
        lp.edge = EdgeModel::gaussian_unit_variance;  // random supports need not cover every edge
        CHECK(close(q_local_prob(g, soft, lp), oracle::local_prob(g, soft, lp)));
        SoftCluster everything;
        for (int i = 0; i < n; ++i) everything.h[i] = 0.3 + 0.1 * i;
        everything.w = everything.h;
        everything.precision = 2.0;
        Clustering covered = pair;
        covered.push_back(everything);  // full coverage keeps the Poisson fit finite
        CHECK(close(q_bay_nmf(g, covered, BayNmfParams{}), oracle::bay_nmf(g, covered, 5.0, 2.0)));
    }
}
