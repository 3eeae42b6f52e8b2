#include <doctest.h>

#include "nmfq/clustering.hpp"
#include "oracles.hpp"

using namespace nmfq;

TEST_CASE("support") {
    SoftCluster c = make_cluster({{2, 0.5}, {7, 1.0}});
    CHECK(support(c) == NodeSet{2, 7});

    SoftCluster empty;
    CHECK(support(empty).empty());

    SoftCluster both;
    both.h = {{1, 0.1}};
    both.w = std::map<int, double>{{3, 0.2}};
    CHECK(support(both) == NodeSet{1, 3});

    CHECK_THROWS_AS(make_cluster({{0, 0.0}}), std::invalid_argument);
}

TEST_CASE("clustering support") {
    CHECK(clustering_support({}).empty());
    Clustering disjoint = {unit_cluster({0, 1}), unit_cluster({2})};
    CHECK(clustering_support(disjoint) == NodeSet{0, 1, 2});
    Clustering overlapping = {unit_cluster({0, 1}), unit_cluster({1, 2})};
    CHECK(clustering_support(overlapping) == NodeSet{0, 1, 2});
}

TEST_CASE("symmetric difference") {
    Clustering x = {unit_cluster({0, 1}), unit_cluster({2})};
    CHECK(symmetric_difference(x, x).empty());
    CHECK(symmetric_difference(x, {}) == x);

    SoftCluster a = unit_cluster({0});
    SoftCluster b = unit_cluster({1});
    SoftCluster c = unit_cluster({2});
    Clustering lhs = {a, b};
    Clustering rhs = {b, c};
    Clustering diff = symmetric_difference(lhs, rhs);
    REQUIRE(diff.size() == 2);
    CHECK(diff[0] == a);
    CHECK(diff[1] == c);

    // multiset semantics: duplicates are counted, not collapsed
    Clustering twice = {a, a};
    Clustering once = {a};
    CHECK(symmetric_difference(twice, once) == once);

    Rng rng(17);
    for (int t = 0; t < 30; ++t) {
        Clustering cs = oracle::random_soft_clustering(rng, 6, 4);
        CHECK(symmetric_difference(cs, cs).empty());
        CHECK(symmetric_difference(cs, {}) == cs);
    }
}

TEST_CASE("union support distributes") {
    Rng rng(23);
    for (int t = 0; t < 30; ++t) {
        Clustering a = oracle::random_soft_clustering(rng, 7, 3);
        Clustering b = oracle::random_soft_clustering(rng, 7, 3);
        CHECK(clustering_support(clustering_union(a, b)) ==
              node_set_union(clustering_support(a), clustering_support(b)));
    }
}

TEST_CASE("harden") {
    Graph g = empty_graph(1);
    Clustering cs(4);
    cs[0].h[0] = 0.1;
    cs[1].h[0] = 0.05;
    cs[2].h[0] = 0.2306;
    cs[3].h[0] = 0.2311;
    CHECK(harden(cs, g).assignment == std::vector<int>{3});

    Graph g5 = complete_graph(5);
    Clustering one = {unit_cluster({0, 1, 2, 3, 4})};
    CHECK(harden(one, g5).assignment == std::vector<int>(5, 0));

    // exact tie goes to the lowest cluster index
    Clustering tie(5);
    tie[1].h[0] = 0.5;
    tie[4].h[0] = 0.5;
    CHECK(harden(tie, empty_graph(1)).assignment == std::vector<int>{1});

    Clustering missing = {unit_cluster({0})};
    CHECK_THROWS_AS(harden(missing, empty_graph(2)), std::invalid_argument);

    // the assigned cluster always contains the node in its support
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        int n = 3 + rng.next_below(5);
        Clustering cs2 = oracle::random_soft_clustering(rng, n, 4);
        cs2.push_back(unit_cluster([&] {
            NodeSet all;
            for (int i = 0; i < n; ++i) all.push_back(i);
            return all;
        }()));
        HardClustering hc = harden(cs2, empty_graph(n));
        for (int i = 0; i < n; ++i) {
            NodeSet s = support(cs2[hc.assignment[i]]);
            CHECK(std::binary_search(s.begin(), s.end(), i));
        }
    }
}

TEST_CASE("embed") {
    Clustering cs = {unit_cluster({0, 1})};
    CHECK(embed(cs, 0) == cs);
    Clustering shifted = embed(cs, 50);
    CHECK(support(shifted[0]) == NodeSet{50, 51});
    CHECK(embed(embed(cs, 3), 4) == embed(cs, 7));
}

TEST_CASE("pruning and partitions") {
    Clustering cs(1);
    cs[0].h = {{0, 1.0}, {1, 1e-12}};
    Clustering pruned = prune_clustering(cs);
    CHECK(support(pruned[0]) == NodeSet{0});

    Graph g = empty_graph(3);
    Clustering part = {unit_cluster({0, 2}), unit_cluster({1})};
    HardClustering hc = as_partition(part, g);
    CHECK(hc.assignment == std::vector<int>{0, 1, 0});
    CHECK_THROWS_AS(as_partition({unit_cluster({0})}, g), std::invalid_argument);
    CHECK_THROWS_AS(as_partition({unit_cluster({0, 1}), unit_cluster({1, 2})}, g),
                    std::invalid_argument);
}
