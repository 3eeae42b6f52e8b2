// File formats:
//   graph JSON      {"n": int, "edges": [[i, j, w], ...]} with i < j, w > 0
//   edge list text  one "i j w" per line, node count inferred
//   clustering JSON {"clusters": [{"h": {"0": 0.5}, "w": {...}?, "beta": x?}, ...]}
//   quality JSON    {"qf": "local_prob", "node_prior": {"poisson": 1.0}, ...}
//   optimizer JSON  mirrors OptimizerConfig
// Loaders symmetrize graphs and tolerate unknown keys.

#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "nmfq/clustering.hpp"
#include "nmfq/graph.hpp"
#include "nmfq/optimize.hpp"
#include "nmfq/quality.hpp"

namespace nmfq {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Graph

inline json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (auto [i, j] : g.positive_edges()) edges.push_back({i, j, g.weight(i, j)});
    return json{{"n", g.num_nodes()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("edges"))
        throw std::invalid_argument("graph JSON needs \"n\" and \"edges\"");
    Graph g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw std::invalid_argument("graph JSON: edge must be [i, j, w]");
        int a = e[0].get<int>();
        int b = e[1].get<int>();
        double w = e[2].get<double>();
        if (a >= b) throw std::invalid_argument("graph JSON: edges must have i < j");
        if (w <= 0) throw std::invalid_argument("graph JSON: edge weights must be positive");
        g.set_weight(a, b, w);
    }
    return g;
}

inline std::string graph_to_edge_list(const Graph& g) {
    std::ostringstream out;
    out.precision(17);
    for (auto [i, j] : g.positive_edges()) out << i << ' ' << j << ' ' << g.weight(i, j) << '\n';
    return out.str();
}

inline Graph graph_from_edge_list(std::istream& in) {
    std::vector<std::tuple<int, int, double>> edges;
    int max_node = -1;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        int i, j;
        double w;
        if (!(row >> i >> j)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            throw std::invalid_argument("edge list: malformed line: " + line);
        }
        if (!(row >> w)) w = 1.0;
        if (i < 0 || j < 0 || w < 0) throw std::invalid_argument("edge list: negative entry");
        edges.emplace_back(i, j, w);
        max_node = std::max({max_node, i, j});
    }
    Graph g(max_node + 1);
    for (auto [i, j, w] : edges)
        if (i != j) g.set_weight(i, j, w);
    return g;
}

// ---------------------------------------------------------------------------
// Clustering

inline json clustering_to_json(const Clustering& cs) {
    json clusters = json::array();
    for (const auto& c : cs) {
        json jc;
        jc["h"] = json::object();
        for (const auto& [node, coeff] : c.h) jc["h"][std::to_string(node)] = coeff;
        if (c.w) {
            jc["w"] = json::object();
            for (const auto& [node, coeff] : *c.w) jc["w"][std::to_string(node)] = coeff;
        }
        if (c.precision) jc["beta"] = *c.precision;
        clusters.push_back(std::move(jc));
    }
    return json{{"clusters", clusters}};
}

inline Clustering clustering_from_json(const json& j) {
    Clustering out;
    for (const auto& jc : j.at("clusters")) {
        SoftCluster c;
        for (const auto& [key, value] : jc.at("h").items()) {
            double coeff = value.get<double>();
            if (coeff <= 0) throw std::invalid_argument("clustering JSON: coefficients must be positive");
            c.h[std::stoi(key)] = coeff;
        }
        if (jc.contains("w")) {
            c.w.emplace();
            for (const auto& [key, value] : jc.at("w").items()) (*c.w)[std::stoi(key)] = value.get<double>();
        }
        if (jc.contains("beta")) c.precision = jc.at("beta").get<double>();
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quality spec

inline json quality_to_json(const QualitySpec& spec) {
    json j{{"qf", quality_name(spec)}};
    if (const auto* p = std::get_if<CpmParams>(&spec)) j["gamma"] = p->gamma;
    if (const auto* p = std::get_if<GaussianNmfParams>(&spec)) j["sigma"] = p->sigma;
    if (const auto* p = std::get_if<BayNmfParams>(&spec)) {
        j["a"] = p->shape;
        j["b"] = p->rate;
    }
    if (const auto* p = std::get_if<LocalPriorConfig>(&spec)) {
        switch (p->node_prior) {
            case NodePrior::poisson: j["node_prior"] = json{{"poisson", p->lambda}}; break;
            case NodePrior::exactly_one: j["node_prior"] = "exactly_one"; break;
            case NodePrior::none: j["node_prior"] = "none"; break;
        }
        j["size_prior"] = p->size_prior == SizePrior::flat ? "flat" : "crp";
        j["beta"] = p->coeff_precision;
        j["edge"] = p->edge == EdgeModel::poisson ? "poisson" : "gaussian";
        j["kappa"] = p->kappa;
        if (p->fixed_normalization) j["fixed_normalization"] = true;
    }
    return j;
}

inline QualitySpec quality_from_json(const json& j) {
    const std::string name = j.at("qf").get<std::string>();
    if (name == "sym_nmf") return SymNmfParams{};
    if (name == "asym_nmf") return AsymNmfParams{};
    if (name == "sym_nmf_hard") return SymNmfHardParams{};
    if (name == "toy_maxmin") return ToyMaxMinParams{};
    if (name == "cpm") {
        CpmParams p;
        if (j.contains("gamma")) p.gamma = j.at("gamma").get<double>();
        return p;
    }
    if (name == "gauss_nmf") {
        GaussianNmfParams p;
        if (j.contains("sigma")) p.sigma = j.at("sigma").get<double>();
        return p;
    }
    if (name == "bay_nmf") {
        BayNmfParams p;
        if (j.contains("a")) p.shape = j.at("a").get<double>();
        if (j.contains("b")) p.rate = j.at("b").get<double>();
        return p;
    }
    if (name == "local_prob") {
        LocalPriorConfig p;
        if (j.contains("node_prior")) {
            const auto& np = j.at("node_prior");
            if (np.is_object()) {
                p.node_prior = NodePrior::poisson;
                p.lambda = np.at("poisson").get<double>();
            } else if (np == "exactly_one") {
                p.node_prior = NodePrior::exactly_one;
            } else if (np == "none") {
                p.node_prior = NodePrior::none;
            } else {
                throw std::invalid_argument("quality JSON: unknown node_prior");
            }
        }
        if (j.contains("size_prior")) {
            const std::string sp = j.at("size_prior").get<std::string>();
            if (sp == "flat") p.size_prior = SizePrior::flat;
            else if (sp == "crp") p.size_prior = SizePrior::crp;
            else throw std::invalid_argument("quality JSON: unknown size_prior");
        }
        if (j.contains("beta")) p.coeff_precision = j.at("beta").get<double>();
        if (j.contains("edge")) {
            const std::string e = j.at("edge").get<std::string>();
            if (e == "poisson") p.edge = EdgeModel::poisson;
            else if (e == "gaussian") p.edge = EdgeModel::gaussian_unit_variance;
            else throw std::invalid_argument("quality JSON: unknown edge likelihood");
        }
        if (j.contains("kappa")) p.kappa = j.at("kappa").get<double>();
        if (j.contains("fixed_normalization")) p.fixed_normalization = j.at("fixed_normalization").get<bool>();
        return p;
    }
    throw std::invalid_argument("quality JSON: unknown qf \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Optimizer config

inline json optimizer_to_json(const OptimizerConfig& cfg) {
    return json{{"max_iter", cfg.max_iter}, {"tol", cfg.tol},   {"restarts", cfg.restarts},
                {"seed", cfg.seed},         {"eps", cfg.eps}};
}

inline OptimizerConfig optimizer_from_json(const json& j) {
    OptimizerConfig cfg;
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("restarts")) cfg.restarts = j.at("restarts").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    return cfg;
}

}  // namespace nmfq
