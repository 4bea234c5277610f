#include "gal/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gal/error.hpp"

namespace gal {

Graph::Graph(int num_classes, Eigen::MatrixXd features, std::vector<int> labels,
             const std::vector<std::pair<int, int>>& edges)
    : num_classes_(num_classes), features_(std::move(features)), labels_(std::move(labels)) {
    const int n = static_cast<int>(labels_.size());
    if (num_classes_ < 1) throw ValidationError("num_classes must be >= 1");
    if (features_.rows() != n)
        throw ValidationError("feature matrix has " + std::to_string(features_.rows()) +
                              " rows for " + std::to_string(n) + " labels");
    for (int i = 0; i < n; ++i) {
        int y = labels_[static_cast<std::size_t>(i)];
        if (y < 0 || y >= num_classes_)
            throw ValidationError("label " + std::to_string(y) + " of node " + std::to_string(i) +
                                  " outside {0.." + std::to_string(num_classes_ - 1) + "}");
    }
    if (!features_.allFinite()) throw ValidationError("features contain non-finite entries");

    adj_.assign(static_cast<std::size_t>(n), {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ValidationError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") references a node outside 0.." + std::to_string(n - 1));
        if (u == v) continue;  // self-loops dropped
        if (u > v) std::swap(u, v);
        if (!seen.emplace(u, v).second) continue;
        adj_[static_cast<std::size_t>(u)].push_back(v);
        adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    num_edges_ = seen.size();
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(int i, int j) const {
    const auto& nb = adj_[static_cast<std::size_t>(i)];
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(num_edges_);
    for (int i = 0; i < n(); ++i)
        for (int j : adj_[static_cast<std::size_t>(i)])
            if (i < j) out.emplace_back(i, j);
    return out;
}

Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

Eigen::VectorXd degree_centrality(const Graph& g) {
    Eigen::VectorXd d(g.n());
    for (int i = 0; i < g.n(); ++i) d[i] = static_cast<double>(g.degree(i));
    return d;
}

namespace {

Eigen::VectorXd power_iterate(const Graph& g, const Eigen::VectorXd& teleport_vec,
                              double teleport, int iterations) {
    const int n = g.n();
    Eigen::VectorXd pi = teleport_vec;
    Eigen::VectorXd next(n);
    for (int it = 0; it < iterations; ++it) {
        next.setZero();
        for (int j = 0; j < n; ++j) {
            int deg = g.degree(j);
            if (deg == 0) {
                next[j] += pi[j];  // dangling mass stays in place
            } else {
                double share = pi[j] / static_cast<double>(deg);
                for (int k : g.neighbors(j)) next[k] += share;
            }
        }
        pi = teleport * teleport_vec + (1.0 - teleport) * next;
    }
    return pi;
}

}  // namespace

Eigen::VectorXd personalized_pagerank(const Graph& g, int source, double teleport,
                                      int iterations) {
    if (source < 0 || source >= g.n())
        throw std::out_of_range("ppr source " + std::to_string(source) + " out of range");
    if (!(teleport > 0.0 && teleport <= 1.0))
        throw ValidationError("teleport probability must be in (0,1]");
    if (iterations < 1) throw ValidationError("ppr iterations must be >= 1");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(g.n());
    e[source] = 1.0;
    return power_iterate(g, e, teleport, iterations);
}

Eigen::VectorXd pagerank(const Graph& g, double teleport, int iterations) {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(g.n(), 1.0 / static_cast<double>(g.n()));
    return power_iterate(g, u, teleport, iterations);
}

Eigen::SparseMatrix<double> normalized_adjacency(const Graph& g) {
    const int n = g.n();
    Eigen::VectorXd inv_sqrt(n);
    for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g.degree(i) + 1.0);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.num_edges() + static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
        for (int j : g.neighbors(i)) trips.emplace_back(i, j, inv_sqrt[i] * inv_sqrt[j]);
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

}  // namespace gal
