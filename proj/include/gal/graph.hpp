#pragma once
// Node-classification instance and structural quantities.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <utility>
#include <vector>

namespace gal {

// Immutable undirected graph with features and labels. Adjacency is stored as
// sorted neighbor lists; it is symmetric with no self-loops by construction.
class Graph {
public:
    // Edges are symmetrized and deduplicated; self-loops are dropped.
    // Throws ValidationError on out-of-range labels/endpoints or non-finite features.
    Graph(int num_classes, Eigen::MatrixXd features, std::vector<int> labels,
          const std::vector<std::pair<int, int>>& edges);

    int n() const { return static_cast<int>(labels_.size()); }
    int num_classes() const { return num_classes_; }
    int feature_dim() const { return static_cast<int>(features_.cols()); }
    const Eigen::MatrixXd& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }

    const std::vector<int>& neighbors(int i) const { return adj_[static_cast<std::size_t>(i)]; }
    int degree(int i) const { return static_cast<int>(adj_[static_cast<std::size_t>(i)].size()); }
    bool has_edge(int i, int j) const;
    std::size_t num_edges() const { return num_edges_; }  // undirected count

    // Edge list with i < j, lexicographically sorted.
    std::vector<std::pair<int, int>> edge_list() const;

private:
    int num_classes_;
    Eigen::MatrixXd features_;
    std::vector<int> labels_;
    std::vector<std::vector<int>> adj_;
    std::size_t num_edges_ = 0;
};

// Row-wise L2 normalization; all-zero rows pass through unchanged.
Eigen::MatrixXd normalize_features(const Eigen::MatrixXd& x);

// Neighbor counts.
Eigen::VectorXd degree_centrality(const Graph& g);

// Power-iteration PPR from a single source:
//   pi <- teleport * e_source + (1 - teleport) * walk(pi)
// Isolated nodes keep their mass in place, so pi stays a distribution.
Eigen::VectorXd personalized_pagerank(const Graph& g, int source, double teleport,
                                      int iterations);

// Same dynamics with a uniform teleport vector (global PageRank centrality).
Eigen::VectorXd pagerank(const Graph& g, double teleport, int iterations);

// S = D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
Eigen::SparseMatrix<double> normalized_adjacency(const Graph& g);

}  // namespace gal
