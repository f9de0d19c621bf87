#ifndef FMDGT_CENTRALITY_HPP
#define FMDGT_CENTRALITY_HPP

#include <vector>

#include "fmdgt/graph.hpp"

namespace fmdgt {

enum class MetricKind { betweenness_normalized, degree_simple };

struct NodeMetric {
    MetricKind kind = MetricKind::degree_simple;
    bool normalized = false;
    std::vector<double> values;
};

// Brandes accumulation on the undirected simple contact graph: unweighted
// shortest paths, fractional credit across equal-length paths, endpoints
// excluded, normalized by (n-1)(n-2)/2. Graphs with n < 3 get all zeros.
NodeMetric betweenness_centrality(const CommGraph& g);

// Simple undirected degree |contacts[u]|.
NodeMetric degree_vector(const CommGraph& g);

// Ids of the k largest values, ties broken by ascending id. k > n is an error.
std::vector<int> top_k_ids(const NodeMetric& metric, int k);

}  // namespace fmdgt

#endif
