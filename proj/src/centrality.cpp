#include "fmdgt/centrality.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace fmdgt {

NodeMetric betweenness_centrality(const CommGraph& g) {
    const int n = g.node_count;
    NodeMetric m;
    m.kind = MetricKind::betweenness_normalized;
    m.normalized = true;
    m.values.assign(n, 0.0);
    if (n < 3) return m;

    std::vector<double> raw(n, 0.0);
    std::vector<int> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::vector<int>> preds(n);
    std::vector<int> order;
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            order.push_back(v);
            for (int w : g.contacts[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) raw[w] += delta[w];
        }
    }

    // Each unordered pair was counted from both endpoints.
    const double scale = static_cast<double>(n - 1) * (n - 2) / 2.0;
    for (int v = 0; v < n; ++v) m.values[v] = raw[v] / 2.0 / scale;
    return m;
}

NodeMetric degree_vector(const CommGraph& g) {
    NodeMetric m;
    m.kind = MetricKind::degree_simple;
    m.normalized = false;
    m.values.reserve(g.node_count);
    for (const auto& c : g.contacts) m.values.push_back(static_cast<double>(c.size()));
    return m;
}

std::vector<int> top_k_ids(const NodeMetric& metric, int k) {
    const int n = static_cast<int>(metric.values.size());
    if (k < 0 || k > n) throw std::invalid_argument("top_k_ids: k out of range");
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        return metric.values[a] != metric.values[b] ? metric.values[a] > metric.values[b] : a < b;
    });
    ids.resize(k);
    return ids;
}

}  // namespace fmdgt
