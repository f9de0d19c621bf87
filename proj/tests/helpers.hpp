#ifndef FMDGT_TEST_HELPERS_HPP
#define FMDGT_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fmdgt/game.hpp"
#include "fmdgt/graph.hpp"
#include "fmdgt/rng.hpp"

namespace testutil {

using namespace fmdgt;

inline CommGraph graph_from_events(const std::vector<std::tuple<std::string, std::string>>& ev) {
    RawEventLog log;
    long long ts = 0;
    for (const auto& [s, d] : ev) log.events.push_back(RawEvent{s, d, ++ts});
    return build_comm_graph(log);
}

// Builds a graph with node ids fixed to 0..n-1 and the given weighted edges.
inline CommGraph graph_from_edges(int n,
                                  const std::vector<std::tuple<int, int, long long>>& edges) {
    CommGraph g;
    g.node_count = n;
    for (int i = 0; i < n; ++i) g.labels.push_back(std::to_string(i));
    std::map<std::pair<int, int>, long long> acc;
    for (const auto& [s, d, w] : edges) {
        if (s == d) continue;
        acc[{s, d}] += w;
    }
    g.in_msgs.assign(n, 0);
    g.out_msgs.assign(n, 0);
    g.contacts.assign(n, {});
    for (const auto& [pair, w] : acc) {
        g.edges.push_back(Edge{pair.first, pair.second, w});
        g.out_msgs[pair.first] += w;
        g.in_msgs[pair.second] += w;
        g.total_messages += w;
        g.contacts[pair.first].push_back(pair.second);
        g.contacts[pair.second].push_back(pair.first);
    }
    for (auto& c : g.contacts) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return g;
}

inline CommGraph random_graph(std::mt19937_64& rng, int n, int edge_pairs,
                              long long max_weight = 4) {
    std::vector<std::tuple<int, int, long long>> edges;
    for (int i = 0; i < edge_pairs; ++i) {
        int s = static_cast<int>(bounded_u64(rng, n));
        int d = static_cast<int>(bounded_u64(rng, n));
        if (s == d) continue;
        edges.emplace_back(s, d, 1 + static_cast<long long>(bounded_u64(rng, max_weight)));
    }
    return graph_from_edges(n, edges);
}

inline GameParams random_params(std::mt19937_64& rng, const CommGraph& g, AltruismModel model,
                                double a, StrategyLadder ladder = StrategyLadder::standard()) {
    double L = 5.0 + 195.0 * uniform01(rng);
    double f = 0.5 + 1.5 * uniform01(rng);
    AltruismSpec spec;
    spec.model = model;
    spec.a = a;
    return make_params(g, L, f, std::move(ladder), spec);
}

inline Profile random_profile(std::mt19937_64& rng, int n, int ladder_size) {
    Profile p;
    for (int i = 0; i < n; ++i)
        p.idx.push_back(static_cast<int>(bounded_u64(rng, ladder_size)));
    return p;
}

// ---------------------------------------------------------------------------
// Independent oracles. These recompute everything from the definitions with
// plain loops and never touch the log-domain incremental machinery.

// Explicit all-shortest-path enumeration, normalized by (n-1)(n-2)/2.
inline std::vector<double> bc_enumeration_oracle(const CommGraph& g) {
    const int n = g.node_count;
    std::vector<double> raw(n, 0.0);
    if (n < 3) return std::vector<double>(n, 0.0);
    for (int s = 0; s < n; ++s) {
        // BFS distances from s
        std::vector<int> dist(n, -1);
        dist[s] = 0;
        std::vector<int> q{s};
        for (std::size_t qi = 0; qi < q.size(); ++qi)
            for (int w : g.contacts[q[qi]])
                if (dist[w] < 0) {
                    dist[w] = dist[q[qi]] + 1;
                    q.push_back(w);
                }
        for (int t = s + 1; t < n; ++t) {
            if (dist[t] < 0) continue;
            // enumerate every shortest path t -> s by walking dist downhill
            std::vector<std::vector<int>> paths;
            std::vector<int> cur{t};
            auto dfs = [&](auto&& self, int v) -> void {
                if (v == s) {
                    paths.push_back(cur);
                    return;
                }
                for (int w : g.contacts[v])
                    if (dist[w] == dist[v] - 1) {
                        cur.push_back(w);
                        self(self, w);
                        cur.pop_back();
                    }
            };
            dfs(dfs, t);
            if (paths.empty()) continue;
            double sigma = static_cast<double>(paths.size());
            for (const auto& path : paths)
                for (std::size_t i = 1; i + 1 < path.size(); ++i) raw[path[i]] += 1.0 / sigma;
        }
    }
    double scale = static_cast<double>(n - 1) * (n - 2) / 2.0;
    std::vector<double> out(n);
    for (int v = 0; v < n; ++v) out[v] = raw[v] / scale;
    return out;
}

// Plain-product utility evaluation straight from the cost definitions.
struct DirectGame {
    const CommGraph& g;
    const GameParams& p;

    double rate(const Profile& prof, int u) const { return p.ladder.rate(prof.idx[u]); }

    double alpha(const Profile& prof, int u) const {
        double prod = 1.0;
        for (int v = 0; v < g.node_count; ++v)
            if (v != u) prod *= 1.0 - rate(prof, v);
        return prod;
    }

    double cp(const Profile& prof, int u) const {
        if (g.in_msgs[u] <= 0) return 0.0;
        return p.L *
               (1.0 - std::pow(1.0 - alpha(prof, u), static_cast<double>(g.in_msgs[u])));
    }

    double cbw(const Profile& prof, int u) const {
        return p.f * (static_cast<double>(g.in_msgs[u]) +
                      rate(prof, u) * static_cast<double>(g.total_messages - g.in_msgs[u]));
    }

    double utility(const Profile& prof, int u) const {
        double util = -cp(prof, u) - cbw(prof, u);
        if (p.a[u] != 0.0) {
            double sum = 0.0;
            if (p.model == AltruismModel::local) {
                for (int v : g.contacts[u]) sum += cp(prof, v);
            } else if (p.model == AltruismModel::global_) {
                for (int v = 0; v < g.node_count; ++v)
                    if (v != u) sum += cp(prof, v);
            }
            util -= p.a[u] * sum;
        }
        return util;
    }

    double welfare(const Profile& prof) const {
        double w = 0.0;
        for (int u = 0; u < g.node_count; ++u) w += utility(prof, u);
        return w;
    }
};

}  // namespace testutil

#endif
