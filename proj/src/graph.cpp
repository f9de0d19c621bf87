#include "fmdgt/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace fmdgt {

namespace {

bool parse_ll(const std::string& tok, long long& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    errno = 0;
    long long v = std::strtoll(tok.c_str(), &end, 10);
    if (errno != 0 || end != tok.c_str() + tok.size()) return false;
    out = v;
    return true;
}

}  // namespace

RawEventLog parse_temporal_edges(std::istream& in) {
    RawEventLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string src, dst, ts_tok;
        if (!(ls >> src)) continue;  // blank line
        if (src[0] == '#') continue;
        if (!(ls >> dst) || !(ls >> ts_tok))
            throw ParseError("expected at least 3 whitespace-separated fields", lineno);
        long long ts = 0;
        if (!parse_ll(ts_tok, ts))
            throw ParseError("timestamp is not an integer: '" + ts_tok + "'", lineno);
        log.events.push_back(RawEvent{std::move(src), std::move(dst), ts});
    }
    return log;
}

RawEventLog parse_temporal_edges_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open dataset file: " + path);
    return parse_temporal_edges(f);
}

namespace {

// Rebuilds every derived field from the collapsed edge list.
void finalize(CommGraph& g) {
    int n = g.node_count;
    g.in_msgs.assign(n, 0);
    g.out_msgs.assign(n, 0);
    g.contacts.assign(n, {});
    g.total_messages = 0;
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (const Edge& e : g.edges) {
        g.in_msgs[e.dst] += e.msg_count;
        g.out_msgs[e.src] += e.msg_count;
        g.total_messages += e.msg_count;
        g.contacts[e.src].push_back(e.dst);
        g.contacts[e.dst].push_back(e.src);
    }
    for (auto& c : g.contacts) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
}

}  // namespace

CommGraph build_comm_graph(const RawEventLog& log) {
    CommGraph g;
    std::unordered_map<std::string, int> ids;
    ids.reserve(log.events.size() * 2);
    auto intern = [&](const std::string& label) {
        auto [it, inserted] = ids.emplace(label, g.node_count);
        if (inserted) {
            ++g.node_count;
            g.labels.push_back(label);
        }
        return it->second;
    };
    std::map<std::pair<int, int>, long long> weights;
    for (const RawEvent& ev : log.events) {
        int s = intern(ev.src);
        int d = intern(ev.dst);
        if (s == d) {
            ++g.dropped_self_loops;
            continue;
        }
        weights[{s, d}] += 1;
    }
    g.edges.reserve(weights.size());
    for (const auto& [pair, w] : weights) g.edges.push_back(Edge{pair.first, pair.second, w});
    finalize(g);
    return g;
}

CommGraph halve_graph(const CommGraph& g) {
    std::vector<int> order(g.node_count);
    std::iota(order.begin(), order.end(), 0);
    std::vector<long long> deg(g.node_count);
    for (int u = 0; u < g.node_count; ++u) deg[u] = g.in_msgs[u] + g.out_msgs[u];
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
    });
    std::vector<char> keep(g.node_count, 0);
    for (std::size_t rank = 0; rank < order.size(); rank += 2) keep[order[rank]] = 1;

    CommGraph h;
    std::vector<int> remap(g.node_count, -1);
    for (int u = 0; u < g.node_count; ++u) {  // ascending old id keeps first-appearance order
        if (!keep[u]) continue;
        remap[u] = h.node_count++;
        h.labels.push_back(g.labels[u]);
    }
    for (const Edge& e : g.edges)
        if (keep[e.src] && keep[e.dst])
            h.edges.push_back(Edge{remap[e.src], remap[e.dst], e.msg_count});
    h.dropped_self_loops = g.dropped_self_loops;
    finalize(h);
    return h;
}

GraphStats graph_stats(const CommGraph& g) {
    GraphStats s;
    s.node_count = g.node_count;
    s.edge_pair_count = static_cast<long long>(g.edges.size());
    s.total_messages = g.total_messages;
    s.self_loops_dropped = g.dropped_self_loops;
    for (long long in : g.in_msgs) s.max_in = std::max(s.max_in, in);
    for (const auto& c : g.contacts)
        if (c.empty()) ++s.isolated_count;
    if (g.node_count > 1)
        s.density = static_cast<double>(s.edge_pair_count) /
                    (static_cast<double>(g.node_count) * (g.node_count - 1));
    return s;
}

std::string graph_stats_json(const GraphStats& s) {
    nlohmann::json j{{"node_count", s.node_count},
                     {"edge_pair_count", s.edge_pair_count},
                     {"total_messages", s.total_messages},
                     {"max_in", s.max_in},
                     {"isolated_count", s.isolated_count},
                     {"density", s.density},
                     {"self_loops_dropped", s.self_loops_dropped}};
    return j.dump(2);
}

double derive_privacy_loss(const CommGraph& g) {
    long long max_in = 0;
    for (long long in : g.in_msgs) max_in = std::max(max_in, in);
    if (g.total_messages < max_in) throw std::logic_error("total_messages < max_in");
    return static_cast<double>(g.total_messages - max_in + 1);
}

}  // namespace fmdgt
