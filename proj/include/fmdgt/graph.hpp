#ifndef FMDGT_GRAPH_HPP
#define FMDGT_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmdgt {

// One "SRC DST UNIXTS" line of a temporal edge list, in file order.
struct RawEvent {
    std::string src;
    std::string dst;
    long long timestamp = 0;
};

struct RawEventLog {
    std::vector<RawEvent> events;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

struct Edge {
    int src = 0;
    int dst = 0;
    long long msg_count = 0;  // multi-edges collapsed to a weight
};

// Directed weighted message graph plus the undirected contact relation.
// Node ids are compact 0..n-1 in order of first appearance in the event log.
// Immutable once built; safe to share across threads.
struct CommGraph {
    int node_count = 0;
    std::vector<std::string> labels;          // original label per node id
    std::vector<Edge> edges;                  // sorted by (src, dst), no self-loops
    std::vector<long long> in_msgs;           // weighted in-degree (genuine incoming messages)
    std::vector<long long> out_msgs;          // weighted out-degree
    std::vector<std::vector<int>> contacts;   // distinct undirected neighbors, sorted
    long long total_messages = 0;             // M = sum of edge weights
    long long dropped_self_loops = 0;         // messages discarded as self-loops
};

struct GraphStats {
    int node_count = 0;
    long long edge_pair_count = 0;  // distinct directed (src,dst) pairs
    long long total_messages = 0;
    long long max_in = 0;
    int isolated_count = 0;
    double density = 0.0;  // edge_pair_count / (n*(n-1))
    long long self_loops_dropped = 0;
};

// Parses "SRC DST UNIXTS" lines (any whitespace run separates fields; extra
// trailing tokens are ignored; lines starting with '#' are treated as
// comments). Malformed lines raise ParseError with a 1-based line number.
RawEventLog parse_temporal_edges(std::istream& in);
RawEventLog parse_temporal_edges_file(const std::string& path);

// Collapses the event log into a CommGraph. Self-loop events are dropped and
// counted; an empty log yields an empty graph.
CommGraph build_comm_graph(const RawEventLog& log);

// Keeps every second node by rank: nodes ordered by descending weighted total
// degree (in_msgs + out_msgs), ties by ascending node id; even ranks survive,
// odd ranks are discarded together with all incident edges.
CommGraph halve_graph(const CommGraph& g);

GraphStats graph_stats(const CommGraph& g);

std::string graph_stats_json(const GraphStats& s);

// Privacy-breach cost derived from the graph: M - max_u in_u + 1.
double derive_privacy_loss(const CommGraph& g);

}  // namespace fmdgt

#endif
