#ifndef FMDGT_DYNAMICS_HPP
#define FMDGT_DYNAMICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fmdgt/game.hpp"

namespace fmdgt {

enum class InitKind { threshold, sorted, random, uniform, explicit_profile };
enum class MetricProperty { bc, degree };
enum class Interp { linear, exponential };

// How the starting profile of a run is produced.
struct InitSpec {
    InitKind kind = InitKind::random;
    MetricProperty property = MetricProperty::bc;  // threshold / sorted
    double cutoff = 0.0;                           // threshold
    int level_idx = 0;                             // threshold / uniform
    Interp interp = Interp::linear;                // sorted
    std::uint64_t seed = 0;                        // random
    Profile explicit_prof;                         // explicit_profile

    std::string label(const StrategyLadder& ladder) const;
};

// Nodes with metric value strictly above the cutoff start at level_idx,
// everyone else at rate 0.
Profile init_threshold(const CommGraph& g, const NodeMetric& metric, double cutoff, int level_idx,
                       const StrategyLadder& ladder);

// Nodes sorted by metric descending (ties ascending id) are split into 10
// buckets mapped to rates 2^-1..2^-10. linear: bucket size floor(n/10),
// remainder appended to the last bucket; exponential: bucket sizes 1,2,4,...
// with the last bucket taking the rest. Requires the standard 11-rate ladder.
Profile init_sorted(const CommGraph& g, const NodeMetric& metric, Interp interp,
                    const StrategyLadder& ladder);

// Each index drawn independently and uniformly from the ladder.
Profile init_random(const CommGraph& g, const StrategyLadder& ladder, std::uint64_t seed);

// Dispatches on spec.kind, computing the node metric when one is needed.
Profile realize_init(const CommGraph& g, const InitSpec& spec, const StrategyLadder& ladder);

struct TraceEntry {
    long long iteration = 0;
    int node = 0;
    int old_idx = 0;
    int new_idx = 0;
    double gain = 0.0;
    double objective_after = 0.0;  // welfare after the move
};

enum class RunObjective { nash, social };

struct BrdOptions {
    double epsilon = 1e-5;
    bool relative_epsilon = false;  // gain > eps*|current objective| instead of gain > eps
    long long max_iters = 200000;
    long long trace_thinning = 1;  // keep every k-th entry (last entry always kept); 0 = no trace
};

struct RunRecord {
    std::string init_label;
    std::uint64_t seed = 0;
    RunObjective objective = RunObjective::nash;
    long long iterations = 0;
    bool converged = false;
    Profile terminal;
    CostBreakdown breakdown;
    std::vector<TraceEntry> trace;
    long long trace_thinning = 1;
    double wall_time_sec = 0.0;
};

// Maximum-gain best-response dynamics on own utilities: each iteration the
// single (node, +/-1 step) move with the highest gain is applied, ties going
// to the smaller node id and to increments over decrements, until no move
// gains more than epsilon.
RunRecord brd_run(const CommGraph& g, const GameParams& params, const Profile& init,
                  const BrdOptions& opts = {});

// Same loop on the welfare objective. When single steps stall, improving
// single-coordinate full-ladder jumps are applied (and single-step dynamics
// resumed) so the terminal admits no single-coordinate move gaining > epsilon.
RunRecord so_search(const CommGraph& g, const GameParams& params, const Profile& init,
                    const BrdOptions& opts = {});

struct SweepRow {
    int rate_index = 0;
    double rate = 0.0;
    double social_cost = 0.0;
    double total_privacy = 0.0;
    double total_bandwidth = 0.0;
};

// Base cost breakdown (no altruism terms) with every node at the same rate,
// for each ladder rate in turn.
std::vector<SweepRow> uniform_sweep(const CommGraph& g, const GameParams& params);

std::string run_record_json(const RunRecord& r, const StrategyLadder& ladder);
std::string trace_csv(const RunRecord& r);

}  // namespace fmdgt

#endif
