#include "fmdgt/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "fmdgt/rng.hpp"

namespace fmdgt {

std::string InitSpec::label(const StrategyLadder& ladder) const {
    std::ostringstream os;
    switch (kind) {
        case InitKind::threshold:
            os << "['" << (property == MetricProperty::bc ? "bc" : "degree") << "', '"
               << (cutoff > 0.0 ? "Threshold" : "No Threshold") << "', 'all from "
               << ladder.exponent_label(level_idx) << "']";
            break;
        case InitKind::sorted:
            os << (property == MetricProperty::bc ? "bc" : "degree")
               << (interp == Interp::linear ? "_lin" : "_exp");
            break;
        case InitKind::random:
            os << "random_" << seed;
            break;
        case InitKind::uniform:
            os << "uniform_" << ladder.exponent_label(level_idx);
            break;
        case InitKind::explicit_profile:
            os << "explicit";
            break;
    }
    return os.str();
}

Profile init_threshold(const CommGraph& g, const NodeMetric& metric, double cutoff, int level_idx,
                       const StrategyLadder& ladder) {
    if (static_cast<int>(metric.values.size()) != g.node_count)
        throw std::invalid_argument("metric length does not match node count");
    if (level_idx < 0 || level_idx >= ladder.size())
        throw std::invalid_argument("level index out of range");
    if (cutoff < 0.0) throw std::invalid_argument("cutoff must be >= 0");
    Profile p;
    p.idx.reserve(g.node_count);
    for (double v : metric.values) p.idx.push_back(v > cutoff ? level_idx : 0);
    return p;
}

Profile init_sorted(const CommGraph& g, const NodeMetric& metric, Interp interp,
                    const StrategyLadder& ladder) {
    if (static_cast<int>(metric.values.size()) != g.node_count)
        throw std::invalid_argument("metric length does not match node count");
    if (ladder.size() != 11 || ladder.rate(0) != 0.0)
        throw std::invalid_argument("sorted init needs the standard 11-rate ladder");
    const int n = g.node_count;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return metric.values[a] != metric.values[b] ? metric.values[a] > metric.values[b] : a < b;
    });

    std::vector<int> bucket_size(10, 0);
    if (interp == Interp::linear) {
        int base = n / 10;
        std::fill(bucket_size.begin(), bucket_size.end(), base);
        bucket_size[9] += n - 10 * base;
    } else {
        int assigned = 0;
        for (int b = 0; b < 9; ++b) {
            bucket_size[b] = std::min(1 << b, n - assigned);
            assigned += bucket_size[b];
        }
        bucket_size[9] = n - assigned;
    }

    Profile p;
    p.idx.assign(n, 0);
    int pos = 0;
    for (int b = 0; b < 10; ++b) {
        int level = 10 - b;  // bucket 0 -> 2^-1, bucket 9 -> 2^-10
        for (int i = 0; i < bucket_size[b]; ++i) p.idx[order[pos++]] = level;
    }
    return p;
}

Profile init_random(const CommGraph& g, const StrategyLadder& ladder, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Profile p;
    p.idx.reserve(g.node_count);
    for (int u = 0; u < g.node_count; ++u)
        p.idx.push_back(static_cast<int>(bounded_u64(rng, static_cast<std::uint64_t>(ladder.size()))));
    return p;
}

Profile realize_init(const CommGraph& g, const InitSpec& spec, const StrategyLadder& ladder) {
    switch (spec.kind) {
        case InitKind::threshold:
        case InitKind::sorted: {
            NodeMetric m = spec.property == MetricProperty::bc ? betweenness_centrality(g)
                                                               : degree_vector(g);
            return spec.kind == InitKind::threshold
                       ? init_threshold(g, m, spec.cutoff, spec.level_idx, ladder)
                       : init_sorted(g, m, spec.interp, ladder);
        }
        case InitKind::random:
            return init_random(g, ladder, spec.seed);
        case InitKind::uniform:
            if (spec.level_idx < 0 || spec.level_idx >= ladder.size())
                throw std::invalid_argument("level index out of range");
            return Profile::uniform(g.node_count, spec.level_idx);
        case InitKind::explicit_profile:
            if (spec.explicit_prof.size() != g.node_count)
                throw std::invalid_argument("explicit profile length does not match node count");
            return spec.explicit_prof;
    }
    throw std::logic_error("unreachable");
}

namespace {

struct Candidate {
    double gain = -std::numeric_limits<double>::infinity();
    int node = -1;
    int new_idx = -1;
};

// Best single-step candidate under the tie order: higher gain, then smaller
// node id, then increment before decrement. Scanning nodes ascending and +1
// before -1 with strict-greater replacement realizes exactly that order.
// Delta tables are built lazily; a selfish node's own-utility gain is pure
// bandwidth and needs none (bit-identical to eval_move_with_table).
Candidate best_single_step(const UtilityState& state, Objective obj) {
    const StrategyLadder& ladder = state.params->ladder;
    const GameParams& p = *state.params;
    const CommGraph& g = *state.graph;
    std::vector<std::optional<DeltaTable>> up(ladder.size()), down(ladder.size());
    Candidate best;
    for (int u = 0; u < state.prof.size(); ++u) {
        int idx = state.prof.idx[u];
        for (int next : {idx + 1, idx - 1}) {
            if (next < 0 || next >= ladder.size()) continue;
            double gain;
            if (obj == Objective::own_utility && p.a[u] == 0.0) {
                double dp = ladder.rate(next) - ladder.rate(idx);
                gain = -(p.f * dp * static_cast<double>(g.total_messages - g.in_msgs[u]));
            } else {
                auto& slot = next > idx ? up[idx] : down[idx];
                if (!slot) slot.emplace(make_delta_table(state, idx, next));
                gain = eval_move_with_table(state, u, *slot, obj);
            }
            if (gain > best.gain) best = Candidate{gain, u, next};
        }
    }
    return best;
}

// Best single-coordinate move over the whole ladder; ties prefer smaller node
// id, then the higher target index.
Candidate best_full_ladder(const UtilityState& state, Objective obj) {
    const StrategyLadder& ladder = state.params->ladder;
    std::vector<std::vector<std::optional<DeltaTable>>> tables(
        ladder.size(), std::vector<std::optional<DeltaTable>>(ladder.size()));
    Candidate best;
    for (int u = 0; u < state.prof.size(); ++u) {
        int from = state.prof.idx[u];
        for (int to = ladder.max_index(); to >= 0; --to) {
            if (to == from) continue;
            auto& slot = tables[from][to];
            if (!slot) slot.emplace(make_delta_table(state, from, to));
            double gain = eval_move_with_table(state, u, *slot, obj);
            if (gain > best.gain) best = Candidate{gain, u, to};
        }
    }
    return best;
}

double stop_threshold(const UtilityState& state, const BrdOptions& opts, Objective obj,
                      const Candidate& best) {
    if (!opts.relative_epsilon) return opts.epsilon;
    double ref = obj == Objective::own_utility ? player_utility(state, best.node)
                                               : cost_breakdown(state).welfare;
    return opts.epsilon * std::abs(ref);
}

RunRecord run_dynamics(const CommGraph& g, const GameParams& params, const Profile& init,
                       const BrdOptions& opts, RunObjective run_obj) {
    if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    auto t0 = std::chrono::steady_clock::now();
    Objective obj = run_obj == RunObjective::nash ? Objective::own_utility : Objective::welfare;

    UtilityState state = make_state(g, params, init);
    RunRecord rec;
    rec.objective = run_obj;
    rec.trace_thinning = opts.trace_thinning;
    rec.converged = false;

    bool last_recorded = true;
    TraceEntry last_entry{};
    auto record = [&](const TraceEntry& e) {
        last_entry = e;
        last_recorded = false;
        if (opts.trace_thinning > 0 && (e.iteration - 1) % opts.trace_thinning == 0) {
            rec.trace.push_back(e);
            last_recorded = true;
        }
    };

    bool exhausted = false;
    while (!exhausted) {
        // single-step phase
        while (true) {
            if (rec.iterations >= opts.max_iters) {
                exhausted = true;
                break;
            }
            Candidate best = best_single_step(state, obj);
            if (best.node < 0 || best.gain <= stop_threshold(state, opts, obj, best)) break;
            int old_idx = state.prof.idx[best.node];
            apply_move(state, best.node, best.new_idx);
            ++rec.iterations;
            double welfare_after = cost_breakdown(state).welfare;
            record(TraceEntry{rec.iterations, best.node, old_idx, best.new_idx, best.gain,
                              welfare_after});
            if (rec.iterations % 1000 == 0) {
                UtilityState fresh = make_state(g, params, state.prof);
                double w = cost_breakdown(fresh).welfare;
                if (std::abs(welfare_after - w) > 1e-9 * std::max(1.0, std::abs(w)))
                    throw std::logic_error("incremental objective drifted beyond tolerance");
            }
        }
        if (exhausted || run_obj == RunObjective::nash) break;
        // welfare runs also rule out single-coordinate jumps across the ladder
        Candidate jump = best_full_ladder(state, obj);
        if (jump.node < 0 || jump.gain <= stop_threshold(state, opts, obj, jump)) break;
        int old_idx = state.prof.idx[jump.node];
        apply_move(state, jump.node, jump.new_idx);
        ++rec.iterations;
        record(TraceEntry{rec.iterations, jump.node, old_idx, jump.new_idx, jump.gain,
                          cost_breakdown(state).welfare});
    }

    rec.converged = !exhausted;
    if (!last_recorded && opts.trace_thinning > 0) rec.trace.push_back(last_entry);
    rec.terminal = state.prof;
    rec.breakdown = cost_breakdown(state);
    rec.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

RunRecord brd_run(const CommGraph& g, const GameParams& params, const Profile& init,
                  const BrdOptions& opts) {
    return run_dynamics(g, params, init, opts, RunObjective::nash);
}

RunRecord so_search(const CommGraph& g, const GameParams& params, const Profile& init,
                    const BrdOptions& opts) {
    return run_dynamics(g, params, init, opts, RunObjective::social);
}

std::vector<SweepRow> uniform_sweep(const CommGraph& g, const GameParams& params) {
    std::vector<SweepRow> rows;
    rows.reserve(params.ladder.size());
    for (int idx = 0; idx < params.ladder.size(); ++idx) {
        UtilityState s = make_state(g, params, Profile::uniform(g.node_count, idx));
        CostBreakdown b = cost_breakdown(s);
        rows.push_back(SweepRow{idx, params.ladder.rate(idx), b.social_cost, b.total_privacy,
                                b.total_bandwidth});
    }
    return rows;
}

std::string run_record_json(const RunRecord& r, const StrategyLadder& ladder) {
    nlohmann::json j;
    j["init_label"] = r.init_label;
    j["seed"] = r.seed;
    j["objective"] = r.objective == RunObjective::nash ? "nash" : "social";
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["terminal_idx"] = r.terminal.idx;
    nlohmann::json exps = nlohmann::json::array();
    for (int idx : r.terminal.idx) exps.push_back(ladder.exponent_label(idx));
    j["terminal_exponents"] = exps;
    j["breakdown"] = {{"total_privacy", r.breakdown.total_privacy},
                      {"total_bandwidth", r.breakdown.total_bandwidth},
                      {"social_cost", r.breakdown.social_cost},
                      {"welfare", r.breakdown.welfare}};
    j["trace_thinning"] = r.trace_thinning;
    j["wall_time_sec"] = r.wall_time_sec;
    nlohmann::json trace = nlohmann::json::array();
    for (const TraceEntry& e : r.trace)
        trace.push_back({e.iteration, e.node, e.old_idx, e.new_idx, e.gain, e.objective_after});
    j["trace"] = trace;
    return j.dump(2);
}

std::string trace_csv(const RunRecord& r) {
    std::ostringstream os;
    os << "iteration,node,old_idx,new_idx,gain,objective\n";
    os.precision(17);
    for (const TraceEntry& e : r.trace)
        os << e.iteration << ',' << e.node << ',' << e.old_idx << ',' << e.new_idx << ',' << e.gain
           << ',' << e.objective_after << '\n';
    return os.str();
}

}  // namespace fmdgt
