#ifndef FMDGT_GAME_HPP
#define FMDGT_GAME_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fmdgt/centrality.hpp"
#include "fmdgt/graph.hpp"

namespace fmdgt {

// Ordered false-positive-rate action set. The standard ladder is
// {0, 2^-10, 2^-9, ..., 2^-1}; restricted ladders (subsets) are allowed for
// exhaustive small-game work. Rates must be strictly increasing in [0, 1/2].
struct StrategyLadder {
    std::vector<double> rates;

    static StrategyLadder standard();
    static StrategyLadder from_rates(std::vector<double> rates);

    int size() const { return static_cast<int>(rates.size()); }
    int max_index() const { return size() - 1; }
    double rate(int idx) const { return rates.at(static_cast<std::size_t>(idx)); }

    // "-k" for 2^-k, "zero" for rate 0 (profile CSV / label encoding).
    std::string exponent_label(int idx) const;
    // Inverse of exponent_label; returns the ladder index.
    int index_of_exponent(const std::string& label) const;
};

enum class AltruismModel { selfish, local, global_ };

std::string to_string(AltruismModel m);
AltruismModel altruism_model_from_string(const std::string& s);

// Which nodes get the altruistic constant.
struct AssignRule {
    enum class Kind { all, random_k, top_k_by_metric };
    Kind kind = Kind::all;
    int k = 0;                 // random_k / top_k_by_metric
    std::uint64_t seed = 0;    // random_k
    std::string metric = "bc"; // top_k_by_metric: "bc" or "degree"
};

struct AltruismSpec {
    AltruismModel model = AltruismModel::selfish;
    double a = 0.0;  // the common altruistic constant for assigned nodes
    AssignRule assign;

    // Per-node a_u vector; selfish forces all zeros.
    std::vector<double> realize(const CommGraph& g) const;
};

// Every symbol of the utility function, bound to one graph size.
struct GameParams {
    double L = 0.0;  // cost of a privacy breach
    double f = 0.0;  // bandwidth cost per retrieved message
    StrategyLadder ladder;
    AltruismModel model = AltruismModel::selfish;
    std::vector<double> a;  // realized per-node altruistic constants
};

GameParams make_params(const CommGraph& g, double L, double f, StrategyLadder ladder,
                       const AltruismSpec& spec);

// One ladder index per node.
struct Profile {
    std::vector<int> idx;

    static Profile uniform(int n, int level_idx) { return Profile{std::vector<int>(n, level_idx)}; }
    int size() const { return static_cast<int>(idx.size()); }
    bool operator==(const Profile&) const = default;
};

std::string profile_to_csv(const Profile& p, const StrategyLadder& ladder);
Profile profile_from_csv(const std::string& text, const StrategyLadder& ladder);

// A_u = sum of a_w over all w whose altruism scope contains u
// (scope(w) = contacts[w] for local, everyone-but-w for global).
std::vector<double> altruism_incidence(const CommGraph& g, const GameParams& params);

struct CostBreakdown {
    double total_privacy = 0.0;
    double total_bandwidth = 0.0;
    double social_cost = 0.0;  // total_privacy + total_bandwidth
    double welfare = 0.0;      // sum of player utilities (altruism-weighted)
};

// Cached evaluation state for one profile. Maintains the log-domain product
// S = sum_v log(1-p_v) so unilateral moves are O(1) on S; alpha/cost caches
// are refreshed from S, and a full recompute of S replaces the incremental
// value every 1000 applied moves.
struct UtilityState {
    const CommGraph* graph = nullptr;
    const GameParams* params = nullptr;
    Profile prof;
    double log_sum = 0.0;
    std::vector<double> alpha;      // breach-event probability per node
    std::vector<double> priv;       // C^P_u
    std::vector<double> bw;         // C^BW_u
    std::vector<double> incidence;  // A_u (profile-independent)
    long long moves_since_refresh = 0;
};

enum class Objective { own_utility, welfare };

UtilityState make_state(const CommGraph& g, const GameParams& params, Profile profile);

double alpha_of(const UtilityState& s, int u);
double privacy_cost(const UtilityState& s, int u);
double bandwidth_cost(const CommGraph& g, const GameParams& params, const Profile& p, int u);
double player_utility(const UtilityState& s, int u);
CostBreakdown cost_breakdown(const UtilityState& s);

// Exact per-node privacy cost L*(1-(1-alpha)^in), evaluated stably.
double privacy_from_alpha(double L, double alpha, long long in);

// Per-node privacy-cost deltas for one ladder transition, shared by every
// candidate with the same (from,to) pair. dcp[v] is the change of C^P_v if
// some OTHER node makes the move (the mover's own entry must be discarded by
// the caller, since alpha_u never depends on p_u).
struct DeltaTable {
    int from_idx = 0;
    int to_idx = 0;
    std::vector<double> dcp;
    double sum_dcp = 0.0;           // sum over all v
    double sum_weighted_dcp = 0.0;  // sum over all v of (1+A_v)*dcp[v]
};

DeltaTable make_delta_table(const UtilityState& s, int from_idx, int to_idx);

// objective(after) - objective(before) for node u moving to new_idx, without
// mutating the state. Using a shared DeltaTable gives results bit-identical
// to the standalone overload.
double eval_move_with_table(const UtilityState& s, int u, const DeltaTable& table,
                            Objective objective);
double eval_unilateral_move(const UtilityState& s, int u, int new_idx, Objective objective);

// Applies the move and refreshes caches from the updated log-domain sum.
void apply_move(UtilityState& s, int u, int new_idx);

}  // namespace fmdgt

#endif
