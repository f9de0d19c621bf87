#ifndef FMDGT_ANALYSIS_HPP
#define FMDGT_ANALYSIS_HPP

#include <string>
#include <utility>
#include <vector>

#include "fmdgt/dynamics.hpp"
#include "fmdgt/game.hpp"

namespace fmdgt {

struct Deviation {
    int node = 0;
    int new_idx = 0;
    double gain = 0.0;
};

// Single-step (idx +/- 1) deviations gaining more than epsilon. Empty result
// means the profile is a fixed point of the step dynamics. The relative flag
// switches the threshold to epsilon*|reference objective|.
std::vector<Deviation> verify_step_stable(const CommGraph& g, const GameParams& params,
                                          const Profile& profile, double epsilon,
                                          Objective objective = Objective::own_utility,
                                          bool relative = false);

// Checks every alternative ladder index per player; reports each violating
// player's best deviation.
std::vector<Deviation> verify_epsilon_ne(const CommGraph& g, const GameParams& params,
                                         const Profile& profile, double epsilon,
                                         Objective objective = Objective::own_utility,
                                         bool relative = false);

// Exhaustive ground truth for small instances, computed by an evaluator that
// is independent of the incremental engine (plain products and pow).
struct OracleResult {
    std::vector<Profile> ne_profiles;  // exact pure NE, enumeration order
    Profile so_profile;                // welfare-maximizing profile (first such)
    double so_welfare = 0.0;
    std::vector<double> welfare_table;  // per profile, node 0 most significant
};

OracleResult enumerate_oracle(const CommGraph& g, const GameParams& params,
                              long long max_profiles = 1000000);

// Cost-convention efficiency ratios: with cost(x) = -welfare(x),
// PoA = worst NE cost / SO cost, PoS = best NE cost / SO cost.
std::pair<double, double> poa_pos(double so_welfare, const std::vector<double>& ne_welfares);

struct EquilibriumReport {
    std::vector<long long> strategy_histogram;  // count per ladder index
    double total_privacy = 0.0;
    double total_bandwidth = 0.0;
    double privacy_share = 0.0;  // total_privacy / social_cost (0 when social_cost is 0)
    std::vector<int> max_nodes;  // players at the top ladder rate
    double max_node_bc_sum = 0.0;
    double max_node_fraction = 0.0;
    int top10_in_max = 0;  // global top-10 BC nodes found among max_nodes
    double bc_cdf_p10 = 0.0;
    double bc_cdf_p50 = 0.0;
    double bc_cdf_p90 = 0.0;
};

EquilibriumReport equilibrium_metrics(const CommGraph& g, const GameParams& params,
                                      const Profile& profile, const NodeMetric& bc);

std::string equilibrium_report_json(const EquilibriumReport& r);

// Cumulative normalized-BC mass over users ordered by decreasing cover
// traffic (ties: decreasing BC, then id).
struct BcCdf {
    std::vector<double> cumulative;  // prefix sums, one per user
    double p10 = 0.0;                // value at prefix length ceil(0.1*n)
    double p50 = 0.0;
    double p90 = 0.0;
};

BcCdf bc_contribution_cdf(const Profile& profile, const NodeMetric& bc);

std::string bc_cdf_csv(const BcCdf& c);
std::string oracle_result_json(const OracleResult& r, const StrategyLadder& ladder);

}  // namespace fmdgt

#endif
