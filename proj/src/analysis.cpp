#include "fmdgt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fmdgt/centrality.hpp"

namespace fmdgt {

namespace {

double threshold_for(const UtilityState& s, int u, double epsilon, Objective obj, bool relative) {
    if (!relative) return epsilon;
    double ref =
        obj == Objective::own_utility ? player_utility(s, u) : cost_breakdown(s).welfare;
    return epsilon * std::abs(ref);
}

}  // namespace

std::vector<Deviation> verify_step_stable(const CommGraph& g, const GameParams& params,
                                          const Profile& profile, double epsilon,
                                          Objective objective, bool relative) {
    UtilityState s = make_state(g, params, profile);
    std::vector<Deviation> out;
    for (int u = 0; u < profile.size(); ++u) {
        double thr = threshold_for(s, u, epsilon, objective, relative);
        int idx = profile.idx[u];
        for (int next : {idx + 1, idx - 1}) {
            if (next < 0 || next >= params.ladder.size()) continue;
            double gain = eval_unilateral_move(s, u, next, objective);
            if (gain > thr) out.push_back(Deviation{u, next, gain});
        }
    }
    return out;
}

std::vector<Deviation> verify_epsilon_ne(const CommGraph& g, const GameParams& params,
                                         const Profile& profile, double epsilon,
                                         Objective objective, bool relative) {
    UtilityState s = make_state(g, params, profile);
    std::vector<Deviation> out;
    for (int u = 0; u < profile.size(); ++u) {
        double thr = threshold_for(s, u, epsilon, objective, relative);
        Deviation best{u, -1, 0.0};
        for (int alt = 0; alt < params.ladder.size(); ++alt) {
            if (alt == profile.idx[u]) continue;
            double gain = eval_unilateral_move(s, u, alt, objective);
            if (best.new_idx < 0 || gain > best.gain) best = Deviation{u, alt, gain};
        }
        if (best.new_idx >= 0 && best.gain > thr) out.push_back(best);
    }
    return out;
}

namespace {

// Ground-truth utilities via plain products and pow; deliberately shares no
// code with the log-domain incremental engine.
struct DirectEval {
    const CommGraph& g;
    const GameParams& p;

    double rate(const std::vector<int>& idx, int u) const { return p.ladder.rate(idx[u]); }

    double alpha(const std::vector<int>& idx, int u) const {
        double prod = 1.0;
        for (int v = 0; v < g.node_count; ++v)
            if (v != u) prod *= 1.0 - rate(idx, v);
        return prod;
    }

    double cp(const std::vector<int>& idx, int u) const {
        long long in = g.in_msgs[u];
        if (in <= 0) return 0.0;
        return p.L * (1.0 - std::pow(1.0 - alpha(idx, u), static_cast<double>(in)));
    }

    double cbw(const std::vector<int>& idx, int u) const {
        return p.f * (static_cast<double>(g.in_msgs[u]) +
                      rate(idx, u) * static_cast<double>(g.total_messages - g.in_msgs[u]));
    }

    double utility(const std::vector<int>& idx, int u) const {
        double util = -cp(idx, u) - cbw(idx, u);
        double au = p.a[u];
        if (au != 0.0) {
            double sum = 0.0;
            if (p.model == AltruismModel::local) {
                for (int v : g.contacts[u]) sum += cp(idx, v);
            } else if (p.model == AltruismModel::global_) {
                for (int v = 0; v < g.node_count; ++v)
                    if (v != u) sum += cp(idx, v);
            }
            util -= au * sum;
        }
        return util;
    }

    double welfare(const std::vector<int>& idx) const {
        double w = 0.0;
        for (int u = 0; u < g.node_count; ++u) w += utility(idx, u);
        return w;
    }
};

}  // namespace

OracleResult enumerate_oracle(const CommGraph& g, const GameParams& params,
                              long long max_profiles) {
    const int n = g.node_count;
    const int k = params.ladder.size();
    double count = std::pow(static_cast<double>(k), n);
    if (count > static_cast<double>(max_profiles))
        throw std::invalid_argument("instance too large to enumerate");

    DirectEval eval{g, params};
    OracleResult res;
    res.welfare_table.reserve(static_cast<std::size_t>(count));
    res.so_welfare = -std::numeric_limits<double>::infinity();

    std::vector<int> idx(n, 0);
    while (true) {
        double w = eval.welfare(idx);
        res.welfare_table.push_back(w);
        if (w > res.so_welfare) {
            res.so_welfare = w;
            res.so_profile = Profile{idx};
        }
        bool is_ne = true;
        for (int u = 0; u < n && is_ne; ++u) {
            double current = eval.utility(idx, u);
            std::vector<int> alt = idx;
            for (int j = 0; j < k; ++j) {
                if (j == idx[u]) continue;
                alt[u] = j;
                if (eval.utility(alt, u) > current) {
                    is_ne = false;
                    break;
                }
            }
        }
        if (is_ne) res.ne_profiles.push_back(Profile{idx});

        int pos = n - 1;  // node 0 most significant
        while (pos >= 0 && idx[pos] == k - 1) idx[pos--] = 0;
        if (pos < 0) break;
        ++idx[pos];
    }
    return res;
}

std::pair<double, double> poa_pos(double so_welfare, const std::vector<double>& ne_welfares) {
    if (ne_welfares.empty()) throw std::invalid_argument("need at least one NE welfare");
    if (so_welfare > 0.0) throw std::invalid_argument("welfare values must be <= 0");
    for (double w : ne_welfares)
        if (w > 0.0) throw std::invalid_argument("welfare values must be <= 0");
    double so_cost = -so_welfare;
    if (so_cost == 0.0) throw std::domain_error("PoA/PoS undefined: SO cost is zero");
    double worst = 0.0, best = std::numeric_limits<double>::infinity();
    for (double w : ne_welfares) {
        worst = std::max(worst, -w);
        best = std::min(best, -w);
    }
    return {worst / so_cost, best / so_cost};
}

BcCdf bc_contribution_cdf(const Profile& profile, const NodeMetric& bc) {
    const int n = profile.size();
    if (static_cast<int>(bc.values.size()) != n)
        throw std::invalid_argument("metric length does not match profile");
    BcCdf c;
    if (n == 0) return c;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (profile.idx[a] != profile.idx[b]) return profile.idx[a] > profile.idx[b];
        if (bc.values[a] != bc.values[b]) return bc.values[a] > bc.values[b];
        return a < b;
    });
    c.cumulative.resize(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += bc.values[order[i]];
        c.cumulative[i] = sum;
    }
    auto at_fraction = [&](double q) {
        int len = static_cast<int>(std::ceil(q * n));
        len = std::clamp(len, 1, n);
        return c.cumulative[len - 1];
    };
    c.p10 = at_fraction(0.1);
    c.p50 = at_fraction(0.5);
    c.p90 = at_fraction(0.9);
    return c;
}

EquilibriumReport equilibrium_metrics(const CommGraph& g, const GameParams& params,
                                      const Profile& profile, const NodeMetric& bc) {
    if (static_cast<int>(bc.values.size()) != g.node_count)
        throw std::invalid_argument("metric computed on a different graph");
    UtilityState s = make_state(g, params, profile);
    CostBreakdown b = cost_breakdown(s);

    EquilibriumReport r;
    r.strategy_histogram.assign(params.ladder.size(), 0);
    for (int idx : profile.idx) ++r.strategy_histogram[idx];
    r.total_privacy = b.total_privacy;
    r.total_bandwidth = b.total_bandwidth;
    r.privacy_share = b.social_cost > 0.0 ? b.total_privacy / b.social_cost : 0.0;

    int max_idx = params.ladder.max_index();
    for (int u = 0; u < profile.size(); ++u)
        if (profile.idx[u] == max_idx) r.max_nodes.push_back(u);
    for (int u : r.max_nodes) r.max_node_bc_sum += bc.values[u];
    r.max_node_fraction =
        g.node_count > 0 ? static_cast<double>(r.max_nodes.size()) / g.node_count : 0.0;

    std::vector<int> top = top_k_ids(bc, std::min(10, g.node_count));
    for (int id : top)
        if (std::binary_search(r.max_nodes.begin(), r.max_nodes.end(), id)) ++r.top10_in_max;

    BcCdf c = bc_contribution_cdf(profile, bc);
    r.bc_cdf_p10 = c.p10;
    r.bc_cdf_p50 = c.p50;
    r.bc_cdf_p90 = c.p90;
    return r;
}

std::string equilibrium_report_json(const EquilibriumReport& r) {
    nlohmann::json j;
    j["strategy_histogram"] = r.strategy_histogram;
    j["total_privacy"] = r.total_privacy;
    j["total_bandwidth"] = r.total_bandwidth;
    j["privacy_share"] = r.privacy_share;
    j["max_nodes"] = r.max_nodes;
    j["max_node_bc_sum"] = r.max_node_bc_sum;
    j["max_node_fraction"] = r.max_node_fraction;
    j["top10_in_max"] = r.top10_in_max;
    j["bc_cdf_percentiles"] = {{"p10", r.bc_cdf_p10}, {"p50", r.bc_cdf_p50}, {"p90", r.bc_cdf_p90}};
    return j.dump(2);
}

std::string bc_cdf_csv(const BcCdf& c) {
    std::ostringstream os;
    os << "prefix_fraction,cumulative_bc\n";
    os.precision(12);
    const int n = static_cast<int>(c.cumulative.size());
    for (int i = 0; i < n; ++i)
        os << static_cast<double>(i + 1) / n << ',' << c.cumulative[i] << '\n';
    return os.str();
}

std::string oracle_result_json(const OracleResult& r, const StrategyLadder& ladder) {
    auto profile_labels = [&](const Profile& p) {
        nlohmann::json arr = nlohmann::json::array();
        for (int idx : p.idx) arr.push_back(ladder.exponent_label(idx));
        return arr;
    };
    nlohmann::json j;
    nlohmann::json nes = nlohmann::json::array();
    for (const Profile& p : r.ne_profiles) nes.push_back(profile_labels(p));
    j["ne_profiles"] = nes;
    j["ne_count"] = r.ne_profiles.size();
    j["so_profile"] = profile_labels(r.so_profile);
    j["so_welfare"] = r.so_welfare;
    j["profile_count"] = r.welfare_table.size();
    return j.dump(2);
}

}  // namespace fmdgt
