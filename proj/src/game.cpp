#include "fmdgt/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fmdgt/rng.hpp"

namespace fmdgt {

StrategyLadder StrategyLadder::standard() {
    StrategyLadder l;
    l.rates.push_back(0.0);
    for (int k = 10; k >= 1; --k) l.rates.push_back(std::ldexp(1.0, -k));
    return l;
}

StrategyLadder StrategyLadder::from_rates(std::vector<double> rates) {
    if (rates.empty()) throw std::invalid_argument("ladder must not be empty");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] < 0.0 || rates[i] > 0.5)
            throw std::invalid_argument("ladder rates must lie in [0, 1/2]");
        if (i > 0 && rates[i] <= rates[i - 1])
            throw std::invalid_argument("ladder rates must be strictly increasing");
    }
    return StrategyLadder{std::move(rates)};
}

std::string StrategyLadder::exponent_label(int idx) const {
    double r = rate(idx);
    if (r == 0.0) return "zero";
    int e = 0;
    double m = std::frexp(r, &e);
    if (m == 0.5) return std::to_string(e - 1);  // r == 2^(e-1)
    std::ostringstream os;
    os << r;
    return os.str();
}

int StrategyLadder::index_of_exponent(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (exponent_label(i) == label) return i;
    throw std::invalid_argument("no ladder rate with exponent label '" + label + "'");
}

std::string to_string(AltruismModel m) {
    switch (m) {
        case AltruismModel::selfish: return "selfish";
        case AltruismModel::local: return "local";
        case AltruismModel::global_: return "global";
    }
    return "selfish";
}

AltruismModel altruism_model_from_string(const std::string& s) {
    if (s == "selfish") return AltruismModel::selfish;
    if (s == "local") return AltruismModel::local;
    if (s == "global") return AltruismModel::global_;
    throw std::invalid_argument("unknown altruism model: " + s);
}

std::vector<double> AltruismSpec::realize(const CommGraph& g) const {
    const int n = g.node_count;
    std::vector<double> out(n, 0.0);
    if (model == AltruismModel::selfish) return out;
    if (a < 0.0) throw std::invalid_argument("altruistic constant must be >= 0");
    switch (assign.kind) {
        case AssignRule::Kind::all:
            std::fill(out.begin(), out.end(), a);
            break;
        case AssignRule::Kind::random_k: {
            if (assign.k < 0 || assign.k > n)
                throw std::invalid_argument("random_k: k out of range");
            std::vector<int> ids(n);
            std::iota(ids.begin(), ids.end(), 0);
            std::mt19937_64 rng(assign.seed);
            for (int i = 0; i < assign.k; ++i) {
                int j = i + static_cast<int>(bounded_u64(rng, static_cast<std::uint64_t>(n - i)));
                std::swap(ids[i], ids[j]);
                out[ids[i]] = a;
            }
            break;
        }
        case AssignRule::Kind::top_k_by_metric: {
            NodeMetric m =
                assign.metric == "degree" ? degree_vector(g) : betweenness_centrality(g);
            for (int id : top_k_ids(m, assign.k)) out[id] = a;
            break;
        }
    }
    return out;
}

GameParams make_params(const CommGraph& g, double L, double f, StrategyLadder ladder,
                       const AltruismSpec& spec) {
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    if (!(f > 0.0)) throw std::invalid_argument("f must be positive");
    return GameParams{L, f, std::move(ladder), spec.model, spec.realize(g)};
}

std::string profile_to_csv(const Profile& p, const StrategyLadder& ladder) {
    std::ostringstream os;
    os << "node_id,rate_exponent\n";
    for (int u = 0; u < p.size(); ++u) os << u << ',' << ladder.exponent_label(p.idx[u]) << '\n';
    return os.str();
}

Profile profile_from_csv(const std::string& text, const StrategyLadder& ladder) {
    std::istringstream is(text);
    std::string line;
    Profile p;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("node_id", 0) == 0) continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad profile CSV row: " + line);
        int id = std::stoi(line.substr(0, comma));
        std::string label = line.substr(comma + 1);
        if (!label.empty() && label.back() == '\r') label.pop_back();
        if (id != p.size()) throw std::invalid_argument("profile CSV rows must be 0..n-1 in order");
        p.idx.push_back(ladder.index_of_exponent(label));
    }
    return p;
}

std::vector<double> altruism_incidence(const CommGraph& g, const GameParams& params) {
    const int n = g.node_count;
    std::vector<double> inc(n, 0.0);
    switch (params.model) {
        case AltruismModel::selfish: break;
        case AltruismModel::local:
            for (int u = 0; u < n; ++u)
                for (int w : g.contacts[u]) inc[u] += params.a[w];
            break;
        case AltruismModel::global_: {
            double total = 0.0;
            for (double v : params.a) total += v;
            for (int u = 0; u < n; ++u) inc[u] = total - params.a[u];
            break;
        }
    }
    return inc;
}

double privacy_from_alpha(double L, double alpha, long long in) {
    if (in <= 0) return 0.0;
    if (alpha >= 1.0) return L;
    return L * -std::expm1(static_cast<double>(in) * std::log1p(-alpha));
}

namespace {

void refresh_caches(UtilityState& s) {
    const CommGraph& g = *s.graph;
    const GameParams& p = *s.params;
    for (int v = 0; v < g.node_count; ++v) {
        double pv = p.ladder.rate(s.prof.idx[v]);
        double a = std::exp(s.log_sum - std::log1p(-pv));
        s.alpha[v] = std::min(a, 1.0);
        s.priv[v] = privacy_from_alpha(p.L, s.alpha[v], g.in_msgs[v]);
    }
}

double log_sum_of(const Profile& prof, const StrategyLadder& ladder) {
    double s = 0.0;
    for (int idx : prof.idx) s += std::log1p(-ladder.rate(idx));
    return s;
}

// Change of C^P_v when every factor of alpha_v is scaled by `ratio`
// (one other node moving its rate). Evaluated without cancellation:
// delta = L*A*(1 - (1+t)^in) with A = (1-alpha)^in and t = -alpha*em1/(1-alpha),
// falling back to the direct difference when t leaves the smooth regime.
double privacy_delta(double L, double alpha, long long in, double ratio, double em1) {
    if (in <= 0) return 0.0;
    const double n = static_cast<double>(in);
    const double one_minus = 1.0 - alpha;
    double A = alpha >= 1.0 ? 0.0 : std::exp(n * std::log1p(-alpha));
    double t = -alpha * em1 / one_minus;  // one_minus == 0 gives inf/nan, caught below
    if (A > 1e-280 && std::abs(t) <= 0.5) return -L * A * std::expm1(n * std::log1p(t));
    double a2 = std::min(alpha * ratio, 1.0);
    double B = a2 >= 1.0 ? 0.0 : std::exp(n * std::log1p(-a2));
    return L * (A - B);
}

}  // namespace

UtilityState make_state(const CommGraph& g, const GameParams& params, Profile profile) {
    if (profile.size() != g.node_count)
        throw std::invalid_argument("profile length does not match node count");
    if (static_cast<int>(params.a.size()) != g.node_count)
        throw std::invalid_argument("params not realized for this graph");
    for (int idx : profile.idx)
        if (idx < 0 || idx >= params.ladder.size())
            throw std::invalid_argument("profile contains an invalid ladder index");

    UtilityState s;
    s.graph = &g;
    s.params = &params;
    s.prof = std::move(profile);
    s.log_sum = log_sum_of(s.prof, params.ladder);
    s.alpha.resize(g.node_count);
    s.priv.resize(g.node_count);
    s.bw.resize(g.node_count);
    refresh_caches(s);
    for (int v = 0; v < g.node_count; ++v) {
        double pv = params.ladder.rate(s.prof.idx[v]);
        s.bw[v] = params.f * (static_cast<double>(g.in_msgs[v]) +
                              pv * static_cast<double>(g.total_messages - g.in_msgs[v]));
    }
    s.incidence = altruism_incidence(g, params);
    return s;
}

double alpha_of(const UtilityState& s, int u) { return s.alpha.at(static_cast<std::size_t>(u)); }

double privacy_cost(const UtilityState& s, int u) { return s.priv.at(static_cast<std::size_t>(u)); }

double bandwidth_cost(const CommGraph& g, const GameParams& params, const Profile& p, int u) {
    double pu = params.ladder.rate(p.idx.at(static_cast<std::size_t>(u)));
    return params.f * (static_cast<double>(g.in_msgs[u]) +
                       pu * static_cast<double>(g.total_messages - g.in_msgs[u]));
}

double player_utility(const UtilityState& s, int u) {
    const GameParams& p = *s.params;
    double util = -s.priv[u] - s.bw[u];
    double au = p.a[u];
    if (au != 0.0) {
        double sum = 0.0;
        if (p.model == AltruismModel::local) {
            for (int v : s.graph->contacts[u]) sum += s.priv[v];
        } else if (p.model == AltruismModel::global_) {
            for (double c : s.priv) sum += c;
            sum -= s.priv[u];
        }
        util -= au * sum;
    }
    return util;
}

CostBreakdown cost_breakdown(const UtilityState& s) {
    CostBreakdown b;
    double weighted_priv = 0.0;
    for (std::size_t v = 0; v < s.priv.size(); ++v) {
        b.total_privacy += s.priv[v];
        b.total_bandwidth += s.bw[v];
        weighted_priv += (1.0 + s.incidence[v]) * s.priv[v];
    }
    b.social_cost = b.total_privacy + b.total_bandwidth;
    b.welfare = -(b.total_bandwidth + weighted_priv);
    return b;
}

DeltaTable make_delta_table(const UtilityState& s, int from_idx, int to_idx) {
    const GameParams& p = *s.params;
    const CommGraph& g = *s.graph;
    double p_from = p.ladder.rate(from_idx);
    double p_to = p.ladder.rate(to_idx);
    double d_log = std::log1p(-p_to) - std::log1p(-p_from);
    double ratio = std::exp(d_log);
    double em1 = std::expm1(d_log);

    DeltaTable t;
    t.from_idx = from_idx;
    t.to_idx = to_idx;
    t.dcp.resize(g.node_count);
    for (int v = 0; v < g.node_count; ++v) {
        t.dcp[v] = privacy_delta(p.L, s.alpha[v], g.in_msgs[v], ratio, em1);
        t.sum_dcp += t.dcp[v];
        t.sum_weighted_dcp += (1.0 + s.incidence[v]) * t.dcp[v];
    }
    return t;
}

double eval_move_with_table(const UtilityState& s, int u, const DeltaTable& table,
                            Objective objective) {
    const GameParams& p = *s.params;
    const CommGraph& g = *s.graph;
    if (table.from_idx != s.prof.idx[u])
        throw std::invalid_argument("delta table does not match node's current index");
    double dp = p.ladder.rate(table.to_idx) - p.ladder.rate(table.from_idx);
    double bw_delta = p.f * dp * static_cast<double>(g.total_messages - g.in_msgs[u]);
    if (objective == Objective::own_utility) {
        double au = p.a[u];
        if (au == 0.0) return -bw_delta;
        double sum = 0.0;
        if (p.model == AltruismModel::local) {
            for (int v : g.contacts[u]) sum += table.dcp[v];
        } else if (p.model == AltruismModel::global_) {
            sum = table.sum_dcp - table.dcp[u];
        }
        return -bw_delta - au * sum;
    }
    // welfare: the mover's own alpha (hence own C^P) is unaffected
    double others = table.sum_weighted_dcp - (1.0 + s.incidence[u]) * table.dcp[u];
    return -bw_delta - others;
}

double eval_unilateral_move(const UtilityState& s, int u, int new_idx, Objective objective) {
    if (u < 0 || u >= s.prof.size()) throw std::invalid_argument("node id out of range");
    if (new_idx < 0 || new_idx >= s.params->ladder.size())
        throw std::invalid_argument("ladder index out of range");
    if (new_idx == s.prof.idx[u]) throw std::invalid_argument("move must change the index");
    DeltaTable t = make_delta_table(s, s.prof.idx[u], new_idx);
    return eval_move_with_table(s, u, t, objective);
}

void apply_move(UtilityState& s, int u, int new_idx) {
    if (u < 0 || u >= s.prof.size()) throw std::invalid_argument("node id out of range");
    if (new_idx < 0 || new_idx >= s.params->ladder.size())
        throw std::invalid_argument("ladder index out of range");
    int old_idx = s.prof.idx[u];
    if (new_idx == old_idx) return;
    const GameParams& p = *s.params;
    const CommGraph& g = *s.graph;
    s.log_sum += std::log1p(-p.ladder.rate(new_idx)) - std::log1p(-p.ladder.rate(old_idx));
    s.prof.idx[u] = new_idx;
    if (++s.moves_since_refresh >= 1000) {
        s.log_sum = log_sum_of(s.prof, p.ladder);
        s.moves_since_refresh = 0;
    }
    refresh_caches(s);
    double pu = p.ladder.rate(new_idx);
    s.bw[u] = p.f * (static_cast<double>(g.in_msgs[u]) +
                     pu * static_cast<double>(g.total_messages - g.in_msgs[u]));
}

}  // namespace fmdgt
