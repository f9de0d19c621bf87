#include "fmdgt/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace fmdgt {

namespace {

const StrategyLadder& ladder_of(const ExperimentConfig& c, StrategyLadder& storage) {
    storage = c.ladder_rates.empty() ? StrategyLadder::standard()
                                     : StrategyLadder::from_rates(c.ladder_rates);
    return storage;
}

InitSpec init_from_json(const json& j, const StrategyLadder& ladder, bool& has_seed) {
    InitSpec s;
    has_seed = true;
    std::string kind = j.at("kind").get<std::string>();
    auto property = [&] {
        std::string p = j.value("property", "bc");
        if (p == "bc") return MetricProperty::bc;
        if (p == "degree") return MetricProperty::degree;
        throw std::invalid_argument("unknown init property: " + p);
    };
    if (kind == "threshold") {
        s.kind = InitKind::threshold;
        s.property = property();
        s.cutoff = j.at("cutoff").get<double>();
        s.level_idx = ladder.index_of_exponent(j.at("level").get<std::string>());
    } else if (kind == "sorted") {
        s.kind = InitKind::sorted;
        s.property = property();
        std::string interp = j.value("interp", "linear");
        if (interp == "linear")
            s.interp = Interp::linear;
        else if (interp == "exponential")
            s.interp = Interp::exponential;
        else
            throw std::invalid_argument("unknown interp: " + interp);
    } else if (kind == "random") {
        s.kind = InitKind::random;
        if (j.contains("seed"))
            s.seed = j.at("seed").get<std::uint64_t>();
        else
            has_seed = false;
    } else if (kind == "uniform") {
        s.kind = InitKind::uniform;
        s.level_idx = ladder.index_of_exponent(j.at("level").get<std::string>());
    } else if (kind == "explicit") {
        s.kind = InitKind::explicit_profile;
        for (const auto& e : j.at("exponents"))
            s.explicit_prof.idx.push_back(ladder.index_of_exponent(e.get<std::string>()));
    } else {
        throw std::invalid_argument("unknown init kind: " + kind);
    }
    return s;
}

json init_to_json(const InitSpec& s, bool has_seed, const StrategyLadder& ladder) {
    json j;
    switch (s.kind) {
        case InitKind::threshold:
            j["kind"] = "threshold";
            j["property"] = s.property == MetricProperty::bc ? "bc" : "degree";
            j["cutoff"] = s.cutoff;
            j["level"] = ladder.exponent_label(s.level_idx);
            break;
        case InitKind::sorted:
            j["kind"] = "sorted";
            j["property"] = s.property == MetricProperty::bc ? "bc" : "degree";
            j["interp"] = s.interp == Interp::linear ? "linear" : "exponential";
            break;
        case InitKind::random:
            j["kind"] = "random";
            if (has_seed) j["seed"] = s.seed;
            break;
        case InitKind::uniform:
            j["kind"] = "uniform";
            j["level"] = ladder.exponent_label(s.level_idx);
            break;
        case InitKind::explicit_profile: {
            j["kind"] = "explicit";
            json exps = json::array();
            for (int idx : s.explicit_prof.idx) exps.push_back(ladder.exponent_label(idx));
            j["exponents"] = exps;
            break;
        }
    }
    return j;
}

AltruismSpec altruism_from_json(const json& j) {
    AltruismSpec s;
    s.model = altruism_model_from_string(j.value("model", "selfish"));
    s.a = j.value("a", 0.0);
    if (j.contains("assign")) {
        const json& a = j.at("assign");
        std::string rule = a.value("rule", "all");
        if (rule == "all") {
            s.assign.kind = AssignRule::Kind::all;
        } else if (rule == "random_k") {
            s.assign.kind = AssignRule::Kind::random_k;
            s.assign.k = a.at("k").get<int>();
            s.assign.seed = a.value("seed", std::uint64_t{0});
        } else if (rule == "top_k_by_metric") {
            s.assign.kind = AssignRule::Kind::top_k_by_metric;
            s.assign.k = a.at("k").get<int>();
            s.assign.metric = a.value("metric", "bc");
        } else {
            throw std::invalid_argument("unknown assign rule: " + rule);
        }
    }
    return s;
}

json altruism_to_json(const AltruismSpec& s) {
    json j;
    j["model"] = to_string(s.model);
    j["a"] = s.a;
    json a;
    switch (s.assign.kind) {
        case AssignRule::Kind::all: a["rule"] = "all"; break;
        case AssignRule::Kind::random_k:
            a["rule"] = "random_k";
            a["k"] = s.assign.k;
            a["seed"] = s.assign.seed;
            break;
        case AssignRule::Kind::top_k_by_metric:
            a["rule"] = "top_k_by_metric";
            a["k"] = s.assign.k;
            a["metric"] = s.assign.metric;
            break;
    }
    j["assign"] = a;
    return j;
}

std::string slug(const std::string& label) {
    std::string out;
    bool last_us = false;
    for (char c : label) {
        bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
        if (keep) {
            out.push_back(c);
            last_us = false;
        } else if (!last_us && !out.empty()) {
            out.push_back('_');
            last_us = true;
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    ExperimentConfig c;
    c.dataset = j.at("dataset").get<std::string>();
    c.cache_dir = j.value("cache_dir", std::string("data"));
    c.offline = j.value("offline", false);
    c.halve = j.value("halve", true);
    if (j.contains("L") && j.at("L").is_number()) {
        c.derive_L = false;
        c.L = j.at("L").get<double>();
    } else if (j.contains("L") && j.at("L").get<std::string>() != "derive") {
        throw std::invalid_argument("L must be a number or \"derive\"");
    }
    c.f = j.value("f", 1.0);
    if (j.contains("altruism")) c.altruism = altruism_from_json(j.at("altruism"));
    c.epsilon = j.value("epsilon", 1e-5);
    c.relative_epsilon = j.value("relative_epsilon", false);
    if (j.contains("ladder")) c.ladder_rates = j.at("ladder").get<std::vector<double>>();
    StrategyLadder ladder;
    ladder_of(c, ladder);
    if (!j.contains("inits") || j.at("inits").empty())
        throw std::invalid_argument("config needs at least one init");
    for (const auto& ij : j.at("inits")) {
        bool has_seed = true;
        c.inits.push_back(init_from_json(ij, ladder, has_seed));
        c.init_has_seed.push_back(has_seed);
    }
    if (!j.contains("objectives") || j.at("objectives").empty())
        throw std::invalid_argument("config needs at least one objective");
    for (const auto& o : j.at("objectives")) {
        std::string s = o.get<std::string>();
        if (s != "nash" && s != "social" && s != "uniform_sweep")
            throw std::invalid_argument("unknown objective: " + s);
        c.objectives.push_back(s);
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) c.seeds.push_back(0);
    c.max_iters = j.value("max_iters", 200000LL);
    c.output_dir = j.value("output_dir", std::string("out"));
    c.trace_thinning = j.value("trace_thinning", 1LL);
    c.strict = j.value("strict", false);
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    return c;
}

ExperimentConfig config_from_file(const std::string& path) {
    return config_from_json(read_file(path));
}

std::string config_to_json(const ExperimentConfig& c) {
    StrategyLadder ladder;
    ladder_of(c, ladder);
    json j;
    j["dataset"] = c.dataset;
    j["cache_dir"] = c.cache_dir;
    j["offline"] = c.offline;
    j["halve"] = c.halve;
    if (c.derive_L)
        j["L"] = "derive";
    else
        j["L"] = c.L;
    j["f"] = c.f;
    j["altruism"] = altruism_to_json(c.altruism);
    j["epsilon"] = c.epsilon;
    j["relative_epsilon"] = c.relative_epsilon;
    j["ladder"] = ladder.rates;
    json inits = json::array();
    for (std::size_t i = 0; i < c.inits.size(); ++i)
        inits.push_back(init_to_json(c.inits[i], c.init_has_seed[i], ladder));
    j["inits"] = inits;
    j["objectives"] = c.objectives;
    j["seeds"] = c.seeds;
    j["max_iters"] = c.max_iters;
    j["output_dir"] = c.output_dir;
    j["trace_thinning"] = c.trace_thinning;
    j["strict"] = c.strict;
    return j.dump(2);
}

CommGraph load_dataset(const std::string& name_or_path, const std::string& cache_dir,
                       bool offline, bool halve) {
    std::string path = name_or_path;
    if (name_or_path == "message" || name_or_path == "mail")
        path = fetch_dataset(name_or_path, cache_dir, offline);
    CommGraph g = build_comm_graph(parse_temporal_edges_file(path));
    return halve ? halve_graph(g) : g;
}

namespace {

struct RunOutput {
    RunSummary summary;
    std::string base_name;
};

std::string format_fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    StrategyLadder ladder;
    ladder_of(config, ladder);

    CommGraph raw = [&] {
        std::string path = config.dataset;
        if (config.dataset == "message" || config.dataset == "mail")
            path = fetch_dataset(config.dataset, config.cache_dir, config.offline);
        return build_comm_graph(parse_temporal_edges_file(path));
    }();
    CommGraph halved;
    const CommGraph& g = config.halve ? (halved = halve_graph(raw)) : raw;

    double L = config.derive_L ? derive_privacy_loss(g) : config.L;
    GameParams params = make_params(g, L, config.f, ladder, config.altruism);
    NodeMetric bc = betweenness_centrality(g);
    double total_bc = 0.0;
    for (double v : bc.values) total_bc += v;

    fs::path out(config.output_dir);
    fs::create_directories(out / "runs");
    fs::create_directories(out / "reports");
    fs::create_directories(out / "cdf");

    json stats;
    stats["raw_stats"] = json::parse(graph_stats_json(graph_stats(raw)));
    stats["halved"] = config.halve;
    stats["stats"] = json::parse(graph_stats_json(graph_stats(g)));
    stats["L"] = L;
    write_file(out / "stats.json", stats.dump(2));
    write_file(out / "config_used.json", config_to_json(config));

    BrdOptions opts;
    opts.epsilon = config.epsilon;
    opts.relative_epsilon = config.relative_epsilon;
    opts.max_iters = config.max_iters;
    opts.trace_thinning = config.trace_thinning;

    ExperimentResult result;
    result.output_dir = out.string();
    std::vector<RunOutput> outputs;

    for (const std::string& objective : config.objectives) {
        if (objective == "uniform_sweep") {
            std::ostringstream os;
            os << "rate_exponent,rate,social_cost,total_privacy,total_bandwidth\n";
            os.precision(17);
            for (const SweepRow& r : uniform_sweep(g, params))
                os << ladder.exponent_label(r.rate_index) << ',' << r.rate << ',' << r.social_cost
                   << ',' << r.total_privacy << ',' << r.total_bandwidth << '\n';
            write_file(out / "sweep.csv", os.str());
            continue;
        }
        for (std::size_t i = 0; i < config.inits.size(); ++i) {
            for (std::uint64_t seed : config.seeds) {
                InitSpec spec = config.inits[i];
                if (spec.kind == InitKind::random && !config.init_has_seed[i]) spec.seed = seed;
                Profile init = realize_init(g, spec, ladder);

                RunRecord rec = objective == "nash" ? brd_run(g, params, init, opts)
                                                    : so_search(g, params, init, opts);
                rec.init_label = spec.label(ladder);
                rec.seed = seed;
                if (!rec.converged) result.any_nonconverged = true;

                EquilibriumReport report = equilibrium_metrics(g, params, rec.terminal, bc);
                BcCdf cdf = bc_contribution_cdf(rec.terminal, bc);

                std::string base = objective + "__" + slug(rec.init_label) + "__s" +
                                   std::to_string(seed);
                write_file(out / "runs" / (base + ".json"), run_record_json(rec, ladder));
                json rj = json::parse(equilibrium_report_json(report));
                rj["total_bc"] = total_bc;
                rj["init_label"] = rec.init_label;
                rj["objective"] = objective;
                rj["seed"] = seed;
                write_file(out / "reports" / (base + ".report.json"), rj.dump(2));
                write_file(out / "cdf" / (base + ".csv"), bc_cdf_csv(cdf));

                RunSummary s;
                s.init_label = rec.init_label;
                s.objective = objective;
                s.seed = seed;
                s.sumcost = rec.breakdown.social_cost;
                s.welfare = rec.breakdown.welfare;
                s.iterations = rec.iterations;
                s.sum_bc_at_max = report.max_node_bc_sum;
                s.top10_at_max = report.top10_in_max;
                s.converged = rec.converged;
                outputs.push_back(RunOutput{s, base});
            }
        }
    }

    // SW% / Iter% relative to the best (lowest sumcost) run per objective group
    std::map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const RunSummary& s = outputs[i].summary;
        auto it = best.find(s.objective);
        if (it == best.end() || s.sumcost < outputs[it->second].summary.sumcost)
            best[s.objective] = i;
    }
    for (RunOutput& o : outputs) {
        const RunSummary& b = outputs[best[o.summary.objective]].summary;
        o.summary.sw_pct = o.summary.sumcost > 0.0 ? 100.0 * b.sumcost / o.summary.sumcost : 100.0;
        long long base_iters = std::max<long long>(b.iterations, 1);
        o.summary.iter_pct = 100.0 * static_cast<double>(o.summary.iterations) /
                             static_cast<double>(base_iters);
    }

    std::ostringstream idx;
    idx << "init_label,objective,seed,sumcost,iterations,sw_pct,iter_pct,sum_bc_at_max,"
           "top10_at_max,converged\n";
    for (const RunOutput& o : outputs) {
        const RunSummary& s = o.summary;
        idx << '"' << s.init_label << "\"," << s.objective << ',' << s.seed << ','
            << format_fixed(s.sumcost, 1) << ',' << s.iterations << ','
            << format_fixed(s.sw_pct, 2) << ',' << format_fixed(s.iter_pct, 2) << ','
            << format_fixed(s.sum_bc_at_max, 4) << ',' << s.top10_at_max << ','
            << (s.converged ? "true" : "false") << '\n';
        result.index.push_back(s);
    }
    write_file(out / "index.csv", idx.str());
    return result;
}

namespace {

struct LoadedRun {
    std::string objective;
    std::string init_label;
    std::uint64_t seed = 0;
    double welfare = 0.0;
    double privacy_share = 0.0;
    double max_node_bc_sum = 0.0;
    double total_bc = 0.0;
    std::vector<std::string> terminal_exponents;
    std::string base_name;
};

std::vector<LoadedRun> load_runs(const fs::path& bundle) {
    std::vector<fs::path> files;
    if (fs::exists(bundle / "runs"))
        for (const auto& e : fs::directory_iterator(bundle / "runs")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<LoadedRun> runs;
    for (const fs::path& p : files) {
        if (p.extension() != ".json") continue;
        json rj = json::parse(read_file(p));
        LoadedRun r;
        r.objective = rj.at("objective").get<std::string>();
        r.init_label = rj.at("init_label").get<std::string>();
        r.seed = rj.at("seed").get<std::uint64_t>();
        r.welfare = rj.at("breakdown").at("welfare").get<double>();
        r.terminal_exponents = rj.at("terminal_exponents").get<std::vector<std::string>>();
        r.base_name = p.stem().string();
        fs::path report = bundle / "reports" / (r.base_name + ".report.json");
        if (fs::exists(report)) {
            json rep = json::parse(read_file(report));
            r.privacy_share = rep.at("privacy_share").get<double>();
            r.max_node_bc_sum = rep.at("max_node_bc_sum").get<double>();
            r.total_bc = rep.value("total_bc", 0.0);
        }
        runs.push_back(std::move(r));
    }
    return runs;
}

}  // namespace

std::string emit_plot_data(const std::string& bundle_dir, const std::string& figure,
                           const std::string& out_dir) {
    fs::path bundle(bundle_dir);
    fs::path out(out_dir);
    fs::create_directories(out);
    json cfg = json::parse(read_file(bundle / "config_used.json"));
    std::string model = cfg.at("altruism").at("model").get<std::string>();
    double a = cfg.at("altruism").at("a").get<double>();

    std::vector<LoadedRun> runs = load_runs(bundle);
    auto with_objective = [&](const std::string& obj) {
        std::vector<LoadedRun> v;
        for (const LoadedRun& r : runs)
            if (r.objective == obj) v.push_back(r);
        return v;
    };
    auto require_runs = [&](const std::string& obj) {
        auto v = with_objective(obj);
        if (v.empty())
            throw std::runtime_error(figure + ": bundle has no (init, objective='" + obj +
                                     "') runs");
        return v;
    };

    fs::path target = out / (figure + ".csv");
    std::ostringstream os;
    os.precision(12);

    if (figure == "fig2_sweep") {
        if (!fs::exists(bundle / "sweep.csv"))
            throw std::runtime_error(
                "fig2_sweep: bundle has no (init, objective='uniform_sweep') output");
        write_file(target, read_file(bundle / "sweep.csv"));
        return target.string();
    }
    if (figure == "fig3_so_hist" || figure == "fig4to7_ne_hist") {
        std::string obj = figure == "fig3_so_hist" ? "social" : "nash";
        os << "rate_exponent,node_count,model,a,init_label,seed\n";
        for (const LoadedRun& r : require_runs(obj)) {
            std::map<std::string, int> hist;
            for (const std::string& e : r.terminal_exponents) ++hist[e];
            for (const auto& [exponent, count] : hist)
                os << exponent << ',' << count << ',' << model << ',' << a << ",\""
                   << r.init_label << "\"," << r.seed << '\n';
        }
        write_file(target, os.str());
        return target.string();
    }
    if (figure == "fig8_bc_stack") {
        os << "init_label,seed,model,a,max_node_bc_sum,total_bc,fraction\n";
        for (const LoadedRun& r : require_runs("nash"))
            os << '"' << r.init_label << "\"," << r.seed << ',' << model << ',' << a << ','
               << r.max_node_bc_sum << ',' << r.total_bc << ','
               << (r.total_bc > 0.0 ? r.max_node_bc_sum / r.total_bc : 0.0) << '\n';
        write_file(target, os.str());
        return target.string();
    }
    if (figure == "fig9_cost_comp") {
        if (runs.empty()) throw std::runtime_error("fig9_cost_comp: bundle has no runs");
        os << "regime,model,a,init_label,seed,privacy_share,bandwidth_share\n";
        for (const LoadedRun& r : runs)
            os << (r.objective == "nash" ? "NE" : "SO") << ',' << model << ',' << a << ",\""
               << r.init_label << "\"," << r.seed << ',' << r.privacy_share << ','
               << 1.0 - r.privacy_share << '\n';
        write_file(target, os.str());
        return target.string();
    }
    if (figure == "fig10_poa_pos") {
        auto social = require_runs("social");
        auto nash = require_runs("nash");
        const LoadedRun* best_so = &social.front();
        for (const LoadedRun& r : social)
            if (r.welfare > best_so->welfare) best_so = &r;
        std::vector<double> ne_welfares;
        for (const LoadedRun& r : nash) ne_welfares.push_back(r.welfare);
        auto [poa, pos] = poa_pos(best_so->welfare, ne_welfares);
        double worst = *std::min_element(ne_welfares.begin(), ne_welfares.end());
        double best_ne = *std::max_element(ne_welfares.begin(), ne_welfares.end());
        os << "model,a,so_cost,worst_ne_cost,best_ne_cost,poa,pos\n";
        os << model << ',' << a << ',' << -best_so->welfare << ',' << -worst << ',' << -best_ne
           << ',' << poa << ',' << pos << '\n';
        write_file(target, os.str());
        return target.string();
    }
    if (figure == "fig11_bc_cdf") {
        os << "regime,init_label,seed,prefix_fraction,cumulative_bc\n";
        for (const std::string& obj : {std::string("nash"), std::string("social")}) {
            auto group = require_runs(obj);
            const LoadedRun* best = &group.front();
            for (const LoadedRun& r : group)
                if (r.welfare > best->welfare) best = &r;
            std::string cdf_text = read_file(bundle / "cdf" / (best->base_name + ".csv"));
            std::istringstream is(cdf_text);
            std::string line;
            std::getline(is, line);  // header
            while (std::getline(is, line)) {
                if (line.empty()) continue;
                os << (obj == "nash" ? "NE" : "SO") << ",\"" << best->init_label << "\","
                   << best->seed << ',' << line << '\n';
            }
        }
        write_file(target, os.str());
        return target.string();
    }
    throw std::invalid_argument("unknown figure: " + figure);
}

}  // namespace fmdgt
