// Command-line front end: dataset fetching, graph stats, experiment batches,
// profile verification, exhaustive small-game enumeration and plot-data
// emission. Exit codes: 0 ok, 1 usage/config error, 2 data error,
// 3 non-convergence in strict mode.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fmdgt/analysis.hpp"
#include "fmdgt/experiment.hpp"

using namespace fmdgt;

namespace {

StrategyLadder parse_ladder(const std::string& csv) {
    if (csv.empty()) return StrategyLadder::standard();
    std::vector<double> rates;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) rates.push_back(std::stod(tok));
    return StrategyLadder::from_rates(std::move(rates));
}

GameParams build_params(const CommGraph& g, const std::string& L_arg, double f,
                        const StrategyLadder& ladder, const std::string& model, double a) {
    double L = L_arg == "derive" ? derive_privacy_loss(g) : std::stod(L_arg);
    AltruismSpec spec;
    spec.model = altruism_model_from_string(model);
    spec.a = a;
    return make_params(g, L, f, ladder, spec);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMD cover-traffic game simulator and analysis toolkit"};
    app.require_subcommand(1);

    auto* fetch = app.add_subcommand("fetch", "Download and cache a dataset");
    std::string fetch_name, fetch_cache = "data";
    bool fetch_offline = false;
    fetch->add_option("--name", fetch_name, "Dataset name: message or mail")->required();
    fetch->add_option("--cache", fetch_cache, "Cache directory");
    fetch->add_flag("--offline", fetch_offline, "Use the cache only, never the network");

    auto* stats = app.add_subcommand("stats", "Graph statistics as flat JSON");
    std::string stats_dataset, stats_cache = "data", stats_out;
    bool stats_halve = false, stats_offline = false;
    stats->add_option("--dataset", stats_dataset, "Dataset path or name")->required();
    stats->add_flag("--halve", stats_halve, "Apply the degree-rank halving first");
    stats->add_option("--cache", stats_cache, "Cache directory for named datasets");
    stats->add_flag("--offline", stats_offline, "Never touch the network");
    stats->add_option("--json", stats_out, "Write JSON here instead of stdout");

    auto* run = app.add_subcommand("run", "Run an experiment batch from a JSON config");
    std::string run_config, run_dataset, run_output;
    double run_epsilon = -1.0;
    bool run_strict = false;
    int run_halve = -1;
    long long run_seed = -1;
    run->add_option("--config", run_config, "Experiment config JSON file")->required();
    run->add_option("--dataset", run_dataset, "Override the config's dataset");
    run->add_option("--output", run_output, "Override the config's output directory");
    run->add_option("--epsilon", run_epsilon, "Override the config's epsilon");
    run->add_option("--seed", run_seed, "Run a single seed instead of the config's list");
    run->add_flag("--strict", run_strict, "Exit 3 when any run fails to converge");
    run->add_flag("--halve{1},--no-halve{0}", run_halve, "Override the config's halve flag");

    auto* verify = app.add_subcommand("verify", "Check a profile for step/ladder stability");
    std::string v_dataset, v_cache = "data", v_profile, v_model = "selfish", v_L = "derive";
    std::string v_objective = "nash", v_ladder;
    double v_a = 0.0, v_f = 1.0, v_eps = 1e-5;
    bool v_halve = false, v_full = false, v_relative = false, v_offline = false;
    verify->add_option("--dataset", v_dataset)->required();
    verify->add_flag("--halve", v_halve);
    verify->add_option("--cache", v_cache);
    verify->add_flag("--offline", v_offline);
    verify->add_option("--profile", v_profile, "Profile CSV (node_id,rate_exponent)")->required();
    verify->add_option("--model", v_model, "selfish | local | global");
    verify->add_option("--a", v_a, "Altruistic constant");
    verify->add_option("--L", v_L, "Privacy-breach cost or 'derive'");
    verify->add_option("--f", v_f, "Bandwidth cost per message");
    verify->add_option("--epsilon", v_eps);
    verify->add_option("--ladder", v_ladder, "Comma-separated rates (default standard)");
    verify->add_flag("--full-ladder", v_full, "Check all alternative rates, not just +/-1 steps");
    verify->add_flag("--relative", v_relative, "Relative epsilon threshold");
    verify->add_option("--objective", v_objective, "nash (own utility) | social (welfare)");

    auto* oracle = app.add_subcommand("oracle", "Exhaustively enumerate a small instance");
    std::string o_dataset, o_cache = "data", o_model = "selfish", o_L = "derive", o_ladder;
    double o_a = 0.0, o_f = 1.0;
    long long o_max = 1000000;
    bool o_halve = false, o_offline = false;
    oracle->add_option("--dataset", o_dataset)->required();
    oracle->add_flag("--halve", o_halve);
    oracle->add_option("--cache", o_cache);
    oracle->add_flag("--offline", o_offline);
    oracle->add_option("--model", o_model);
    oracle->add_option("--a", o_a);
    oracle->add_option("--L", o_L);
    oracle->add_option("--f", o_f);
    oracle->add_option("--ladder", o_ladder, "Comma-separated rates (default standard)");
    oracle->add_option("--max-profiles", o_max);

    auto* plot = app.add_subcommand("plotdata", "Emit per-figure CSV series from a result bundle");
    std::string p_bundle, p_figure, p_out = "plots";
    plot->add_option("--bundle", p_bundle, "run_experiment output directory")->required();
    plot->add_option("--figure", p_figure,
                     "fig2_sweep | fig3_so_hist | fig4to7_ne_hist | fig8_bc_stack | "
                     "fig9_cost_comp | fig10_poa_pos | fig11_bc_cdf")
        ->required();
    plot->add_option("--out", p_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fetch) {
            std::cout << fetch_dataset(fetch_name, fetch_cache, fetch_offline) << "\n";
        } else if (*stats) {
            CommGraph g = load_dataset(stats_dataset, stats_cache, stats_offline, stats_halve);
            std::string out = graph_stats_json(graph_stats(g));
            if (stats_out.empty()) {
                std::cout << out << "\n";
            } else {
                std::ofstream f(stats_out);
                f << out << "\n";
            }
        } else if (*run) {
            ExperimentConfig cfg = config_from_file(run_config);
            if (!run_dataset.empty()) cfg.dataset = run_dataset;
            if (!run_output.empty()) cfg.output_dir = run_output;
            if (run_epsilon > 0.0) cfg.epsilon = run_epsilon;
            if (run_seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(run_seed)};
            if (run_halve >= 0) cfg.halve = run_halve != 0;
            if (run_strict) cfg.strict = true;
            ExperimentResult res = run_experiment(cfg);
            std::cout << "wrote " << res.index.size() << " runs to " << res.output_dir << "\n";
            if (cfg.strict && res.any_nonconverged) {
                std::cerr << "error: at least one run did not converge\n";
                return 3;
            }
        } else if (*verify) {
            CommGraph g = load_dataset(v_dataset, v_cache, v_offline, v_halve);
            StrategyLadder ladder = parse_ladder(v_ladder);
            GameParams params = build_params(g, v_L, v_f, ladder, v_model, v_a);
            Profile prof = profile_from_csv(read_text(v_profile), ladder);
            Objective obj =
                v_objective == "social" ? Objective::welfare : Objective::own_utility;
            auto violations =
                v_full ? verify_epsilon_ne(g, params, prof, v_eps, obj, v_relative)
                       : verify_step_stable(g, params, prof, v_eps, obj, v_relative);
            nlohmann::json j;
            j["stable"] = violations.empty();
            j["check"] = v_full ? "full_ladder" : "single_step";
            nlohmann::json arr = nlohmann::json::array();
            for (const Deviation& d : violations)
                arr.push_back({{"node", d.node}, {"new_idx", d.new_idx}, {"gain", d.gain}});
            j["violations"] = arr;
            std::cout << j.dump(2) << "\n";
        } else if (*oracle) {
            CommGraph g = load_dataset(o_dataset, o_cache, o_offline, o_halve);
            StrategyLadder ladder = parse_ladder(o_ladder);
            GameParams params = build_params(g, o_L, o_f, ladder, o_model, o_a);
            OracleResult res = enumerate_oracle(g, params, o_max);
            std::cout << oracle_result_json(res, ladder) << "\n";
        } else if (*plot) {
            std::cout << emit_plot_data(p_bundle, p_figure, p_out) << "\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
