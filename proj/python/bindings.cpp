#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fmdgt/analysis.hpp"
#include "fmdgt/experiment.hpp"

namespace py = pybind11;
using namespace fmdgt;

namespace {

Objective objective_from_string(const std::string& s) {
    if (s == "own_utility") return Objective::own_utility;
    if (s == "welfare") return Objective::welfare;
    throw std::invalid_argument("objective must be 'own_utility' or 'welfare'");
}

AssignRule::Kind assign_kind_from_string(const std::string& s) {
    if (s == "all") return AssignRule::Kind::all;
    if (s == "random_k") return AssignRule::Kind::random_k;
    if (s == "top_k_by_metric") return AssignRule::Kind::top_k_by_metric;
    throw std::invalid_argument("assign rule must be 'all', 'random_k' or 'top_k_by_metric'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FMD cover-traffic game: graphs, utilities, best-response dynamics and analysis";

    py::class_<CommGraph>(m, "CommGraph")
        .def_readonly("node_count", &CommGraph::node_count)
        .def_readonly("labels", &CommGraph::labels)
        .def_readonly("in_msgs", &CommGraph::in_msgs)
        .def_readonly("out_msgs", &CommGraph::out_msgs)
        .def_readonly("contacts", &CommGraph::contacts)
        .def_readonly("total_messages", &CommGraph::total_messages)
        .def_readonly("dropped_self_loops", &CommGraph::dropped_self_loops)
        .def("__repr__", [](const CommGraph& g) {
            std::ostringstream os;
            os << "CommGraph(nodes=" << g.node_count << ", messages=" << g.total_messages << ")";
            return os.str();
        });

    py::class_<GraphStats>(m, "GraphStats")
        .def_readonly("node_count", &GraphStats::node_count)
        .def_readonly("edge_pair_count", &GraphStats::edge_pair_count)
        .def_readonly("total_messages", &GraphStats::total_messages)
        .def_readonly("max_in", &GraphStats::max_in)
        .def_readonly("isolated_count", &GraphStats::isolated_count)
        .def_readonly("density", &GraphStats::density)
        .def_readonly("self_loops_dropped", &GraphStats::self_loops_dropped)
        .def("to_json", [](const GraphStats& s) { return graph_stats_json(s); });

    m.def("load_edges", [](const std::string& path) {
        return build_comm_graph(parse_temporal_edges_file(path));
    });
    m.def("parse_edges_text", [](const std::string& text) {
        std::istringstream is(text);
        return build_comm_graph(parse_temporal_edges(is));
    });
    m.def("halve_graph", &halve_graph);
    m.def("graph_stats", &graph_stats);
    m.def("derive_privacy_loss", &derive_privacy_loss);

    py::class_<NodeMetric>(m, "NodeMetric")
        .def_readonly("values", &NodeMetric::values)
        .def_readonly("normalized", &NodeMetric::normalized);
    m.def("betweenness_centrality", &betweenness_centrality);
    m.def("degree_vector", &degree_vector);
    m.def("top_k_ids", &top_k_ids);

    py::class_<StrategyLadder>(m, "StrategyLadder")
        .def_static("standard", &StrategyLadder::standard)
        .def_static("from_rates", &StrategyLadder::from_rates)
        .def_readonly("rates", &StrategyLadder::rates)
        .def("exponent_label", &StrategyLadder::exponent_label)
        .def("index_of_exponent", &StrategyLadder::index_of_exponent);

    py::class_<Profile>(m, "Profile")
        .def(py::init([](std::vector<int> idx) { return Profile{std::move(idx)}; }))
        .def_static("uniform", &Profile::uniform)
        .def_readonly("indices", &Profile::idx)
        .def("__eq__", [](const Profile& a, const Profile& b) { return a == b; })
        .def("__len__", &Profile::size);
    m.def("profile_to_csv", &profile_to_csv);
    m.def("profile_from_csv", &profile_from_csv);

    py::class_<GameParams>(m, "GameParams")
        .def_readonly("L", &GameParams::L)
        .def_readonly("f", &GameParams::f)
        .def_readonly("ladder", &GameParams::ladder)
        .def_readonly("a", &GameParams::a);
    m.def(
        "make_params",
        [](const CommGraph& g, double L, double f, const StrategyLadder& ladder,
           const std::string& model, double a, const std::string& assign_rule, int k,
           std::uint64_t seed, const std::string& metric) {
            AltruismSpec spec;
            spec.model = altruism_model_from_string(model);
            spec.a = a;
            spec.assign = AssignRule{assign_kind_from_string(assign_rule), k, seed, metric};
            return make_params(g, L, f, ladder, spec);
        },
        py::arg("graph"), py::arg("L"), py::arg("f"), py::arg("ladder"),
        py::arg("model") = "selfish", py::arg("a") = 0.0, py::arg("assign_rule") = "all",
        py::arg("k") = 0, py::arg("seed") = 0, py::arg("metric") = "bc");
    m.def("altruism_incidence", &altruism_incidence);

    py::class_<CostBreakdown>(m, "CostBreakdown")
        .def_readonly("total_privacy", &CostBreakdown::total_privacy)
        .def_readonly("total_bandwidth", &CostBreakdown::total_bandwidth)
        .def_readonly("social_cost", &CostBreakdown::social_cost)
        .def_readonly("welfare", &CostBreakdown::welfare);

    py::class_<UtilityState>(m, "UtilityState")
        .def_property_readonly("profile", [](const UtilityState& s) { return s.prof; })
        .def_readonly("log_sum", &UtilityState::log_sum);
    m.def("make_state", &make_state, py::keep_alive<0, 1>(), py::keep_alive<0, 2>(),
          py::arg("graph"), py::arg("params"), py::arg("profile"));
    m.def("alpha_of", &alpha_of);
    m.def("privacy_cost", &privacy_cost);
    m.def("bandwidth_cost", &bandwidth_cost);
    m.def("player_utility", &player_utility);
    m.def("cost_breakdown", &cost_breakdown);
    m.def(
        "eval_unilateral_move",
        [](const UtilityState& s, int u, int new_idx, const std::string& objective) {
            return eval_unilateral_move(s, u, new_idx, objective_from_string(objective));
        },
        py::arg("state"), py::arg("node"), py::arg("new_idx"),
        py::arg("objective") = "own_utility");
    m.def("apply_move", &apply_move);

    m.def("init_threshold", &init_threshold);
    m.def("init_sorted", [](const CommGraph& g, const NodeMetric& metric, const std::string& interp,
                            const StrategyLadder& ladder) {
        return init_sorted(g, metric,
                           interp == "exponential" ? Interp::exponential : Interp::linear, ladder);
    });
    m.def("init_random", &init_random);

    py::class_<TraceEntry>(m, "TraceEntry")
        .def_readonly("iteration", &TraceEntry::iteration)
        .def_readonly("node", &TraceEntry::node)
        .def_readonly("old_idx", &TraceEntry::old_idx)
        .def_readonly("new_idx", &TraceEntry::new_idx)
        .def_readonly("gain", &TraceEntry::gain)
        .def_readonly("objective_after", &TraceEntry::objective_after);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("init_label", &RunRecord::init_label)
        .def_readonly("seed", &RunRecord::seed)
        .def_property_readonly(
            "objective",
            [](const RunRecord& r) {
                return r.objective == RunObjective::nash ? "nash" : "social";
            })
        .def_readonly("iterations", &RunRecord::iterations)
        .def_readonly("converged", &RunRecord::converged)
        .def_readonly("terminal", &RunRecord::terminal)
        .def_readonly("breakdown", &RunRecord::breakdown)
        .def_readonly("trace", &RunRecord::trace)
        .def_readonly("wall_time_sec", &RunRecord::wall_time_sec)
        .def("to_json",
             [](const RunRecord& r, const StrategyLadder& l) { return run_record_json(r, l); });

    auto run_options = [](double epsilon, bool relative_epsilon, long long max_iters,
                          long long trace_thinning) {
        BrdOptions o;
        o.epsilon = epsilon;
        o.relative_epsilon = relative_epsilon;
        o.max_iters = max_iters;
        o.trace_thinning = trace_thinning;
        return o;
    };
    m.def(
        "brd_run",
        [run_options](const CommGraph& g, const GameParams& p, const Profile& init, double epsilon,
                      bool relative_epsilon, long long max_iters, long long trace_thinning) {
            return brd_run(g, p, init,
                           run_options(epsilon, relative_epsilon, max_iters, trace_thinning));
        },
        py::arg("graph"), py::arg("params"), py::arg("init"), py::arg("epsilon") = 1e-5,
        py::arg("relative_epsilon") = false, py::arg("max_iters") = 200000LL,
        py::arg("trace_thinning") = 1LL);
    m.def(
        "so_search",
        [run_options](const CommGraph& g, const GameParams& p, const Profile& init, double epsilon,
                      bool relative_epsilon, long long max_iters, long long trace_thinning) {
            return so_search(g, p, init,
                             run_options(epsilon, relative_epsilon, max_iters, trace_thinning));
        },
        py::arg("graph"), py::arg("params"), py::arg("init"), py::arg("epsilon") = 1e-5,
        py::arg("relative_epsilon") = false, py::arg("max_iters") = 200000LL,
        py::arg("trace_thinning") = 1LL);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("rate_index", &SweepRow::rate_index)
        .def_readonly("rate", &SweepRow::rate)
        .def_readonly("social_cost", &SweepRow::social_cost)
        .def_readonly("total_privacy", &SweepRow::total_privacy)
        .def_readonly("total_bandwidth", &SweepRow::total_bandwidth);
    m.def("uniform_sweep", &uniform_sweep);

    py::class_<Deviation>(m, "Deviation")
        .def_readonly("node", &Deviation::node)
        .def_readonly("new_idx", &Deviation::new_idx)
        .def_readonly("gain", &Deviation::gain);
    m.def(
        "verify_step_stable",
        [](const CommGraph& g, const GameParams& p, const Profile& prof, double epsilon,
           const std::string& objective, bool relative) {
            return verify_step_stable(g, p, prof, epsilon, objective_from_string(objective),
                                      relative);
        },
        py::arg("graph"), py::arg("params"), py::arg("profile"), py::arg("epsilon"),
        py::arg("objective") = "own_utility", py::arg("relative") = false);
    m.def(
        "verify_epsilon_ne",
        [](const CommGraph& g, const GameParams& p, const Profile& prof, double epsilon,
           const std::string& objective, bool relative) {
            return verify_epsilon_ne(g, p, prof, epsilon, objective_from_string(objective),
                                     relative);
        },
        py::arg("graph"), py::arg("params"), py::arg("profile"), py::arg("epsilon"),
        py::arg("objective") = "own_utility", py::arg("relative") = false);

    py::class_<OracleResult>(m, "OracleResult")
        .def_readonly("ne_profiles", &OracleResult::ne_profiles)
        .def_readonly("so_profile", &OracleResult::so_profile)
        .def_readonly("so_welfare", &OracleResult::so_welfare)
        .def_readonly("welfare_table", &OracleResult::welfare_table)
        .def("to_json", [](const OracleResult& r, const StrategyLadder& l) {
            return oracle_result_json(r, l);
        });
    m.def("enumerate_oracle", &enumerate_oracle, py::arg("graph"), py::arg("params"),
          py::arg("max_profiles") = 1000000LL);
    m.def("poa_pos", &poa_pos);

    py::class_<EquilibriumReport>(m, "EquilibriumReport")
        .def_readonly("strategy_histogram", &EquilibriumReport::strategy_histogram)
        .def_readonly("total_privacy", &EquilibriumReport::total_privacy)
        .def_readonly("total_bandwidth", &EquilibriumReport::total_bandwidth)
        .def_readonly("privacy_share", &EquilibriumReport::privacy_share)
        .def_readonly("max_nodes", &EquilibriumReport::max_nodes)
        .def_readonly("max_node_bc_sum", &EquilibriumReport::max_node_bc_sum)
        .def_readonly("max_node_fraction", &EquilibriumReport::max_node_fraction)
        .def_readonly("top10_in_max", &EquilibriumReport::top10_in_max)
        .def_readonly("bc_cdf_p10", &EquilibriumReport::bc_cdf_p10)
        .def_readonly("bc_cdf_p50", &EquilibriumReport::bc_cdf_p50)
        .def_readonly("bc_cdf_p90", &EquilibriumReport::bc_cdf_p90)
        .def("to_json", &equilibrium_report_json);
    m.def("equilibrium_metrics", &equilibrium_metrics);

    py::class_<BcCdf>(m, "BcCdf")
        .def_readonly("cumulative", &BcCdf::cumulative)
        .def_readonly("p10", &BcCdf::p10)
        .def_readonly("p50", &BcCdf::p50)
        .def_readonly("p90", &BcCdf::p90)
        .def("to_csv", &bc_cdf_csv);
    m.def("bc_contribution_cdf", &bc_contribution_cdf);

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("init_label", &RunSummary::init_label)
        .def_readonly("objective", &RunSummary::objective)
        .def_readonly("seed", &RunSummary::seed)
        .def_readonly("sumcost", &RunSummary::sumcost)
        .def_readonly("welfare", &RunSummary::welfare)
        .def_readonly("iterations", &RunSummary::iterations)
        .def_readonly("sw_pct", &RunSummary::sw_pct)
        .def_readonly("iter_pct", &RunSummary::iter_pct)
        .def_readonly("sum_bc_at_max", &RunSummary::sum_bc_at_max)
        .def_readonly("top10_at_max", &RunSummary::top10_at_max)
        .def_readonly("converged", &RunSummary::converged);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("output_dir", &ExperimentResult::output_dir)
        .def_readonly("index", &ExperimentResult::index)
        .def_readonly("any_nonconverged", &ExperimentResult::any_nonconverged);
    m.def("run_experiment",
          [](const std::string& config_json) { return run_experiment(config_from_json(config_json)); });
    m.def("run_experiment_file",
          [](const std::string& path) { return run_experiment(config_from_file(path)); });
    m.def("emit_plot_data", &emit_plot_data);
    m.def("fetch_dataset", &fetch_dataset, py::arg("name"), py::arg("cache_dir"),
          py::arg("offline") = false);
    m.def("load_dataset", &load_dataset, py::arg("name_or_path"), py::arg("cache_dir") = "data",
          py::arg("offline") = false, py::arg("halve") = false);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "0.1.0";
#endif
}
