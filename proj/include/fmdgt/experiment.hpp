#ifndef FMDGT_EXPERIMENT_HPP
#define FMDGT_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fmdgt/analysis.hpp"
#include "fmdgt/dynamics.hpp"

namespace fmdgt {

// One experiment batch: a dataset, game parameters, a menu of initial
// profiles, and the objectives to run. Loaded from a single JSON document.
struct ExperimentConfig {
    std::string dataset;          // path, or dataset name ("message" / "mail")
    std::string cache_dir = "data";
    bool offline = false;
    bool halve = true;
    bool derive_L = true;  // L = M - max_in + 1 unless an explicit value is given
    double L = 0.0;
    double f = 1.0;
    AltruismSpec altruism;
    double epsilon = 1e-5;
    bool relative_epsilon = false;
    std::vector<double> ladder_rates;  // empty = standard ladder
    std::vector<InitSpec> inits;
    std::vector<bool> init_has_seed;        // random inits without a seed take the run seed
    std::vector<std::string> objectives;    // subset of {"nash","social","uniform_sweep"}
    std::vector<std::uint64_t> seeds{0};
    long long max_iters = 200000;
    std::string output_dir = "out";
    long long trace_thinning = 1;
    bool strict = false;
};

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig config_from_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& c);

struct RunSummary {
    std::string init_label;
    std::string objective;
    std::uint64_t seed = 0;
    double sumcost = 0.0;  // base social cost
    double welfare = 0.0;
    long long iterations = 0;
    double sw_pct = 0.0;    // 100 * best sumcost / sumcost, per objective group
    double iter_pct = 0.0;  // 100 * iterations / best run's iterations
    double sum_bc_at_max = 0.0;
    int top10_at_max = 0;
    bool converged = true;
};

struct ExperimentResult {
    std::string output_dir;
    std::vector<RunSummary> index;
    bool any_nonconverged = false;
};

// Runs every (objective, init, seed) combination and writes, under
// output_dir: runs/*.json (RunRecord), reports/*.report.json, cdf/*.csv,
// index.csv, sweep.csv (when requested), stats.json and config_used.json.
// Re-running the same config yields identical bytes except wall_time fields.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Tidy per-figure CSV series derived from a result bundle directory.
// Figures: fig2_sweep, fig3_so_hist, fig4to7_ne_hist, fig8_bc_stack,
// fig9_cost_comp, fig10_poa_pos, fig11_bc_cdf.
std::string emit_plot_data(const std::string& bundle_dir, const std::string& figure,
                           const std::string& out_dir);

// Downloads (plain http + gzip) and caches a known dataset, validating the
// decompressed content against the published node/event counts. offline=true
// never touches the network.
std::string fetch_dataset(const std::string& name, const std::string& cache_dir,
                          bool offline = false);

// Loads a dataset by name (fetching into cache_dir if needed) or by path.
CommGraph load_dataset(const std::string& name_or_path, const std::string& cache_dir,
                       bool offline, bool halve);

namespace detail {
// gzip/zlib stream decompression used by fetch_dataset.
std::string gunzip(const std::string& compressed);
}  // namespace detail

}  // namespace fmdgt

#endif
