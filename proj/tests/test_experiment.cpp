#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "fmdgt/experiment.hpp"
#include "helpers.hpp"

using namespace fmdgt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fmdgt_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

// deterministic 12-node message log
std::string tiny_dataset() {
    std::ostringstream os;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 90; ++i) {
        int s = static_cast<int>(bounded_u64(rng, 12));
        int d = static_cast<int>(bounded_u64(rng, 12));
        if (s == d) continue;
        os << s << ' ' << d << ' ' << 1000000 + i << '\n';
    }
    return os.str();
}

std::string base_config(const fs::path& dataset, const fs::path& out) {
    nlohmann::json j;
    j["dataset"] = dataset.string();
    j["halve"] = false;
    j["L"] = "derive";
    j["f"] = 1.0;
    j["altruism"] = {{"model", "global"}, {"a", 0.1}, {"assign", {{"rule", "all"}}}};
    j["epsilon"] = 1e-5;
    j["inits"] = nlohmann::json::array(
        {{{"kind", "threshold"}, {"property", "bc"}, {"cutoff", 0.01}, {"level", "-10"}},
         {{"kind", "random"}, {"seed", 0}},
         {{"kind", "random"}, {"seed", 1}}});
    j["objectives"] = {"nash", "social", "uniform_sweep"};
    j["output_dir"] = out.string();
    return j.dump(2);
}

std::string scrub_wall_time(std::string text) {
    return std::regex_replace(text, std::regex("\"wall_time_sec\": [^,\\n]+"),
                              "\"wall_time_sec\": 0");
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config round-trip") {
    TempDir tmp("config");
    std::string text = base_config(tmp.path / "d.txt", tmp.path / "out");
    ExperimentConfig c = config_from_json(text);
    CHECK(c.halve == false);
    CHECK(c.derive_L);
    CHECK(c.altruism.model == AltruismModel::global_);
    CHECK(c.inits.size() == 3);
    CHECK(c.objectives == std::vector<std::string>{"nash", "social", "uniform_sweep"});
    ExperimentConfig c2 = config_from_json(config_to_json(c));
    CHECK(c2.inits.size() == c.inits.size());
    CHECK(c2.epsilon == c.epsilon);
    CHECK(config_to_json(c2) == config_to_json(c));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config_from_json("{\"dataset\":\"x\",\"objectives\":[\"nash\"]}"),
                    std::invalid_argument);  // no inits
    CHECK_THROWS_AS(
        config_from_json("{\"dataset\":\"x\",\"inits\":[{\"kind\":\"random\"}],"
                         "\"objectives\":[\"bogus\"]}"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_json("{\"dataset\":\"x\",\"inits\":[{\"kind\":\"random\"}],"
                         "\"objectives\":[\"nash\"],\"epsilon\":0}"),
        std::invalid_argument);
}

TEST_CASE("run_experiment writes a complete reproducible bundle") {
    TempDir tmp("bundle");
    fs::path dataset = tmp.path / "tiny.txt";
    spit(dataset, tiny_dataset());
    ExperimentConfig cfg = config_from_json(base_config(dataset, tmp.path / "out"));

    ExperimentResult res = run_experiment(cfg);
    CHECK(res.index.size() == 6);  // 2 dynamic objectives x 3 inits x 1 seed
    CHECK(!res.any_nonconverged);

    fs::path out = tmp.path / "out";
    CHECK(fs::exists(out / "index.csv"));
    CHECK(fs::exists(out / "sweep.csv"));
    CHECK(fs::exists(out / "stats.json"));
    CHECK(fs::exists(out / "config_used.json"));
    std::size_t run_files = 0, report_files = 0, cdf_files = 0;
    for (const auto& e : fs::directory_iterator(out / "runs")) ++run_files, (void)e;
    for (const auto& e : fs::directory_iterator(out / "reports")) ++report_files, (void)e;
    for (const auto& e : fs::directory_iterator(out / "cdf")) ++cdf_files, (void)e;
    CHECK(run_files == 6);
    CHECK(report_files == 6);
    CHECK(cdf_files == 6);

    // sweep has 11 data rows
    std::istringstream sweep(slurp(out / "sweep.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(sweep, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 11);

    // per objective group the best row carries 100.00 / 100.00
    int hundred = 0;
    for (const RunSummary& s : res.index)
        if (s.sw_pct == 100.0 && s.iter_pct == 100.0) ++hundred;
    CHECK(hundred >= 2);
    for (const RunSummary& s : res.index) CHECK(s.sw_pct <= 100.0 + 1e-9);

    // rerun into a different directory: identical bytes modulo wall_time
    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = (tmp.path / "out2").string();
    run_experiment(cfg2);
    CHECK(slurp(out / "index.csv") == slurp(tmp.path / "out2" / "index.csv"));
    CHECK(slurp(out / "sweep.csv") == slurp(tmp.path / "out2" / "sweep.csv"));
    for (const auto& e : fs::directory_iterator(out / "runs")) {
        fs::path other = tmp.path / "out2" / "runs" / e.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(scrub_wall_time(slurp(e.path())) == scrub_wall_time(slurp(other)));
    }
}

TEST_CASE("random inits without explicit seeds take the run seed") {
    TempDir tmp("seeds");
    fs::path dataset = tmp.path / "tiny.txt";
    spit(dataset, tiny_dataset());
    nlohmann::json j = nlohmann::json::parse(base_config(dataset, tmp.path / "out"));
    j["inits"] = nlohmann::json::array({{{"kind", "random"}}});
    j["objectives"] = {"nash"};
    j["seeds"] = {3, 4};
    ExperimentConfig cfg = config_from_json(j.dump());
    ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.index.size() == 2);
    CHECK(res.index[0].init_label == "random_3");
    CHECK(res.index[1].init_label == "random_4");
    // the starting profiles differ, so the traces must differ even if the
    // terminal equilibria coincide
    nlohmann::json a = nlohmann::json::parse(
        slurp(tmp.path / "out" / "runs" / "nash__random_3__s3.json"));
    nlohmann::json b = nlohmann::json::parse(
        slurp(tmp.path / "out" / "runs" / "nash__random_4__s4.json"));
    CHECK(a.at("trace") != b.at("trace"));
}

TEST_CASE("plot data emission covers every figure") {
    TempDir tmp("plots");
    fs::path dataset = tmp.path / "tiny.txt";
    spit(dataset, tiny_dataset());
    ExperimentConfig cfg = config_from_json(base_config(dataset, tmp.path / "out"));
    run_experiment(cfg);
    fs::path plots = tmp.path / "plots";

    for (std::string fig : {"fig2_sweep", "fig3_so_hist", "fig4to7_ne_hist", "fig8_bc_stack",
                            "fig9_cost_comp", "fig10_poa_pos", "fig11_bc_cdf"}) {
        std::string path = emit_plot_data((tmp.path / "out").string(), fig, plots.string());
        CHECK(fs::exists(path));
    }

    // shares sum to one
    std::istringstream f9(slurp(plots / "fig9_cost_comp.csv"));
    std::string line;
    std::getline(f9, line);
    int data_rows = 0;
    while (std::getline(f9, line)) {
        if (line.empty()) continue;
        ++data_rows;
        auto last_comma = line.rfind(',');
        auto prev_comma = line.rfind(',', last_comma - 1);
        double priv = std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1));
        double bw = std::stod(line.substr(last_comma + 1));
        CHECK(priv + bw == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(data_rows == 6);

    // poa >= pos >= 1
    std::istringstream f10(slurp(plots / "fig10_poa_pos.csv"));
    std::getline(f10, line);
    std::getline(f10, line);
    auto last = line.rfind(',');
    auto prev = line.rfind(',', last - 1);
    double poa = std::stod(line.substr(prev + 1, last - prev - 1));
    double pos = std::stod(line.substr(last + 1));
    CHECK(poa >= pos);
    CHECK(pos >= 1.0 - 1e-9);
    CHECK_THROWS_AS(emit_plot_data((tmp.path / "out").string(), "fig99", plots.string()),
                    std::invalid_argument);
}

TEST_CASE("missing runs are reported with the absent objective") {
    TempDir tmp("missing");
    fs::path dataset = tmp.path / "tiny.txt";
    spit(dataset, tiny_dataset());
    nlohmann::json j = nlohmann::json::parse(base_config(dataset, tmp.path / "out"));
    j["objectives"] = {"nash"};
    run_experiment(config_from_json(j.dump()));
    try {
        emit_plot_data((tmp.path / "out").string(), "fig10_poa_pos", (tmp.path / "p").string());
        FAIL("expected an error about missing social runs");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("social") != std::string::npos);
    }
    try {
        emit_plot_data((tmp.path / "out").string(), "fig2_sweep", (tmp.path / "p").string());
        FAIL("expected an error about the missing sweep");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("uniform_sweep") != std::string::npos);
    }
}

TEST_CASE("fetch: unknown names and offline cache behavior") {
    TempDir tmp("fetch");
    CHECK_THROWS_AS(fetch_dataset("nope", tmp.path.string()), std::invalid_argument);
    CHECK_THROWS_AS(fetch_dataset("message", tmp.path.string(), /*offline=*/true),
                    std::runtime_error);

    // cache hit: second call must not need the network
    spit(tmp.path / "CollegeMsg.txt", "1 2 100\n2 1 101\n");
    std::string p = fetch_dataset("message", tmp.path.string(), true);
    CHECK(fs::exists(tmp.path / "CollegeMsg.txt.meta.json"));
    CHECK(fetch_dataset("message", tmp.path.string(), true) == p);

    // tampering is caught by the recorded checksum
    spit(tmp.path / "CollegeMsg.txt", "9 9 999\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(fetch_dataset("message", tmp.path.string(), true)),
                         doctest::Contains("checksum"), std::runtime_error);
}

TEST_CASE("load_dataset resolves paths and applies halving") {
    TempDir tmp("load");
    fs::path dataset = tmp.path / "tiny.txt";
    spit(dataset, tiny_dataset());
    CommGraph full = load_dataset(dataset.string(), tmp.path.string(), true, false);
    CommGraph half = load_dataset(dataset.string(), tmp.path.string(), true, true);
    CHECK(half.node_count == (full.node_count + 1) / 2);
    CHECK_THROWS_AS(load_dataset((tmp.path / "absent.txt").string(), tmp.path.string(), true,
                                 false),
                    std::runtime_error);
}

TEST_CASE("gzip streams inflate correctly") {
    // build a gzip blob with zlib's deflate, then round-trip through the
    // fetch decompressor
    std::string payload;
    for (int i = 0; i < 2000; ++i) payload += std::to_string(i) + " " + std::to_string(i + 1) + " 100\n";
    z_stream zs{};
    REQUIRE(deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) == Z_OK);
    std::string compressed(deflateBound(&zs, payload.size()), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(payload.data());
    zs.avail_in = static_cast<uInt>(payload.size());
    zs.next_out = reinterpret_cast<Bytef*>(compressed.data());
    zs.avail_out = static_cast<uInt>(compressed.size());
    REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
    compressed.resize(compressed.size() - zs.avail_out);
    deflateEnd(&zs);

    CHECK(detail::gunzip(compressed) == payload);
    CHECK_THROWS_AS(detail::gunzip("not gzip data"), std::runtime_error);
}

}  // TEST_SUITE
