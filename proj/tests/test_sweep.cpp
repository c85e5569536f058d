#include "sdfsim/arena.hpp"
#include "sdfsim/error.hpp"
#include "sdfsim/io.hpp"
#include "sdfsim/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sdfsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
    auto dir = fs::temp_directory_path() / ("sdfsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

SweepSpec small_spec(const fs::path &dir)
{
    SweepSpec s;
    s.trials_per_cell = 3;
    s.k_max = 600;
    s.metrics.K_max = 600;
    s.output_dir = dir.string();
    s.P = {10};
    s.filter_mode = {FilterMode::None, FilterMode::OnlyFlawed};
    s.tau = {100};
    return s;
}

} // namespace

TEST_CASE("parse_sweep fills defaults")
{
    const auto parsed = parse_sweep(R"({"P": 0, "tau": 1000, "b": 0.95, "b_hat_flawed": 0.55, "f": 0.55,
                                        "filter_mode": "none", "regime": "fully_connected"})");
    const auto &s = parsed.spec;
    CHECK(parsed.warnings.empty());
    CHECK(s.trials_per_cell == 30);
    CHECK(s.k_max == 40000);
    CHECK(s.metrics.delta == 0.01);
    CHECK(s.metrics.K_max == 40000.0);
    CHECK(s.metrics.e_max == 0.45);
    CHECK(s.omega == 0.05);
    CHECK(enumerate_cells(s).size() == 1);
    CHECK(raw_cell_count(s) == 1);
}

TEST_CASE("parse_sweep counts the full dynamic grid")
{
    const auto parsed = parse_sweep(R"({"regime": ["dynamic"], "P": [0, 10, 30, 50, 100], "tau": [1000, 2000, 4000],
        "b": [0.55, 0.95], "b_hat_flawed": [0.55, 0.75, 0.95], "f": [0.55, 0.95], "filter_mode": ["all"]})");
    CHECK(raw_cell_count(parsed.spec) == 180);
    // P = 0 collapses the flawed axis (3 tau x 2 b x 2 f = 12); P > 0 drops b_hat == b (4 P x 3 tau x 2 b x 2 x 2 f = 96).
    CHECK(enumerate_cells(parsed.spec).size() == 12 + 96);
}

TEST_CASE("parse_sweep warns about fractional flawed counts")
{
    const auto parsed = parse_sweep(R"({"regime": "dynamic", "P": [37]})");
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0].find("using 7") != std::string::npos);
    CHECK(flawed_count(parsed.spec.robots_for(Regime::Dynamic), 37) == 7);
}

TEST_CASE("parse_sweep rejects bad documents")
{
    CHECK_THROWS_AS(parse_sweep("{"), ParseError);
    CHECK_THROWS_AS(parse_sweep("[1, 2]"), ParseError);
    try
    {
        parse_sweep(R"({"colour": 1})");
        FAIL("unknown key accepted");
    }
    catch (const ParseError &e)
    {
        CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }
    try
    {
        parse_sweep(R"({"tau": "often"})");
        FAIL("bad type accepted");
    }
    catch (const ParseError &e)
    {
        CHECK(std::string(e.what()).find("'tau'") != std::string::npos);
        CHECK(std::string(e.what()).find("integer") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_sweep(R"({"b": [0.4]})"), ParseError);
    CHECK_THROWS_AS(parse_sweep(R"({"P": []})"), ParseError);
    CHECK_THROWS_AS(parse_sweep(R"({"filter_mode": "sometimes"})"), ParseError);
    CHECK_THROWS_AS(parse_sweep(R"({"trials_per_cell": 0})"), ParseError);
    CHECK_THROWS_AS(parse_sweep(R"({"k_max": 50000})"), ParseError);
    CHECK_NOTHROW(parse_sweep(R"({"k_max": 50000, "K_max": 50000})"));
}

TEST_CASE("seeds depend only on cell identity and trial")
{
    SweepSpec s;
    s.P = {0, 10, 30};
    s.f = {0.55, 0.95};
    const auto cells = enumerate_cells(s);
    std::set<std::uint64_t> seeds;
    for (const auto &c : cells)
        for (std::size_t t = 0; t < 30; ++t)
            seeds.insert(trial_seed(7, c, t));
    CHECK(seeds.size() == cells.size() * 30);

    SweepSpec reordered = s;
    std::reverse(reordered.P.begin(), reordered.P.end());
    std::reverse(reordered.f.begin(), reordered.f.end());
    for (const auto &c : enumerate_cells(reordered))
        CHECK(trial_seed(7, c, 3) == trial_seed(7, *std::find(cells.begin(), cells.end(), c), 3));
}

TEST_CASE("run_sweep writes one row per trial and replays byte for byte")
{
    const auto dir = scratch("replay");
    auto spec = small_spec(dir);
    spec.filter_mode = {FilterMode::None};
    const auto result = run_sweep(spec, 4);
    CHECK(result.trials.size() == 3);

    const auto table = read_csv_file((dir / "results.csv").string());
    CHECK(table.rows.size() == 3);
    CHECK(table.header == std::vector<std::string>{"regime", "filter_mode", "P", "tau", "b", "b_hat_flawed", "f",
                                                   "trial", "seed", "realized_fill_ratio", "h_K", "h_e", "H"});
    CHECK(read_csv_file((dir / "per_robot.csv").string()).rows.size() == 30);
    CHECK(read_text_file((dir / "manifest.json").string()).find("\"complete\"") != std::string::npos);

    const auto first = read_text_file((dir / "results.csv").string());
    run_sweep(spec, 1);
    CHECK(read_text_file((dir / "results.csv").string()) == first);
    fs::remove_all(dir);
}

TEST_CASE("parallel execution matches sequential execution")
{
    auto spec = small_spec(scratch("parallel"));
    spec.regime = {Regime::FullyConnected, Regime::Dynamic};
    const auto seq = execute_sweep(spec, 1);
    const auto par = execute_sweep(spec, 8);
    std::ostringstream a, b;
    write_csv(a, results_table(seq.trials));
    write_csv(b, results_table(par.trials));
    CHECK(a.str() == b.str());
    CHECK(seq.trials.size() == 4 * 3);
}

TEST_CASE("summary quartiles")
{
    std::vector<TrialResult> trials(3);
    const double hs[] = {70, 50, 60};
    for (int i = 0; i < 3; ++i)
    {
        trials[i].trial = static_cast<std::size_t>(i);
        trials[i].score.H = hs[i];
    }
    const auto summary = summarize(trials);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].trials == 3);
    CHECK(summary[0].H_median == 60.0);
    CHECK(summary[0].H_q1 == 55.0);
    CHECK(summary[0].H_q3 == 65.0);
}

TEST_CASE("export_plot_data")
{
    auto spec = small_spec(scratch("export"));
    spec.tau = {100, 50};
    const auto result = execute_sweep(spec, 2);
    const auto results = results_table(result.trials);

    const auto out = export_plot_data(results, {"P", "tau"});
    CHECK(out.header == std::vector<std::string>{"P", "tau", "trial", "h_K", "h_e", "H"});
    CHECK(out.rows.size() == results.rows.size());
    CHECK(out.rows.front()[1] == "50");
    CHECK(std::count_if(out.rows.begin(), out.rows.end(), [](const auto &r) { return r[1] == "100"; }) == 6);

    CsvTable empty;
    empty.header = results.header;
    const auto header_only = export_plot_data(empty, {"P"});
    CHECK(header_only.rows.empty());
    CHECK(header_only.header.size() == 5);

    CHECK_THROWS_AS(export_plot_data(results, {"colour"}), Error);
    CsvTable missing;
    missing.header = {"P", "tau"};
    CHECK_THROWS_AS(export_plot_data(missing, {"P"}), Error);
}

TEST_CASE("thirty trials give thirty rows per cell")
{
    auto spec = small_spec(scratch("thirty"));
    spec.filter_mode = {FilterMode::None};
    spec.trials_per_cell = 30;
    spec.k_max = 50;
    const auto out = export_plot_data(results_table(execute_sweep(spec, 4).trials), {"P", "tau"});
    CHECK(out.rows.size() == 30);
}

TEST_CASE("trial logs round-trip and re-score identically")
{
    TrialConfig cfg;
    cfg.k_max = 400;
    cfg.flawed_percent = 20;
    cfg.filter_mode = FilterMode::All;
    cfg.activation.tau = 50;
    cfg.seed = 3;
    const auto log = run_trial(cfg);

    std::ostringstream out;
    write_trial_log(out, log);
    const auto back = read_trial_log(out.str());
    CHECK(back.x == log.x);
    CHECK(back.x_hat == log.x_hat);
    CHECK(back.b_hat == log.b_hat);
    CHECK(back.flawed == log.flawed);
    CHECK(back.config.seed == 3);

    const MetricConfig m{0.01, 400, 0.45};
    const auto a = score_trial(log, m);
    const auto b = score_trial(back, m);
    CHECK(a.K == b.K);
    CHECK(a.H == b.H);

    CHECK_THROWS_AS(read_trial_log("step,x_0\n0,0.5\n"), ParseError);
    CHECK_THROWS_AS(read_trial_log("# num_robots=1\n# steps=2\nstep,x_0,x_hat_0,b_hat_0\n0,0.5,0.5,0.9\n"), ParseError);
}

TEST_CASE("failed sweeps leave an aborted manifest")
{
    const auto dir = scratch("abort");
    auto spec = small_spec(dir);
    spec.regime = {Regime::Dynamic};
    spec.arena_file = (dir / "does_not_exist.txt").string();
    CHECK_THROWS_AS(run_sweep(spec, 2), Error);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(read_text_file((dir / "manifest.json").string()).find("\"aborted\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("dynamic cells can use a loaded arena")
{
    const auto dir = scratch("arena");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "grid.txt");
        f << generate_arena(56, 0.448, kDefaultTileSide, 1).to_grid_text();
    }
    auto spec = small_spec(dir / "out");
    spec.regime = {Regime::Dynamic};
    spec.filter_mode = {FilterMode::None};
    spec.trials_per_cell = 1;
    spec.arena_file = (dir / "grid.txt").string();
    const auto result = execute_sweep(spec, 1);
    CHECK(result.trials.front().realized_fill_ratio == static_cast<double>(std::llround(0.448 * 56 * 56)) / (56 * 56));
    fs::remove_all(dir);
}
