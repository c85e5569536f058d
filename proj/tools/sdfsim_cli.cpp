#include "sdfsim/arena.hpp"
#include "sdfsim/error.hpp"
#include "sdfsim/io.hpp"
#include "sdfsim/metrics.hpp"
#include "sdfsim/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace sdfsim;

namespace {

void emit(const std::string &text, const std::string &out_path)
{
    if (out_path.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + out_path);
    out << text;
}

std::vector<std::string> split_keys(const std::string &text)
{
    std::vector<std::string> keys;
    std::stringstream ss(text);
    std::string key;
    while (std::getline(ss, key, ','))
        if (!key.empty())
            keys.push_back(key);
    return keys;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Collective perception swarm simulator with sensor degradation filtering"};
    app.require_subcommand(1);

    // run
    auto *run = app.add_subcommand("run", "Execute a parameter sweep described by a JSON config");
    std::string config_path;
    std::string output_override;
    std::string arena_override;
    std::size_t workers = 0;
    run->add_option("config", config_path, "Sweep configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output_override, "Override output_dir");
    run->add_option("--arena-file", arena_override, "Override arena_file for dynamic cells");
    run->add_option("-j,--workers", workers, "Worker threads (default: $SDFSIM_WORKERS or all cores)");

    // score
    auto *score = app.add_subcommand("score", "Re-score a stored trial log");
    std::string log_path;
    double truth = 0.0;
    MetricConfig metrics;
    score->add_option("triallog", log_path, "Trial log written with write_trial_logs")->required()->check(CLI::ExistingFile);
    score->add_option("--f", truth, "Ground-truth fill ratio")->required()->check(CLI::Range(0.0, 1.0));
    score->add_option("--delta", metrics.delta, "Settling threshold")->capture_default_str();
    score->add_option("--K-max", metrics.K_max, "Convergence normalizer")->capture_default_str();
    score->add_option("--e-max", metrics.e_max, "Error normalizer")->capture_default_str();

    // arena
    auto *arena = app.add_subcommand("arena", "Generate or inspect arenas");
    arena->require_subcommand(1);
    auto *gen = arena->add_subcommand("gen", "Generate an exact-count random arena");
    std::size_t tiles = 0;
    double fill = 0.0;
    double tile_side = kDefaultTileSide;
    std::uint64_t seed = 0;
    std::string arena_out;
    gen->add_option("--arena-tiles", tiles, "Tiles per side")->required()->check(CLI::PositiveNumber);
    gen->add_option("--fill-ratio", fill, "Target fill ratio")->required()->check(CLI::Range(0.0, 1.0));
    gen->add_option("--tile-side", tile_side, "Tile side in meters")->capture_default_str();
    gen->add_option("--seed", seed, "Random seed")->capture_default_str();
    gen->add_option("-o,--out", arena_out, "Write the grid here instead of stdout");

    auto *load = arena->add_subcommand("load", "Report the dimensions and fill ratio of a grid file");
    std::string arena_path;
    load->add_option("--arena-file,arena_file", arena_path, "Grid text file")->required()->check(CLI::ExistingFile);
    load->add_option("--tile-side", tile_side, "Tile side in meters")->capture_default_str();

    // export
    auto *exp = app.add_subcommand("export", "Long-format plotting table from a results table");
    std::string results_path;
    std::string by;
    std::string export_out;
    exp->add_option("results", results_path, "results.csv from a sweep")->required()->check(CLI::ExistingFile);
    exp->add_option("--by", by, "Comma-separated grouping keys, e.g. P,tau")->required();
    exp->add_option("-o,--out", export_out, "Write here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            auto parsed = parse_sweep(read_text_file(config_path));
            for (const auto &w : parsed.warnings)
                std::cerr << "warning: " << w << '\n';
            auto &spec = parsed.spec;
            if (!output_override.empty())
                spec.output_dir = output_override;
            if (!arena_override.empty())
                spec.arena_file = arena_override;
            const auto cells = enumerate_cells(spec);
            std::cerr << "running " << cells.size() << " cells x " << spec.trials_per_cell << " trials into "
                      << spec.output_dir << '\n';
            const auto result = run_sweep(spec, workers ? workers : default_worker_count());
            write_csv(std::cout, summary_table(result.summary));
        }
        else if (*score)
        {
            auto log = read_trial_log(read_text_file(log_path));
            log.realized_fill_ratio = truth;
            const auto report = score_trial(log, metrics);
            std::cout << "robot,K,e\n";
            for (std::size_t i = 0; i < report.K.size(); ++i)
                std::cout << i << ',' << report.K[i] << ',' << format_double(report.e[i]) << '\n';
            std::cout << "h_K=" << format_double(report.h_K) << " h_e=" << format_double(report.h_e)
                      << " H=" << format_double(report.H) << '\n';
        }
        else if (*gen)
        {
            const auto a = generate_arena(tiles, fill, tile_side, seed);
            emit(a.to_grid_text(), arena_out);
            std::cerr << a.width_tiles() << "x" << a.height_tiles() << " tiles, realized fill ratio "
                      << format_double(a.fill_ratio()) << '\n';
        }
        else if (*load)
        {
            const auto a = load_arena_file(arena_path, tile_side);
            std::cout << "width_tiles=" << a.width_tiles() << '\n'
                      << "height_tiles=" << a.height_tiles() << '\n'
                      << "tile_side=" << format_double(a.tile_side()) << '\n'
                      << "black_tiles=" << a.black_count() << '\n'
                      << "fill_ratio=" << format_double(a.fill_ratio()) << '\n';
        }
        else if (*exp)
        {
            const auto table = export_plot_data(read_csv_file(results_path), split_keys(by));
            std::ostringstream out;
            write_csv(out, table);
            emit(out.str(), export_out);
        }
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
