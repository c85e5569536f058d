#pragma once

#include "sdfsim/io.hpp"
#include "sdfsim/metrics.hpp"
#include "sdfsim/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdfsim {

/// A parameter sweep: the Cartesian product of the axis lists, M trials per cell.
struct SweepSpec
{
    std::vector<Regime> regime{Regime::FullyConnected};
    std::vector<FilterMode> filter_mode{FilterMode::None};
    std::vector<double> P{0.0};
    std::vector<std::uint64_t> tau{1000};
    std::vector<double> b{0.95};
    std::vector<double> b_hat_flawed{0.55};
    std::vector<double> f{0.55};

    std::size_t trials_per_cell = 30;
    std::uint64_t base_seed = 0;
    std::string output_dir = "results";
    std::uint64_t k_max = 40000;
    MetricConfig metrics;
    double omega = 0.05;
    std::size_t min_neighbors = 2;

    // Robot count; unset means 10 for fully connected cells and 20 for dynamic ones.
    std::optional<std::size_t> num_robots;
    double density = 1.0;
    double comm_range = 0.7;
    MotionConfig motion;
    double tile_side = kDefaultTileSide;
    std::optional<std::string> arena_file;
    bool write_trial_logs = false;

    std::size_t robots_for(Regime regime) const;
};

struct ParsedSweep
{
    SweepSpec spec;
    std::vector<std::string> warnings;
};

/// Parses a JSON sweep document. Unknown keys and type mismatches throw ParseError naming the key.
ParsedSweep parse_sweep(std::string_view config_text);

/// One point of the sweep grid.
struct Cell
{
    Regime regime = Regime::FullyConnected;
    FilterMode filter_mode = FilterMode::None;
    double P = 0.0;
    std::uint64_t tau = 1000;
    double b = 0.95;
    double b_hat_flawed = 0.95;
    double f = 0.55;

    /// Canonical text identity, stable under reordering of the axis lists.
    std::string key() const;

    bool operator==(const Cell &) const = default;
};

/// Size of the raw Cartesian product, before skipping and collapsing.
std::size_t raw_cell_count(const SweepSpec &spec);

/**
 * Cells that actually run: with P > 0, cells whose flawed accuracy equals the
 * true accuracy are skipped; with P = 0 the flawed-accuracy axis collapses to
 * a single cell with b_hat_flawed = b.
 */
std::vector<Cell> enumerate_cells(const SweepSpec &spec);

/// Pure function of (base seed, cell identity, trial index).
std::uint64_t trial_seed(std::uint64_t base_seed, const Cell &cell, std::size_t trial);

TrialConfig make_trial_config(const SweepSpec &spec, const Cell &cell, std::uint64_t seed);

struct TrialResult
{
    Cell cell;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double realized_fill_ratio = 0.0;
    ScoreReport score;
};

struct CellSummary
{
    Cell cell;
    std::size_t trials = 0;
    double H_q1 = 0.0;
    double H_median = 0.0;
    double H_q3 = 0.0;
};

struct SweepResult
{
    std::vector<TrialResult> trials; // ordered by (cell index, trial)
    std::vector<CellSummary> summary;
};

/// Worker count: the SDFSIM_WORKERS environment variable, else the hardware concurrency.
std::size_t default_worker_count();

/// Runs every trial (in parallel) without touching the filesystem.
SweepResult execute_sweep(const SweepSpec &spec, std::size_t workers = default_worker_count());

/**
 * Runs the sweep and writes results.csv, per_robot.csv, summary.csv and
 * manifest.json under spec.output_dir (plus logs/ when trial logs are on).
 * On failure the manifest records status "aborted" with the error, and the
 * exception is rethrown.
 */
SweepResult run_sweep(const SweepSpec &spec, std::size_t workers = default_worker_count());

std::vector<CellSummary> summarize(const std::vector<TrialResult> &trials);

CsvTable results_table(const std::vector<TrialResult> &trials);
CsvTable per_robot_table(const std::vector<TrialResult> &trials);
CsvTable summary_table(const std::vector<CellSummary> &summary);

/// Long-format plotting table: the grouping keys, trial, h_K, h_e and H, sorted by the keys.
CsvTable export_plot_data(const CsvTable &results, const std::vector<std::string> &keys);

} // namespace sdfsim
