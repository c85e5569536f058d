#include "sdfsim/sweep.hpp"

#include "sdfsim/error.hpp"
#include "sdfsim/io.hpp"
#include "sdfsim/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace sdfsim {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad_type(const std::string &key, const char *expected)
{
    throw ParseError("key '" + key + "': expected " + expected);
}

double as_number(const json &v, const std::string &key)
{
    if (!v.is_number())
        bad_type(key, "a number");
    return v.get<double>();
}

std::uint64_t as_unsigned(const json &v, const std::string &key)
{
    if (!v.is_number_unsigned())
        bad_type(key, "a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string as_string(const json &v, const std::string &key)
{
    if (!v.is_string())
        bad_type(key, "a string");
    return v.get<std::string>();
}

// Axis values may be given as a single value or a non-empty list.
template <typename T, typename Convert>
std::vector<T> as_list(const json &v, const std::string &key, Convert convert)
{
    std::vector<T> out;
    if (v.is_array())
    {
        if (v.empty())
            bad_type(key, "a non-empty list");
        for (const auto &item : v)
            out.push_back(convert(item, key));
    }
    else
        out.push_back(convert(v, key));
    return out;
}

void require(bool ok, const std::string &key, const std::string &what)
{
    if (!ok)
        throw ParseError("key '" + key + "': " + what);
}

bool in_band(double p) { return p >= kMinAssumedAccuracy && p <= kMaxAssumedAccuracy; }

} // namespace

std::size_t SweepSpec::robots_for(Regime r) const
{
    if (num_robots)
        return *num_robots;
    return r == Regime::FullyConnected ? 10 : 20;
}

ParsedSweep parse_sweep(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError(std::string("malformed sweep document: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("sweep document must be a JSON object");

    ParsedSweep parsed;
    SweepSpec &s = parsed.spec;

    for (const auto &[key, v] : doc.items())
    {
        if (key == "regime")
            s.regime = as_list<Regime>(v, key, [](const json &j, const std::string &k) {
                try
                {
                    return parse_regime(as_string(j, k));
                }
                catch (const ConfigError &e)
                {
                    throw ParseError("key '" + k + "': " + e.what());
                }
            });
        else if (key == "filter_mode")
            s.filter_mode = as_list<FilterMode>(v, key, [](const json &j, const std::string &k) {
                try
                {
                    return parse_filter_mode(as_string(j, k));
                }
                catch (const ConfigError &e)
                {
                    throw ParseError("key '" + k + "': " + e.what());
                }
            });
        else if (key == "P")
            s.P = as_list<double>(v, key, as_number);
        else if (key == "tau")
            s.tau = as_list<std::uint64_t>(v, key, as_unsigned);
        else if (key == "b")
            s.b = as_list<double>(v, key, as_number);
        else if (key == "b_hat_flawed")
            s.b_hat_flawed = as_list<double>(v, key, as_number);
        else if (key == "f")
            s.f = as_list<double>(v, key, as_number);
        else if (key == "trials_per_cell")
            s.trials_per_cell = as_unsigned(v, key);
        else if (key == "base_seed")
            s.base_seed = as_unsigned(v, key);
        else if (key == "output_dir")
            s.output_dir = as_string(v, key);
        else if (key == "k_max")
            s.k_max = as_unsigned(v, key);
        else if (key == "delta")
            s.metrics.delta = as_number(v, key);
        else if (key == "K_max")
            s.metrics.K_max = as_number(v, key);
        else if (key == "e_max")
            s.metrics.e_max = as_number(v, key);
        else if (key == "omega")
            s.omega = as_number(v, key);
        else if (key == "min_neighbors")
            s.min_neighbors = as_unsigned(v, key);
        else if (key == "num_robots")
            s.num_robots = as_unsigned(v, key);
        else if (key == "density")
            s.density = as_number(v, key);
        else if (key == "comm_range")
            s.comm_range = as_number(v, key);
        else if (key == "speed")
            s.motion.speed = as_number(v, key);
        else if (key == "dt")
            s.motion.dt = as_number(v, key);
        else if (key == "tile_side")
            s.tile_side = as_number(v, key);
        else if (key == "arena_file")
            s.arena_file = as_string(v, key);
        else if (key == "write_trial_logs")
        {
            if (!v.is_boolean())
                bad_type(key, "a boolean");
            s.write_trial_logs = v.get<bool>();
        }
        else
            throw ParseError("unknown key '" + key + "'");
    }

    for (double p : s.P)
        require(p >= 0.0 && p <= 100.0, "P", "values must lie in [0, 100]");
    for (auto t : s.tau)
        require(t >= 1, "tau", "values must be at least 1");
    for (double b : s.b)
        require(in_band(b), "b", "values must lie in [0.501, 0.999]");
    for (double b : s.b_hat_flawed)
        require(in_band(b), "b_hat_flawed", "values must lie in [0.501, 0.999]");
    for (double f : s.f)
        require(f >= 0.0 && f <= 1.0, "f", "values must lie in [0, 1]");
    require(s.trials_per_cell >= 1, "trials_per_cell", "must be at least 1");
    require(s.k_max >= 1, "k_max", "must be at least 1");
    require(s.metrics.delta > 0.0, "delta", "must be positive");
    require(s.metrics.e_max > 0.0, "e_max", "must be positive");
    require(s.metrics.K_max >= static_cast<double>(s.k_max - 1) && s.metrics.K_max > 0.0, "K_max",
            "must be positive and at least k_max - 1");
    require(s.omega > 0.0 && s.omega < 1.0, "omega", "must lie in (0, 1)");
    require(s.min_neighbors >= 2, "min_neighbors", "must be at least 2");
    if (s.num_robots)
        require(*s.num_robots >= 1, "num_robots", "must be at least 1");
    require(s.density > 0.0, "density", "must be positive");
    require(s.comm_range > 0.0, "comm_range", "must be positive");
    require(s.motion.speed > 0.0, "speed", "must be positive");
    require(s.motion.dt > 0.0, "dt", "must be positive");
    require(s.tile_side > 0.0, "tile_side", "must be positive");

    std::set<std::size_t> robot_counts;
    for (auto r : s.regime)
        robot_counts.insert(s.robots_for(r));
    for (double p : s.P)
        for (auto n : robot_counts)
        {
            const double exact = p * static_cast<double>(n) / 100.0;
            if (std::fabs(exact - std::round(exact)) > 1e-9)
                parsed.warnings.push_back("P=" + format_double(p) + " with N=" + std::to_string(n) + " gives " +
                                          format_double(exact) + " flawed robots; using " +
                                          std::to_string(flawed_count(n, p)));
        }

    return parsed;
}

std::string Cell::key() const
{
    return "regime=" + to_string(regime) + ";filter_mode=" + to_string(filter_mode) + ";P=" + format_double(P) +
           ";tau=" + std::to_string(tau) + ";b=" + format_double(b) + ";b_hat_flawed=" + format_double(b_hat_flawed) +
           ";f=" + format_double(f);
}

std::size_t raw_cell_count(const SweepSpec &s)
{
    return s.regime.size() * s.filter_mode.size() * s.P.size() * s.tau.size() * s.b.size() *
           s.b_hat_flawed.size() * s.f.size();
}

std::vector<Cell> enumerate_cells(const SweepSpec &s)
{
    std::vector<Cell> cells;
    std::set<std::string> seen;
    for (auto regime : s.regime)
        for (auto mode : s.filter_mode)
            for (double P : s.P)
                for (auto tau : s.tau)
                    for (double b : s.b)
                        for (double b_hat : s.b_hat_flawed)
                            for (double f : s.f)
                            {
                                if (P > 0.0 && b_hat == b)
                                    continue;
                                Cell cell{regime, mode, P, tau, b, P > 0.0 ? b_hat : b, f};
                                if (seen.insert(cell.key()).second)
                                    cells.push_back(cell);
                            }
    return cells;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const Cell &cell, std::size_t trial)
{
    return derive_seed(base_seed, fnv1a(cell.key()), trial);
}

TrialConfig make_trial_config(const SweepSpec &s, const Cell &cell, std::uint64_t seed)
{
    TrialConfig cfg;
    cfg.regime = cell.regime;
    cfg.num_robots = s.robots_for(cell.regime);
    cfg.k_max = s.k_max;
    cfg.fill_ratio = cell.f;
    cfg.true_accuracy = cell.b;
    cfg.flawed_accuracy = cell.b_hat_flawed;
    cfg.flawed_percent = cell.P;
    cfg.filter_mode = cell.filter_mode;
    cfg.activation.omega = s.omega;
    cfg.activation.tau = cell.tau;
    cfg.activation.min_neighbors = s.min_neighbors;
    if (cell.regime == Regime::Dynamic)
    {
        cfg.density = s.density;
        cfg.comm_range = s.comm_range;
        cfg.motion = s.motion;
        cfg.tile_side = s.tile_side;
    }
    cfg.seed = seed;
    return cfg;
}

std::size_t default_worker_count()
{
    if (const char *env = std::getenv("SDFSIM_WORKERS"))
    {
        char *end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0)
            return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Job
{
    std::size_t cell_index;
    std::size_t trial;
};

// Runs jobs on a worker pool. Results land in job order; on the first failure
// no further jobs start and the error is returned alongside what finished.
struct Execution
{
    std::vector<std::optional<TrialResult>> results;
    std::exception_ptr error;
};

Execution execute(const SweepSpec &spec, const std::vector<Cell> &cells, std::size_t workers,
                  const std::optional<fs::path> &log_dir)
{
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t t = 0; t < spec.trials_per_cell; ++t)
            jobs.push_back({c, t});

    Execution out;
    out.results.resize(jobs.size());

    std::optional<Arena> arena;
    try
    {
        if (spec.arena_file)
            arena.emplace(load_arena_file(*spec.arena_file, spec.tile_side));
    }
    catch (...)
    {
        out.error = std::current_exception();
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load())
        {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size())
                return;
            try
            {
                const auto &cell = cells[jobs[j].cell_index];
                const auto seed = trial_seed(spec.base_seed, cell, jobs[j].trial);
                const auto cfg = make_trial_config(spec, cell, seed);
                const auto log = (arena && cell.regime == Regime::Dynamic) ? run_trial(cfg, *arena) : run_trial(cfg);

                if (log_dir)
                {
                    const auto path = *log_dir / ("cell" + std::to_string(jobs[j].cell_index) + "_trial" +
                                                  std::to_string(jobs[j].trial) + ".csv");
                    std::ofstream f(path, std::ios::binary);
                    write_trial_log(f, log);
                    if (!f)
                        throw Error("failed writing trial log " + path.string());
                }

                out.results[j] = TrialResult{cell, jobs[j].trial, seed, log.realized_fill_ratio,
                                             score_trial(log, spec.metrics)};
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!out.error)
                    out.error = std::current_exception();
                failed.store(true);
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
    if (workers == 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }
    return out;
}

std::vector<TrialResult> completed(const Execution &exec)
{
    std::vector<TrialResult> out;
    for (const auto &r : exec.results)
        if (r)
            out.push_back(*r);
    return out;
}

std::vector<std::string> cell_fields(const Cell &c)
{
    return {to_string(c.regime), to_string(c.filter_mode), format_double(c.P), std::to_string(c.tau),
            format_double(c.b),  format_double(c.b_hat_flawed), format_double(c.f)};
}

const std::vector<std::string> kCellColumns{"regime", "filter_mode", "P", "tau", "b", "b_hat_flawed", "f"};

// Numeric fields compare as numbers, anything else as text.
int compare_fields(const std::string &a, const std::string &b)
{
    char *ea = nullptr;
    char *eb = nullptr;
    const double da = std::strtod(a.c_str(), &ea);
    const double db = std::strtod(b.c_str(), &eb);
    if (!a.empty() && !b.empty() && *ea == '\0' && *eb == '\0')
        return da < db ? -1 : (db < da ? 1 : 0);
    return a.compare(b);
}

void write_file(const fs::path &path, const CsvTable &table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    write_csv(out, table);
    if (!out)
        throw Error("failed writing " + path.string());
}

void write_manifest(const fs::path &dir, const std::string &status, std::size_t done, std::size_t total,
                    const std::string &error)
{
    json m;
    m["status"] = status;
    m["trials_completed"] = done;
    m["trials_total"] = total;
    m["files"] = {"results.csv", "per_robot.csv", "summary.csv"};
    if (!error.empty())
        m["error"] = error;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
}

} // namespace

std::vector<CellSummary> summarize(const std::vector<TrialResult> &trials)
{
    std::vector<CellSummary> out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<double>> hs;
    for (const auto &t : trials)
    {
        auto [it, inserted] = index.emplace(t.cell.key(), out.size());
        if (inserted)
        {
            out.push_back({t.cell, 0, 0.0, 0.0, 0.0});
            hs.emplace_back();
        }
        hs[it->second].push_back(t.score.H);
    }
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i].trials = hs[i].size();
        out[i].H_q1 = quantile(hs[i], 0.25);
        out[i].H_median = quantile(hs[i], 0.5);
        out[i].H_q3 = quantile(hs[i], 0.75);
    }
    return out;
}

CsvTable results_table(const std::vector<TrialResult> &trials)
{
    CsvTable t;
    t.header = kCellColumns;
    for (const char *c : {"trial", "seed", "realized_fill_ratio", "h_K", "h_e", "H"})
        t.header.emplace_back(c);
    for (const auto &r : trials)
    {
        auto row = cell_fields(r.cell);
        row.push_back(std::to_string(r.trial));
        row.push_back(std::to_string(r.seed));
        row.push_back(format_double(r.realized_fill_ratio));
        row.push_back(format_double(r.score.h_K));
        row.push_back(format_double(r.score.h_e));
        row.push_back(format_double(r.score.H));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable per_robot_table(const std::vector<TrialResult> &trials)
{
    CsvTable t;
    t.header = kCellColumns;
    for (const char *c : {"trial", "robot", "K", "e"})
        t.header.emplace_back(c);
    for (const auto &r : trials)
        for (std::size_t i = 0; i < r.score.K.size(); ++i)
        {
            auto row = cell_fields(r.cell);
            row.push_back(std::to_string(r.trial));
            row.push_back(std::to_string(i));
            row.push_back(std::to_string(r.score.K[i]));
            row.push_back(format_double(r.score.e[i]));
            t.rows.push_back(std::move(row));
        }
    return t;
}

CsvTable summary_table(const std::vector<CellSummary> &summary)
{
    CsvTable t;
    t.header = kCellColumns;
    for (const char *c : {"trials", "H_q1", "H_median", "H_q3"})
        t.header.emplace_back(c);
    for (const auto &s : summary)
    {
        auto row = cell_fields(s.cell);
        row.push_back(std::to_string(s.trials));
        row.push_back(format_double(s.H_q1));
        row.push_back(format_double(s.H_median));
        row.push_back(format_double(s.H_q3));
        t.rows.push_back(std::move(row));
    }
    return t;
}

SweepResult execute_sweep(const SweepSpec &spec, std::size_t workers)
{
    const auto cells = enumerate_cells(spec);
    auto exec = execute(spec, cells, workers, std::nullopt);
    if (exec.error)
        std::rethrow_exception(exec.error);
    SweepResult result;
    result.trials = completed(exec);
    result.summary = summarize(result.trials);
    return result;
}

SweepResult run_sweep(const SweepSpec &spec, std::size_t workers)
{
    const fs::path dir(spec.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    std::optional<fs::path> log_dir;
    if (spec.write_trial_logs)
    {
        log_dir = dir / "logs";
        fs::create_directories(*log_dir, ec);
        if (ec)
            throw Error("cannot create log directory " + log_dir->string() + ": " + ec.message());
    }

    const auto cells = enumerate_cells(spec);
    const std::size_t total = cells.size() * spec.trials_per_cell;
    auto exec = execute(spec, cells, workers, log_dir);

    SweepResult result;
    result.trials = completed(exec);
    result.summary = summarize(result.trials);

    try
    {
        write_file(dir / "results.csv", results_table(result.trials));
        write_file(dir / "per_robot.csv", per_robot_table(result.trials));
        write_file(dir / "summary.csv", summary_table(result.summary));
    }
    catch (const std::exception &e)
    {
        write_manifest(dir, "aborted", result.trials.size(), total, e.what());
        throw;
    }

    if (exec.error)
    {
        std::string what = "unknown error";
        try
        {
            std::rethrow_exception(exec.error);
        }
        catch (const std::exception &e)
        {
            what = e.what();
        }
        catch (...)
        {
        }
        write_manifest(dir, "aborted", result.trials.size(), total, what);
        std::rethrow_exception(exec.error);
    }

    write_manifest(dir, "complete", result.trials.size(), total, "");
    return result;
}

CsvTable export_plot_data(const CsvTable &results, const std::vector<std::string> &keys)
{
    std::vector<std::string> columns = keys;
    for (const char *c : {"trial", "h_K", "h_e", "H"})
        if (std::find(columns.begin(), columns.end(), c) == columns.end())
            columns.emplace_back(c);

    std::vector<std::size_t> index;
    for (const auto &c : columns)
    {
        if (!results.has_column(c))
            throw Error("export: results table has no column '" + c + "'");
        index.push_back(results.column(c));
    }

    CsvTable out;
    out.header = columns;
    for (const auto &row : results.rows)
    {
        std::vector<std::string> r;
        for (auto i : index)
            r.push_back(row[i]);
        out.rows.push_back(std::move(r));
    }
    // Group rows by the key columns; stable keeps trial order within a group.
    const std::size_t nkeys = keys.size();
    std::stable_sort(out.rows.begin(), out.rows.end(), [nkeys](const auto &a, const auto &b) {
        for (std::size_t i = 0; i < nkeys; ++i)
        {
            const auto c = compare_fields(a[i], b[i]);
            if (c != 0)
                return c < 0;
        }
        return false;
    });
    return out;
}

} // namespace sdfsim
