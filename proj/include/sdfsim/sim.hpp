#pragma once

#include "sdfsim/arena.hpp"
#include "sdfsim/estimation.hpp"
#include "sdfsim/filter.hpp"
#include "sdfsim/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdfsim {

enum class Regime
{
    FullyConnected,
    Dynamic,
};

enum class FilterMode
{
    None,
    OnlyFlawed, // ASDF-: only robots that start with a flawed assumed accuracy
    All,        // ASDF+: every robot
};

std::string to_string(Regime regime);
std::string to_string(FilterMode mode);
Regime parse_regime(std::string_view text);
FilterMode parse_filter_mode(std::string_view text);

/// Kinematic diffusion parameters for the dynamic regime.
struct MotionConfig
{
    double speed = 0.14;         // m/s
    double dt = 1.0;             // s per step
    double body_radius = 0.07;   // m
    double heading_noise = 0.1;  // rad, uniform half-width per step

    bool operator==(const MotionConfig &) const = default;
};

struct TrialConfig
{
    Regime regime = Regime::FullyConnected;
    std::size_t num_robots = 10;
    std::uint64_t k_max = 40000;
    double fill_ratio = 0.55;       // target f
    double true_accuracy = 0.95;    // b (= w)
    double flawed_accuracy = 0.55;  // b_hat of flawed robots
    double flawed_percent = 0.0;    // P, in [0, 100]
    FilterMode filter_mode = FilterMode::None;
    ActivationConfig activation;

    // Dynamic regime only.
    double density = 1.0;
    std::optional<double> comm_range;
    MotionConfig motion;
    double tile_side = kDefaultTileSide;

    std::uint64_t seed = 0;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    /// Side L of the square arena giving density D = N pi r^2 / L^2.
    double arena_side_meters() const;

    bool operator==(const TrialConfig &) const = default;
};

struct RobotState
{
    std::size_t id = 0;
    Point position;
    double heading = 0.0;
    ObservationTally tally;
    SensorAccuracy accuracy;
    EstimateBundle bundle;
    bool is_flawed = false;
    bool runs_filter = false;
    std::uint64_t steps_since_filter = 0;
};

/// Per-robot time series over a trial, stored robot-major.
struct TrialLog
{
    TrialConfig config;
    std::size_t num_robots = 0;
    std::size_t steps = 0;
    double realized_fill_ratio = 0.0;
    std::vector<bool> flawed;
    std::vector<ObservationTally> final_tallies;
    std::vector<double> x;
    std::vector<double> x_hat;
    std::vector<double> b_hat;

    std::span<const double> informed(std::size_t robot) const { return row(x, robot); }
    std::span<const double> local(std::size_t robot) const { return row(x_hat, robot); }
    std::span<const double> assumed_accuracy(std::size_t robot) const { return row(b_hat, robot); }

    bool operator==(const TrialLog &) const = default;

private:
    std::span<const double> row(const std::vector<double> &v, std::size_t robot) const
    {
        return std::span<const double>(v).subspan(robot * steps, steps);
    }
};

/// Adjacency lists: i and j are neighbors iff i != j and their distance is <= comm_range.
std::vector<std::vector<std::size_t>> neighbors_of(std::span<const Point> positions, double comm_range);

/**
 * Advance one robot by one step. It moves speed * dt along its heading unless
 * that would leave the arena or bring it within two body radii of another
 * robot; in that case it stays put and turns by a uniform angle in
 * [pi/2, 3pi/2). The heading then receives uniform noise.
 *
 * `positions` holds every robot's position, indexed by id; the robot's own entry is ignored.
 */
void diffuse_step(RobotState &robot, const Arena &arena, std::span<const Point> positions,
                  const MotionConfig &motion, RandomStream &rng);

std::size_t flawed_count(std::size_t num_robots, double percent);

/// Exactly flawed_count(N, P) robots flagged, chosen by a seeded shuffle.
std::vector<bool> assign_flawed(std::size_t num_robots, double percent, std::uint64_t seed);

/// Arena used for a dynamic trial when none is supplied.
Arena default_arena(const TrialConfig &config);

/**
 * Synchronous-round swarm simulation. Each step every robot moves (dynamic
 * regime), observes once, recomputes its local values, exchanges them with
 * its current neighbors, fuses, and optionally runs the sensor degradation
 * filter.
 */
class Simulation
{
public:
    explicit Simulation(const TrialConfig &config);
    Simulation(const TrialConfig &config, Arena arena);

    void step();

    std::uint64_t steps_taken() const noexcept { return steps_taken_; }
    const std::vector<RobotState> &robots() const noexcept { return robots_; }
    const TrialConfig &config() const noexcept { return config_; }
    const std::optional<Arena> &arena() const noexcept { return arena_; }
    double ground_truth() const noexcept;

    /// Neighbor lists used in the most recent step.
    const std::vector<std::vector<std::size_t>> &last_neighbors() const noexcept { return neighbors_; }

private:
    void init();
    void place_robots();
    void update_neighbors();

    TrialConfig config_;
    std::optional<Arena> arena_;
    std::optional<TQuantileTable> quantiles_;
    std::vector<RobotState> robots_;
    std::vector<RandomStream> streams_;
    std::vector<Point> positions_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::uint64_t steps_taken_ = 0;
};

TrialLog run_trial(const TrialConfig &config);
TrialLog run_trial(const TrialConfig &config, const Arena &arena);

} // namespace sdfsim
