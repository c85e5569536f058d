#include "sdfsim/sim.hpp"

#include "sdfsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdfsim {

namespace {

constexpr int kPlacementAttempts = 100000;

double wrap_angle(double a)
{
    a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a < 0.0)
        a += 2.0 * std::numbers::pi;
    return a - std::numbers::pi;
}

double squared_distance(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace

std::string to_string(Regime regime)
{
    return regime == Regime::FullyConnected ? "fully_connected" : "dynamic";
}

std::string to_string(FilterMode mode)
{
    switch (mode)
    {
    case FilterMode::None:
        return "none";
    case FilterMode::OnlyFlawed:
        return "only_flawed";
    case FilterMode::All:
        return "all";
    }
    return "none";
}

Regime parse_regime(std::string_view text)
{
    if (text == "fully_connected")
        return Regime::FullyConnected;
    if (text == "dynamic")
        return Regime::Dynamic;
    throw ConfigError("unknown regime '" + std::string(text) + "' (expected fully_connected or dynamic)");
}

FilterMode parse_filter_mode(std::string_view text)
{
    if (text == "none")
        return FilterMode::None;
    if (text == "only_flawed" || text == "asdf-")
        return FilterMode::OnlyFlawed;
    if (text == "all" || text == "asdf+")
        return FilterMode::All;
    throw ConfigError("unknown filter mode '" + std::string(text) + "' (expected none, only_flawed or all)");
}

void TrialConfig::validate() const
{
    if (num_robots == 0)
        throw ConfigError("num_robots must be at least 1");
    if (k_max == 0)
        throw ConfigError("k_max must be at least 1");
    if (!(fill_ratio >= 0.0 && fill_ratio <= 1.0))
        throw ConfigError("fill ratio must lie in [0, 1]");
    if (!(flawed_percent >= 0.0 && flawed_percent <= 100.0))
        throw ConfigError("flawed percentage must lie in [0, 100]");
    try
    {
        SensorAccuracy::symmetric(true_accuracy, true_accuracy);
        SensorAccuracy::symmetric(true_accuracy, flawed_accuracy);
        if (filter_mode != FilterMode::None)
            activation.validate();
    }
    catch (const DomainError &e)
    {
        throw ConfigError(e.what());
    }

    if (regime == Regime::Dynamic)
    {
        if (!comm_range || !(*comm_range > 0.0))
            throw ConfigError("dynamic regime needs a positive comm_range");
        if (!(density > 0.0))
            throw ConfigError("dynamic regime needs a positive density");
        if (!(motion.speed > 0.0) || !(motion.dt > 0.0) || !(motion.body_radius > 0.0) ||
            !(motion.heading_noise >= 0.0))
            throw ConfigError("motion parameters must be positive");
        if (!(tile_side > 0.0))
            throw ConfigError("tile side must be positive");
    }
}

double TrialConfig::arena_side_meters() const
{
    if (!comm_range)
        throw ConfigError("arena side is derived from comm_range, which is unset");
    const double r = *comm_range;
    return std::sqrt(static_cast<double>(num_robots) * std::numbers::pi * r * r / density);
}

std::vector<std::vector<std::size_t>> neighbors_of(std::span<const Point> positions, double comm_range)
{
    const double r2 = comm_range * comm_range;
    std::vector<std::vector<std::size_t>> adj(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if (squared_distance(positions[i], positions[j]) <= r2)
            {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    for (auto &list : adj)
        std::sort(list.begin(), list.end());
    return adj;
}

void diffuse_step(RobotState &robot, const Arena &arena, std::span<const Point> positions,
                  const MotionConfig &motion, RandomStream &rng)
{
    const double stride = motion.speed * motion.dt;
    const Point next{robot.position.x + stride * std::cos(robot.heading),
                     robot.position.y + stride * std::sin(robot.heading)};

    bool blocked = !arena.contains(next);
    const double clearance2 = 4.0 * motion.body_radius * motion.body_radius;
    for (std::size_t j = 0; !blocked && j < positions.size(); ++j)
        if (j != robot.id && squared_distance(next, positions[j]) < clearance2)
            blocked = true;

    if (blocked)
        robot.heading += rng.uniform(0.5 * std::numbers::pi, 1.5 * std::numbers::pi);
    else
        robot.position = next;

    robot.heading = wrap_angle(robot.heading + rng.uniform(-motion.heading_noise, motion.heading_noise));
}

std::size_t flawed_count(std::size_t num_robots, double percent)
{
    return static_cast<std::size_t>(std::llround(percent * static_cast<double>(num_robots) / 100.0));
}

std::vector<bool> assign_flawed(std::size_t num_robots, double percent, std::uint64_t seed)
{
    if (!(percent >= 0.0 && percent <= 100.0))
        throw DomainError("flawed percentage must lie in [0, 100]");
    std::vector<std::size_t> order(num_robots);
    for (std::size_t i = 0; i < num_robots; ++i)
        order[i] = i;
    RandomStream rng(seed, StreamTag::FlawedAssignment);
    shuffle(order.begin(), order.end(), rng);

    std::vector<bool> flawed(num_robots, false);
    const std::size_t count = flawed_count(num_robots, percent);
    for (std::size_t i = 0; i < count; ++i)
        flawed[order[i]] = true;
    return flawed;
}

Arena default_arena(const TrialConfig &config)
{
    const double side = config.arena_side_meters();
    const auto tiles = static_cast<std::size_t>(std::max<long long>(1, std::llround(side / config.tile_side)));
    return generate_arena(tiles, config.fill_ratio, config.tile_side, config.seed);
}

Simulation::Simulation(const TrialConfig &config) : config_(config)
{
    config_.validate();
    if (config_.regime == Regime::Dynamic)
        arena_.emplace(default_arena(config_));
    init();
}

Simulation::Simulation(const TrialConfig &config, Arena arena) : config_(config)
{
    config_.validate();
    if (config_.regime != Regime::Dynamic)
        throw ConfigError("an arena only applies to the dynamic regime");
    arena_.emplace(std::move(arena));
    init();
}

void Simulation::init()
{
    const std::size_t n = config_.num_robots;
    if (config_.filter_mode != FilterMode::None)
        quantiles_.emplace(config_.activation.omega, n > 1 ? n - 1 : 1);

    const auto flawed = assign_flawed(n, config_.flawed_percent, config_.seed);
    robots_.resize(n);
    streams_.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &robot = robots_[i];
        robot.id = i;
        robot.is_flawed = flawed[i];
        robot.accuracy = SensorAccuracy::symmetric(config_.true_accuracy,
                                                   flawed[i] ? config_.flawed_accuracy : config_.true_accuracy);
        robot.runs_filter = config_.filter_mode == FilterMode::All ||
                            (config_.filter_mode == FilterMode::OnlyFlawed && robot.is_flawed);
        streams_.emplace_back(config_.seed, StreamTag::Robot, i);
    }

    if (arena_)
        place_robots();
}

double Simulation::ground_truth() const noexcept
{
    return arena_ ? arena_->fill_ratio() : config_.fill_ratio;
}

void Simulation::place_robots()
{
    RandomStream rng(config_.seed, StreamTag::Placement);
    const double min_sep2 = 4.0 * config_.motion.body_radius * config_.motion.body_radius;
    positions_.clear();
    for (auto &robot : robots_)
    {
        int attempt = 0;
        Point p;
        for (; attempt < kPlacementAttempts; ++attempt)
        {
            p = {rng.uniform(0.0, arena_->width_meters()), rng.uniform(0.0, arena_->height_meters())};
            const bool clear = std::all_of(positions_.begin(), positions_.end(),
                                           [&](Point q) { return squared_distance(p, q) >= min_sep2; });
            if (clear)
                break;
        }
        if (attempt == kPlacementAttempts)
            throw ConfigError("could not place robots without overlap; arena too small");
        robot.position = p;
        robot.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
        positions_.push_back(p);
    }
}

void Simulation::update_neighbors()
{
    const std::size_t n = robots_.size();
    if (config_.regime == Regime::Dynamic)
    {
        neighbors_ = neighbors_of(positions_, *config_.comm_range);
        return;
    }
    if (neighbors_.size() == n)
        return;
    neighbors_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                neighbors_[i].push_back(j);
}

void Simulation::step()
{
    const std::size_t n = robots_.size();

    if (arena_)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            diffuse_step(robots_[i], *arena_, positions_, config_.motion, streams_[i]);
            positions_[i] = robots_[i].position;
        }
    }

    std::vector<WeightedEstimate> local(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &robot = robots_[i];
        auto &rng = streams_[i];
        TileColor color;
        if (arena_)
            color = arena_->color_at(robot.position);
        else
            color = rng.bernoulli(config_.fill_ratio) ? TileColor::Black : TileColor::White;
        robot.tally.record(observe(color, robot.accuracy, rng.uniform()));

        local[i] = local_values(robot.tally, robot.accuracy.b_hat, robot.accuracy.w_hat);
        robot.bundle.x_hat = local[i].estimate;
        robot.bundle.alpha = local[i].confidence;
    }

    update_neighbors();

    std::vector<WeightedEstimate> inbox;
    std::vector<double> neighbor_estimates;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &robot = robots_[i];
        inbox.clear();
        for (auto j : neighbors_[i])
            inbox.push_back(local[j]);

        const auto social = social_fuse(inbox);
        robot.bundle.x_bar = social ? std::optional<double>(social->estimate) : std::nullopt;
        robot.bundle.beta = social ? social->confidence : 0.0;
        robot.bundle.x = informed_fuse(robot.bundle.x_hat, robot.bundle.alpha, robot.bundle.x_bar, robot.bundle.beta);

        if (!robot.runs_filter)
            continue;

        // Eligible every tau steps; an undersized neighborhood defers the test.
        ++robot.steps_since_filter;
        if (robot.steps_since_filter < config_.activation.tau || inbox.size() < config_.activation.min_neighbors)
            continue;

        neighbor_estimates.clear();
        for (const auto &msg : inbox)
            neighbor_estimates.push_back(msg.estimate);
        if (should_activate(robot.bundle.x_hat, neighbor_estimates, *quantiles_).value_or(false))
        {
            if (auto updated = update_assumed_accuracy(robot.tally, *robot.bundle.x_bar))
            {
                robot.accuracy.b_hat = *updated;
                robot.accuracy.w_hat = *updated;
            }
        }
        robot.steps_since_filter = 0;
    }

    ++steps_taken_;
}

namespace {

TrialLog record(Simulation &sim)
{
    const auto &cfg = sim.config();
    TrialLog log;
    log.config = cfg;
    log.num_robots = cfg.num_robots;
    log.steps = static_cast<std::size_t>(cfg.k_max);
    log.realized_fill_ratio = sim.ground_truth();
    const std::size_t total = log.num_robots * log.steps;
    log.x.resize(total);
    log.x_hat.resize(total);
    log.b_hat.resize(total);

    for (std::size_t k = 0; k < log.steps; ++k)
    {
        sim.step();
        for (const auto &robot : sim.robots())
        {
            const std::size_t at = robot.id * log.steps + k;
            log.x[at] = robot.bundle.x;
            log.x_hat[at] = robot.bundle.x_hat;
            log.b_hat[at] = robot.accuracy.b_hat;
        }
    }

    for (const auto &robot : sim.robots())
    {
        log.flawed.push_back(robot.is_flawed);
        log.final_tallies.push_back(robot.tally);
    }
    return log;
}

} // namespace

TrialLog run_trial(const TrialConfig &config)
{
    Simulation sim(config);
    return record(sim);
}

TrialLog run_trial(const TrialConfig &config, const Arena &arena)
{
    Simulation sim(config, arena);
    return record(sim);
}

} // namespace sdfsim
