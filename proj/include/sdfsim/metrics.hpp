#pragma once

#include "sdfsim/sim.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sdfsim {

/// Normalization constants of the score pipeline.
struct MetricConfig
{
    double delta = 0.01;     // settling threshold
    double K_max = 40000.0;  // largest convergence step
    double e_max = 0.45;     // largest absolute error

    void validate() const;
};

struct ScorePair
{
    double h_K = 0.0;
    double h_e = 0.0;
};

struct ScoreReport
{
    std::vector<std::size_t> K;
    std::vector<double> e;
    double h_K = 0.0;
    double h_e = 0.0;
    double H = 0.0;
    MetricConfig constants;
};

/// Smallest K with |x[K] - x[k]| < delta for every k >= K. O(n).
std::size_t convergence_step(std::span<const double> trajectory, double delta);

/// |x[K] - f|.
double estimate_error(std::span<const double> trajectory, std::size_t K, double truth);

/// Linear-interpolation sample quantile (R type 7). Throws DomainError on empty input.
double quantile(std::span<const double> values, double p);

double interquartile_range(std::span<const double> values);

/// Per-robot scores 100 (K_max - K) / K_max and 100 (e_max - e) / e_max.
/// e above e_max is clipped to e_max; K above K_max is a DomainError.
ScorePair individual_scores(double K, double e, double K_max, double e_max);

/// Swarm-mean individual scores, each scaled by exp(-IQR / max) of the raw values.
ScorePair trial_scores(std::span<const double> K, std::span<const double> e, double K_max, double e_max);

inline double combined_score(double h_K, double h_e) { return 0.5 * (h_K + h_e); }

/// Full pipeline on a set of informed-estimate trajectories.
ScoreReport score_trajectories(std::span<const std::span<const double>> trajectories, double truth,
                               const MetricConfig &constants);

/// Scores a trial against its realized fill ratio.
ScoreReport score_trial(const TrialLog &log, const MetricConfig &constants);

} // namespace sdfsim
