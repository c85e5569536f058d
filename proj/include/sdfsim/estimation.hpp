#pragma once

#include "sdfsim/arena.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace sdfsim {

// Assumed accuracies are kept in this band: the estimator is singular at 0.5
// and the confidence at 0 and 1.
inline constexpr double kMinAssumedAccuracy = 0.501;
inline constexpr double kMaxAssumedAccuracy = 0.999;

/// True (b, w) and assumed (b_hat, w_hat) probabilities of reporting a tile's
/// color correctly, for black and white tiles.
struct SensorAccuracy
{
    double b = 0.0;
    double w = 0.0;
    double b_hat = 0.0;
    double w_hat = 0.0;

    /// w = b and w_hat = b_hat, the only configuration the simulator uses.
    static SensorAccuracy symmetric(double true_accuracy, double assumed_accuracy);

    /// Throws DomainError unless b, w lie in (0, 1) and b_hat, w_hat lie in
    /// [kMinAssumedAccuracy, kMaxAssumedAccuracy].
    void validate() const;

    bool operator==(const SensorAccuracy &) const = default;
};

/// Running count of black observations (black) out of all observations (total).
struct ObservationTally
{
    std::uint64_t black = 0;
    std::uint64_t total = 0;

    void record(int observation)
    {
        black += observation != 0 ? 1 : 0;
        ++total;
    }

    double black_ratio() const noexcept { return static_cast<double>(black) / static_cast<double>(total); }

    bool operator==(const ObservationTally &) const = default;
};

/// An estimate with its confidence weight. The (x_hat, alpha) pair is what robots exchange.
struct WeightedEstimate
{
    double estimate = 0.0;
    double confidence = 0.0;

    bool operator==(const WeightedEstimate &) const = default;
};

/// One robot's estimation state at a time step.
struct EstimateBundle
{
    double x_hat = 0.0;
    double alpha = 0.0;
    std::optional<double> x_bar;
    double beta = 0.0;
    double x = 0.0;

    bool operator==(const EstimateBundle &) const = default;
};

/// P(z = 1) = b f + (1 - w)(1 - f).
double black_observation_probability(double fill_ratio, double b, double w) noexcept;

/**
 * Noisy observation of a tile: returns 1 (black) or 0 (white). `draw` is a
 * uniform sample in [0, 1); a black tile reads black when draw < b, a white
 * tile reads white when draw < w.
 */
int observe(TileColor true_color, double b, double w, double draw) noexcept;

inline int observe(TileColor true_color, const SensorAccuracy &accuracy, double draw) noexcept
{
    return observe(true_color, accuracy.b, accuracy.w, draw);
}

/**
 * Maximum likelihood estimate of the fill ratio from a tally:
 * (n/t + w_hat - 1) / (b_hat + w_hat - 1), saturated to exactly 0 or 1.
 *
 * Throws DomainError when total == 0 or b_hat + w_hat == 1.
 */
double local_estimate(const ObservationTally &tally, double b_hat, double w_hat);

inline double local_estimate(const ObservationTally &tally, const SensorAccuracy &accuracy)
{
    return local_estimate(tally, accuracy.b_hat, accuracy.w_hat);
}

/**
 * Fisher information of the estimate, used as its confidence. The branch is
 * chosen by x_hat: exactly 0, exactly 1, or interior (as produced by
 * local_estimate).
 *
 * Throws DomainError for an empty tally, for the interior branch with
 * n in {0, t}, or when a saturated branch would divide by zero.
 */
double local_confidence(const ObservationTally &tally, double b_hat, double w_hat, double x_hat);

/// local_estimate and local_confidence together.
WeightedEstimate local_values(const ObservationTally &tally, double b_hat, double w_hat);

/**
 * Confidence-weighted mean of neighbor estimates, with the summed confidence.
 * Returns nullopt for an empty neighbor list. Throws DomainError on a
 * negative weight or when all weights are zero.
 */
std::optional<WeightedEstimate> social_fuse(std::span<const WeightedEstimate> neighbors);

/**
 * (alpha x_hat + beta x_bar) / (alpha + beta). With no social estimate beta
 * must be zero and the local estimate is returned unchanged.
 */
double informed_fuse(double x_hat, double alpha, std::optional<double> x_bar, double beta);

} // namespace sdfsim
