#pragma once

#include "sdfsim/estimation.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sdfsim {

/// Parameters of the adaptive filter activation.
struct ActivationConfig
{
    double omega = 0.05;            // type II error probability
    std::uint64_t tau = 1000;       // nominal filtering period, in steps
    std::size_t min_neighbors = 2;  // smallest sample the test runs on

    void validate() const;

    bool operator==(const ActivationConfig &) const = default;
};

/// t-scores t_{df, (1 - omega)/2} for df = 1..max_df, precomputed once.
class TQuantileTable
{
public:
    TQuantileTable(double omega, std::size_t max_df);

    double omega() const noexcept { return omega_; }
    std::size_t max_df() const noexcept { return entries_.size(); }

    /// Table lookup; degrees of freedom beyond max_df are computed directly.
    double quantile(std::size_t df) const;

private:
    double omega_;
    std::vector<double> entries_;
};

/// Rejection threshold c = t_{m-1, (1 - omega)/2} + sqrt(m). Throws DomainError for m < 2.
double activation_threshold(std::size_t m, double omega);

/**
 * Two-sided test of whether a robot's own estimate differs from the mean of its
 * neighbors' estimates: true iff |mean - x_hat_self| > (t / sqrt(m) + 1) S with
 * S the sample standard deviation (divisor m - 1). When S = 0 the answer is
 * mean != x_hat_self.
 *
 * Returns nullopt when fewer than two neighbor estimates are available.
 */
std::optional<bool> should_activate(double x_hat_self, std::span<const double> neighbor_estimates, double omega);

/// Same test with t-scores taken from a precomputed table.
std::optional<bool> should_activate(double x_hat_self, std::span<const double> neighbor_estimates,
                                    const TQuantileTable &table);

// |2 x_bar - 1| at or below this leaves the accuracy update undefined.
inline constexpr double kSingularSocialTolerance = 1e-6;

/**
 * Assumed-accuracy update (n/t + x_bar - 1) / (2 x_bar - 1), clamped to
 * [kMinAssumedAccuracy, kMaxAssumedAccuracy]. The result replaces both b_hat
 * and w_hat. Returns nullopt when the social estimate is too close to 0.5.
 */
std::optional<double> update_assumed_accuracy(double black_ratio, double x_bar);

/// Throws DomainError for an empty tally.
std::optional<double> update_assumed_accuracy(const ObservationTally &tally, double x_bar);

} // namespace sdfsim
