#include "sdfsim/filter.hpp"

#include "sdfsim/error.hpp"
#include "sdfsim/t_distribution.hpp"

#include <algorithm>
#include <cmath>

namespace sdfsim {

namespace {

double tail_for(double omega) { return 0.5 * (1.0 - omega); }

void check_omega(double omega)
{
    if (!(omega > 0.0 && omega < 1.0))
        throw DomainError("type II error probability must lie in (0, 1)");
}

template <typename Quantile>
std::optional<bool> run_test(double x_hat_self, std::span<const double> xs, Quantile &&quantile)
{
    const std::size_t m = xs.size();
    if (m < 2)
        return std::nullopt;

    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(m);

    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    const double s = std::sqrt(ss / static_cast<double>(m - 1));

    const double gap = std::fabs(mean - x_hat_self);
    if (s == 0.0)
        return gap != 0.0;

    const double factor = quantile(m - 1) / std::sqrt(static_cast<double>(m)) + 1.0;
    return gap > factor * s;
}

} // namespace

void ActivationConfig::validate() const
{
    check_omega(omega);
    if (tau < 1)
        throw DomainError("filtering period must be at least one step");
    if (min_neighbors < 2)
        throw DomainError("activation test needs at least two neighbors");
}

TQuantileTable::TQuantileTable(double omega, std::size_t max_df) : omega_(omega)
{
    check_omega(omega);
    entries_.reserve(max_df);
    for (std::size_t df = 1; df <= max_df; ++df)
        entries_.push_back(t_quantile(static_cast<int>(df), tail_for(omega)));
}

double TQuantileTable::quantile(std::size_t df) const
{
    if (df == 0)
        throw DomainError("t quantile needs at least one degree of freedom");
    if (df <= entries_.size())
        return entries_[df - 1];
    return t_quantile(static_cast<int>(df), tail_for(omega_));
}

double activation_threshold(std::size_t m, double omega)
{
    if (m < 2)
        throw DomainError("activation threshold needs at least two neighbors");
    check_omega(omega);
    return t_quantile(static_cast<int>(m - 1), tail_for(omega)) + std::sqrt(static_cast<double>(m));
}

std::optional<bool> should_activate(double x_hat_self, std::span<const double> neighbor_estimates, double omega)
{
    check_omega(omega);
    return run_test(x_hat_self, neighbor_estimates,
                    [omega](std::size_t df) { return t_quantile(static_cast<int>(df), tail_for(omega)); });
}

std::optional<bool> should_activate(double x_hat_self, std::span<const double> neighbor_estimates,
                                    const TQuantileTable &table)
{
    return run_test(x_hat_self, neighbor_estimates, [&table](std::size_t df) { return table.quantile(df); });
}

std::optional<double> update_assumed_accuracy(double black_ratio, double x_bar)
{
    const double denom = 2.0 * x_bar - 1.0;
    if (std::fabs(denom) <= kSingularSocialTolerance)
        return std::nullopt;
    const double raw = (black_ratio + x_bar - 1.0) / denom;
    return std::clamp(raw, kMinAssumedAccuracy, kMaxAssumedAccuracy);
}

std::optional<double> update_assumed_accuracy(const ObservationTally &tally, double x_bar)
{
    if (tally.total == 0)
        throw DomainError("accuracy update needs at least one observation");
    return update_assumed_accuracy(tally.black_ratio(), x_bar);
}

} // namespace sdfsim
