#include "sdfsim/estimation.hpp"

#include "sdfsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdfsim {

namespace {

bool open_unit(double p) { return p > 0.0 && p < 1.0; }

} // namespace

SensorAccuracy SensorAccuracy::symmetric(double true_accuracy, double assumed_accuracy)
{
    SensorAccuracy acc{true_accuracy, true_accuracy, assumed_accuracy, assumed_accuracy};
    acc.validate();
    return acc;
}

void SensorAccuracy::validate() const
{
    if (!open_unit(b) || !open_unit(w))
        throw DomainError("true sensor accuracies must lie in (0, 1)");
    auto in_band = [](double p) { return p >= kMinAssumedAccuracy && p <= kMaxAssumedAccuracy; };
    if (!in_band(b_hat) || !in_band(w_hat))
        throw DomainError("assumed sensor accuracies must lie in [" + std::to_string(kMinAssumedAccuracy) + ", " +
                          std::to_string(kMaxAssumedAccuracy) + "]");
}

double black_observation_probability(double fill_ratio, double b, double w) noexcept
{
    return b * fill_ratio + (1.0 - w) * (1.0 - fill_ratio);
}

int observe(TileColor true_color, double b, double w, double draw) noexcept
{
    if (true_color == TileColor::Black)
        return draw < b ? 1 : 0;
    return draw < w ? 0 : 1;
}

double local_estimate(const ObservationTally &tally, double b_hat, double w_hat)
{
    if (tally.total == 0)
        throw DomainError("local estimate is undefined before the first observation");
    const double denom = b_hat + w_hat - 1.0;
    if (denom == 0.0)
        throw DomainError("local estimate is singular when b_hat + w_hat = 1");

    const double raw = (tally.black_ratio() + w_hat - 1.0) / denom;
    if (raw <= 0.0)
        return 0.0;
    if (raw >= 1.0)
        return 1.0;
    return raw;
}

double local_confidence(const ObservationTally &tally, double b_hat, double w_hat, double x_hat)
{
    if (tally.total == 0)
        throw DomainError("local confidence is undefined before the first observation");

    const double t = static_cast<double>(tally.total);
    const double n = static_cast<double>(tally.black);
    const double d = (b_hat + w_hat - 1.0) * (b_hat + w_hat - 1.0);

    if (x_hat == 0.0)
    {
        const double denom = w_hat * w_hat * (w_hat - 1.0) * (w_hat - 1.0);
        if (denom == 0.0)
            throw DomainError("local confidence is singular for w_hat in {0, 1}");
        return d * (t * w_hat * w_hat - (2.0 * w_hat - 1.0) * (t - n)) / denom;
    }
    if (x_hat == 1.0)
    {
        const double denom = b_hat * b_hat * (b_hat - 1.0) * (b_hat - 1.0);
        if (denom == 0.0)
            throw DomainError("local confidence is singular for b_hat in {0, 1}");
        return d * (t * b_hat * b_hat - (2.0 * b_hat - 1.0) * n) / denom;
    }

    if (tally.black == 0 || tally.black == tally.total)
        throw DomainError("interior local confidence needs 0 < n < t");
    return d * t * t * t / (n * (t - n));
}

WeightedEstimate local_values(const ObservationTally &tally, double b_hat, double w_hat)
{
    const double x_hat = local_estimate(tally, b_hat, w_hat);
    return {x_hat, local_confidence(tally, b_hat, w_hat, x_hat)};
}

std::optional<WeightedEstimate> social_fuse(std::span<const WeightedEstimate> neighbors)
{
    if (neighbors.empty())
        return std::nullopt;

    double weighted = 0.0;
    double total = 0.0;
    for (const auto &msg : neighbors)
    {
        if (!(msg.confidence >= 0.0))
            throw DomainError("neighbor confidence must be non-negative");
        weighted += msg.confidence * msg.estimate;
        total += msg.confidence;
    }
    if (total == 0.0)
        throw DomainError("social estimate is undefined when every neighbor confidence is zero");
    return WeightedEstimate{weighted / total, total};
}

double informed_fuse(double x_hat, double alpha, std::optional<double> x_bar, double beta)
{
    if (!(alpha >= 0.0) || !(beta >= 0.0))
        throw DomainError("confidences must be non-negative");
    if (!x_bar)
    {
        if (beta != 0.0)
            throw DomainError("social confidence given without a social estimate");
        return x_hat;
    }
    if (alpha + beta == 0.0)
        throw DomainError("informed estimate is undefined when alpha + beta = 0");
    const double x = (alpha * x_hat + beta * *x_bar) / (alpha + beta);
    // Rounding must not push a convex combination outside its endpoints.
    return std::clamp(x, std::min(x_hat, *x_bar), std::max(x_hat, *x_bar));
}

} // namespace sdfsim
