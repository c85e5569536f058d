#include "sdfsim/metrics.hpp"

#include "sdfsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace sdfsim {

void MetricConfig::validate() const
{
    if (!(delta > 0.0))
        throw ConfigError("delta must be positive");
    if (!(K_max > 0.0) || !(e_max > 0.0))
        throw ConfigError("K_max and e_max must be positive");
}

std::size_t convergence_step(std::span<const double> x, double delta)
{
    if (x.empty())
        throw DomainError("convergence step of an empty trajectory");
    if (!(delta > 0.0))
        throw DomainError("delta must be positive");

    // Suffix extrema: K qualifies iff every later value is within delta of x[K].
    const std::size_t n = x.size();
    std::vector<double> hi(n), lo(n);
    hi[n - 1] = lo[n - 1] = x[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
    {
        hi[i] = std::max(hi[i + 1], x[i]);
        lo[i] = std::min(lo[i + 1], x[i]);
    }
    for (std::size_t K = 0; K < n; ++K)
        if (hi[K] - x[K] < delta && x[K] - lo[K] < delta)
            return K;
    return n - 1;
}

double estimate_error(std::span<const double> x, std::size_t K, double truth)
{
    if (K >= x.size())
        throw DomainError("convergence step outside trajectory");
    return std::fabs(x[K] - truth);
}

double quantile(std::span<const double> values, double p)
{
    if (values.empty())
        throw DomainError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size())
        return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double interquartile_range(std::span<const double> values)
{
    return quantile(values, 0.75) - quantile(values, 0.25);
}

ScorePair individual_scores(double K, double e, double K_max, double e_max)
{
    if (!(K_max > 0.0) || !(e_max > 0.0))
        throw ConfigError("K_max and e_max must be positive");
    if (!(K >= 0.0 && K <= K_max))
        throw DomainError("convergence step must lie in [0, K_max]");
    if (!(e >= 0.0))
        throw DomainError("error must be non-negative");
    e = std::min(e, e_max);
    return {100.0 * (K_max - K) / K_max, 100.0 * (e_max - e) / e_max};
}

ScorePair trial_scores(std::span<const double> K, std::span<const double> e, double K_max, double e_max)
{
    if (K.empty() || e.empty())
        throw DomainError("trial scores need at least one robot");
    if (K.size() != e.size())
        throw DomainError("per-robot K and e lists differ in length");

    double sum_k = 0.0;
    double sum_e = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i)
    {
        const auto s = individual_scores(K[i], e[i], K_max, e_max);
        sum_k += s.h_K;
        sum_e += s.h_e;
    }
    const double n = static_cast<double>(K.size());
    return {sum_k / n * std::exp(-interquartile_range(K) / K_max),
            sum_e / n * std::exp(-interquartile_range(e) / e_max)};
}

ScoreReport score_trajectories(std::span<const std::span<const double>> trajectories, double truth,
                               const MetricConfig &constants)
{
    constants.validate();
    ScoreReport report;
    report.constants = constants;
    std::vector<double> ks;
    for (auto x : trajectories)
    {
        const auto K = convergence_step(x, constants.delta);
        report.K.push_back(K);
        report.e.push_back(estimate_error(x, K, truth));
        ks.push_back(static_cast<double>(K));
    }
    const auto s = trial_scores(ks, report.e, constants.K_max, constants.e_max);
    report.h_K = s.h_K;
    report.h_e = s.h_e;
    report.H = combined_score(s.h_K, s.h_e);
    return report;
}

ScoreReport score_trial(const TrialLog &log, const MetricConfig &constants)
{
    std::vector<std::span<const double>> rows;
    for (std::size_t i = 0; i < log.num_robots; ++i)
        rows.push_back(log.informed(i));
    return score_trajectories(rows, log.realized_fill_ratio, constants);
}

} // namespace sdfsim
