#include "sdfsim/t_distribution.hpp"

#include "sdfsim/error.hpp"

#include <cmath>
#include <limits>

namespace sdfsim {

namespace {

// Continued fraction for I_x(a, b), modified Lentz. Converges for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x)
{
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIterations; ++m)
    {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("incomplete beta needs positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("incomplete beta argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0)
        return x;

    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);

    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double q, double df)
{
    if (!(df > 0.0))
        throw DomainError("degrees of freedom must be positive");
    if (std::isinf(q))
        return q > 0.0 ? 0.0 : 1.0;
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + q * q));
    return q >= 0.0 ? tail : 1.0 - tail;
}

double student_t_pdf(double q, double df)
{
    const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * M_PI);
    return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(q * q / df));
}

double t_quantile(int df, double upper_tail)
{
    if (df < 1)
        throw DomainError("t quantile needs at least one degree of freedom");
    if (!(upper_tail > 0.0 && upper_tail <= 0.5))
        throw DomainError("upper-tail probability must lie in (0, 0.5]");
    if (upper_tail == 0.5)
        return 0.0;

    const double nu = static_cast<double>(df);
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_upper_tail(hi, nu) > upper_tail)
    {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw Error("t quantile bracket overflow");
    }

    // The tail is monotone decreasing in q; bisect down to adjacent doubles.
    for (int i = 0; i < 2000; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (student_t_upper_tail(mid, nu) > upper_tail)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace sdfsim
