#pragma once

namespace sdfsim {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// P(T > q) for Student's t with `df` degrees of freedom.
double student_t_upper_tail(double q, double df);

/// Student's t density.
double student_t_pdf(double q, double df);

/**
 * The t-score q with P(T_df > q) = upper_tail, found by bracketing and
 * bisection on student_t_upper_tail. Requires df >= 1 and 0 < upper_tail <= 0.5;
 * throws DomainError otherwise.
 */
double t_quantile(int df, double upper_tail);

} // namespace sdfsim
