#pragma once

// Scalar special functions used by the tail dependence families, the
// Student-t margins and the skew-t innovation density.

namespace covar::special {

/// Standard normal distribution function.
double normal_cdf(double x);
/// Standard normal upper tail, 1 - normal_cdf(x), without cancellation.
double normal_sf(double x);
double normal_pdf(double x);
/// Inverse of normal_cdf on (0,1).
double normal_quantile(double u);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Student-t distribution function with nu > 0 degrees of freedom.
double student_t_cdf(double t, double nu);
/// Upper tail 1 - F(t; nu).
double student_t_sf(double t, double nu);
double student_t_pdf(double t, double nu);
double student_t_log_pdf(double t, double nu);
/// Inverse of student_t_cdf on (0,1).
double student_t_quantile(double u, double nu);

/// Upper tail of the chi-square(1) distribution.
double chi2_1_sf(double x);

}  // namespace covar::special
