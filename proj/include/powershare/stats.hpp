#pragma once

// Tail probabilities used by the hypothesis tests. Regularized incomplete
// gamma/beta via the usual series/continued-fraction split.

namespace powershare {

double normal_cdf(double x);

// P(X > x) for X ~ chi-squared with k dof.
double chi_squared_sf(double x, double k);

// P(X > x) for X ~ F(d1, d2).
double f_dist_sf(double x, double d1, double d2);

// Regularized incomplete gamma Q(a, x) and beta I_x(a, b).
double gamma_q(double a, double x);
double incbeta(double a, double b, double x);

}  // namespace powershare
