#pragma once

namespace ltgmm {

// Standard normal CDF, accurate to ~1e-15 relative over the useful range and
// correct in both tails (underflows to exactly 0 / saturates at 1 instead of
// losing precision).  Rejects non-finite input.
double std_normal_cdf(double x);

// Standard normal density.  Rejects non-finite input.
double std_normal_pdf(double x);

// Complementary error function via Cody's rational Chebyshev approximation
// (three ranges).  Exposed for tests; std_normal_cdf is a thin wrapper.
double erfc_cody(double x);

// Two-sided 97.5% quantile of Student's t with df degrees of freedom, i.e.
// the multiplier for a 95% confidence interval.  df must be >= 1.
double student_t_quantile_975(int df);

}  // namespace ltgmm
