#pragma once

namespace ltgmm {

// Closed-form error expressions for the long-tailed two-class Gaussian
// mixture, as functions of the signal-to-noise ratio nu = ||mu||/sigma and
// the negative-majority weight p.  All normal-CDF arguments are clamped to
// [-38, 38]; beyond that range the tail mass is far below double epsilon,
// so the clamp only protects against overflow in intermediate arithmetic.

// Exact test error of the mean-equidistance rule (centroid classifier) that
// splits the space at the midpoint of mu and the negative-class mean.
// Requires nu > 0 and 1/2 < p <= 1 (p = 1 is the vanishing-tail limit).
double lda_error_formula(double nu, double p);

// Upper bound on the test error of the two-threshold density rule that
// claims the slab around the positive center.  Requires nu > 0, 1/2 < p < 1.
double mda_error_bound(double nu, double p);

// Lower bound on lda_error_formula - mda_error_bound: (1-p)/2 - exp(-nu^2/2).
// Requires nu > 0 and 1/2 < p < 1.
double gap_lower_bound(double nu, double p);

// Error of the centroid rule whose negative mean was computed under a
// reweighted mixture with minority weight 1/t, evaluated against the
// original mixture with majority weight p.  Requires nu > 0, 1/2 < p <= 1,
// t > 1.  At t = 1/(1-p) the rule is correctly specified and this equals
// lda_error_formula(nu, p).
double lda_error_shifted(double nu, double p, double t);

// Same misspecification for the two-threshold density rule: thresholds use
// minority weight 1/t, the evaluation mixture keeps weight p.  Requires
// nu > 0, 1/2 < p < 1, t > 1.  At t = 1/(1-p) this equals
// mda_error_bound(nu, p).
double mda_error_shifted_bound(double nu, double p, double t);

// The reweighting scale at which the misspecified density rule starts
// claiming essentially the whole minority component: the solution of
// -nu + ln(t)/(2 nu) = 3 nu, i.e. exp(8 nu^2).  Returns +infinity when the
// value exceeds double range.  Requires nu > 0.
double crossover_t(double nu);

}  // namespace ltgmm
