#pragma once

namespace banditlab {

/// log Beta(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Beta(a, b) density at x.
double beta_pdf(double x, double a, double b);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1], evaluated by the continued-fraction expansion (with the
/// usual symmetry switch so the fraction always converges fast).
double reg_inc_beta(double x, double a, double b);

/// Quantile of Beta(a, b): the x with I_x(a, b) = p, found by Newton steps
/// safeguarded by a shrinking bisection bracket. Converges to an absolute
/// tolerance of 1e-12 in x (well inside the 1e-10 requirement).
/// Throws std::invalid_argument unless 0 < p < 1 and a, b > 0.
double beta_quantile(double p, double a, double b);

}
