#pragma once

#include <cstddef>

namespace hilfer {

/// Truncation controls for the one-parameter Mittag-Leffler series.
struct MlfParams {
    double mu = 1.0;
    double tol = 1e-14;
    std::size_t max_terms = 500;
};

/// Gamma function for x > 0; throws DomainError otherwise.
double gamma(double x);

/// E_mu(z) = sum_k z^k / Gamma(k mu + 1), summed until the first omitted term
/// is below tol * max(1, |partial sum|) while terms are decreasing.
///
/// Meant for modest |z| (the series cancels badly for large negative z).
/// Throws DomainError on invalid params, ConvergenceError when max_terms is
/// exhausted.
double mittag_leffler(const MlfParams& p, double z);

inline double mittag_leffler(double mu, double z) { return mittag_leffler(MlfParams{mu}, z); }

}  // namespace hilfer
