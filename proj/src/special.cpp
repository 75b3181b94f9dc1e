#include "hilfer/special.hpp"

#include <cmath>
#include <string>

#include "hilfer/errors.hpp"

namespace hilfer {

double gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("gamma: argument must be positive and finite, got " + std::to_string(x));
    double g = std::tgamma(x);
    if (!std::isfinite(g)) throw DomainError("gamma: overflow at x = " + std::to_string(x));
    return g;
}

namespace {

// z^k / Gamma(k mu + 1) without intermediate overflow.
double series_term(double z, std::size_t k, double mu) {
    const double arg = static_cast<double>(k) * mu + 1.0;
    if (arg < 160.0) {
        const double direct = std::pow(z, static_cast<double>(k)) / std::tgamma(arg);
        if (std::isfinite(direct)) return direct;
    }
    const double mag = std::exp(static_cast<double>(k) * std::log(std::fabs(z)) - std::lgamma(arg));
    return (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
}

}  // namespace

double mittag_leffler(const MlfParams& p, double z) {
    if (!(p.mu > 0.0) || !(p.tol > 0.0) || p.max_terms < 1)
        throw DomainError("mittag_leffler: require mu > 0, tol > 0, max_terms >= 1");
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: non-finite argument");
    if (z == 0.0) return 1.0;

    double sum = 1.0;
    double prev = 1.0;
    for (std::size_t k = 1; k < p.max_terms; ++k) {
        const double term = series_term(z, k, p.mu);
        const double mag = std::fabs(term);
        if (mag < p.tol * std::fmax(1.0, std::fabs(sum)) && mag <= std::fabs(prev)) return sum;
        sum += term;
        if (!std::isfinite(sum)) throw DomainError("mittag_leffler: overflow at z = " + std::to_string(z));
        prev = term;
    }
    throw ConvergenceError("mittag_leffler: series not converged within " +
                           std::to_string(p.max_terms) + " terms (mu = " + std::to_string(p.mu) +
                           ", z = " + std::to_string(z) + ")");
}

}  // namespace hilfer
