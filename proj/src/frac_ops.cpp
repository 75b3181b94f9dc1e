#include "hilfer/frac_ops.hpp"

#include <cmath>
#include <string>

#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"
#include "panel_rules.hpp"

namespace hilfer {

namespace {

void require_order(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw DomainError("fractional integral order must be positive, got " + std::to_string(mu));
}

// Writes the k + 1 weights of target k into out.
void fill_row(const PhiGrid& grid, double mu, double beta, std::size_t k, double inv_gamma, double* out) {
    for (std::size_t j = 0; j <= k; ++j) out[j] = 0.0;
    const auto off = grid.offsets();
    const double target = off[k];
    for (std::size_t j = 0; j < k; ++j) {
        const detail::PanelWeights w =
            beta == 0.0 ? detail::plain_panel(target - off[j], off[j + 1] - off[j], mu)
                        : detail::weighted_panel(off[j], off[j + 1], target, mu, beta);
        out[j] += w.left * inv_gamma;
        out[j + 1] += w.right * inv_gamma;
    }
}

}  // namespace

std::vector<double> integral_weights(const PhiGrid& grid, double mu, std::size_t target,
                                     double weight_exponent) {
    require_order(mu);
    if (target >= grid.size()) throw DomainError("target node out of range");
    if (!(weight_exponent > -1.0)) throw DomainError("weight exponent must exceed -1");
    std::vector<double> w(target + 1);
    fill_row(grid, mu, weight_exponent, target, 1.0 / gamma(mu), w.data());
    return w;
}

// ---------------------------------------------------------------------------

FracIntegralOperator::FracIntegralOperator(GridPtr grid, double mu, double weight_exponent)
    : grid_(std::move(grid)), mu_(mu), beta_(weight_exponent) {
    fill(true);
}

FracIntegralOperator::FracIntegralOperator(GridPtr grid, double mu, double weight_exponent, SerialTag)
    : grid_(std::move(grid)), mu_(mu), beta_(weight_exponent) {
    fill(false);
}

FracIntegralOperator FracIntegralOperator::build_serial(GridPtr grid, double mu, double weight_exponent) {
    return FracIntegralOperator(std::move(grid), mu, weight_exponent, SerialTag{});
}

void FracIntegralOperator::fill(bool parallel) {
    require_order(mu_);
    if (!(beta_ > -1.0)) throw DomainError("weight exponent must exceed -1");
    const std::size_t n = grid_->size();
    weights_.assign(n * (n + 1) / 2, 0.0);
    const double inv_gamma = 1.0 / gamma(mu_);
    const PhiGrid& g = *grid_;
    const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (long k = 0; k < rows; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        fill_row(g, mu_, beta_, kk, inv_gamma, weights_.data() + kk * (kk + 1) / 2);
    }
}

double FracIntegralOperator::apply_at(std::span<const double> values, std::size_t k) const {
    const auto w = row(k);
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * values[j];
    return s;
}

std::vector<double> FracIntegralOperator::apply(std::span<const double> values) const {
    if (values.size() != grid_->size()) throw DomainError("operand size does not match grid");
    std::vector<double> out(values.size());
    const long rows = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (long k = 0; k < rows; ++k) out[static_cast<std::size_t>(k)] = apply_at(values, static_cast<std::size_t>(k));
    return out;
}

std::vector<double> FracIntegralOperator::apply_serial(std::span<const double> values) const {
    if (values.size() != grid_->size()) throw DomainError("operand size does not match grid");
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = apply_at(values, k);
    return out;
}

// ---------------------------------------------------------------------------

double frac_integral(const GridFunction& h, double mu, std::size_t k) {
    if (h.is_weighted()) return frac_integral_weighted(h, h.xi(), mu, k);
    const auto w = integral_weights(h.grid_ref(), mu, k);
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        if (w[j] == 0.0) continue;
        if (!std::isfinite(h[j])) throw DomainError("frac_integral: integrand is not finite on the grid");
        s += w[j] * h[j];
    }
    return s;
}

double frac_integral_weighted(const GridFunction& h_weighted, double xi, double mu, std::size_t k) {
    if (!(xi > 1.0 && xi <= 2.0)) throw DomainError("frac_integral_weighted: xi must lie in (1, 2]");
    const auto w = integral_weights(h_weighted.grid_ref(), mu, k, xi - 2.0);
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += w[j] * h_weighted.weighted_at(j, xi);
    return s;
}

double weighted_norm(const GridFunction& y, double xi) {
    double m = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) m = std::fmax(m, std::fabs(y.weighted_at(i, xi)));
    return m;
}

double powerlaw_oracle(double mu, double delta, const PhiFunction& phi, double a, double t) {
    if (!(mu > 0.0) || !(delta > 0.0)) throw DomainError("powerlaw_oracle: mu and delta must be positive");
    const double x = phi.value(t) - phi.value(a);
    return gamma(delta) / gamma(mu + delta) * std::pow(x, mu + delta - 1.0);
}

double hilfer_annihilation_check(double xi, const PhiGrid& grid) {
    if (!(xi > 1.0 && xi <= 2.0)) throw DomainError("hilfer_annihilation_check: xi must lie in (1, 2]");
    const auto off = grid.offsets();
    const std::size_t n = grid.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(off[i], xi - 1.0);

    // I^{2 - xi} y, with order 0 meaning the identity.
    std::vector<double> integrated(n);
    if (xi == 2.0) {
        integrated = y;
    } else {
        const double inv_gamma = 1.0 / gamma(2.0 - xi);
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) {
            fill_row(grid, 2.0 - xi, 0.0, k, inv_gamma, w.data());
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += w[j] * y[j];
            integrated[k] = s;
        }
    }
    const double slope = integrated[n - 1] / off[n - 1];
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::fmax(worst, std::fabs(integrated[i] - slope * off[i]));
    return worst;
}

}  // namespace hilfer
