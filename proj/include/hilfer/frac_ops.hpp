#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hilfer/phi.hpp"

namespace hilfer {

/// Product-integration weights of the fractional integral of order mu at node
/// `target`, for an integrand
///
///     (phi(s) - phi(a))^weight_exponent * h(s),
///
/// with h interpolated linearly in u = phi(s). The kernel and the power weight
/// are integrated exactly on each panel, so the rule is exact whenever h is
/// linear in u. weight_exponent = 0 gives the plain rule. Includes 1/Gamma(mu).
std::vector<double> integral_weights(const PhiGrid& grid, double mu, std::size_t target,
                                     double weight_exponent = 0.0);

/// Fractional integral of order mu evaluated at every node at once, stored as a
/// packed lower-triangular weight matrix. Rows are independent, so both the
/// build and the application parallelise over target nodes; the *_serial
/// variants are the reference implementations used in tests and benchmarks.
class FracIntegralOperator {
public:
    FracIntegralOperator(GridPtr grid, double mu, double weight_exponent = 0.0);

    static FracIntegralOperator build_serial(GridPtr grid, double mu, double weight_exponent = 0.0);

    double order() const noexcept { return mu_; }
    double weight_exponent() const noexcept { return beta_; }
    const GridPtr& grid() const noexcept { return grid_; }

    std::span<const double> row(std::size_t k) const {
        return {weights_.data() + k * (k + 1) / 2, k + 1};
    }

    /// out[k] = sum_j W[k][j] values[j] for every node k.
    std::vector<double> apply(std::span<const double> values) const;
    std::vector<double> apply_serial(std::span<const double> values) const;

    double apply_at(std::span<const double> values, std::size_t k) const;

private:
    struct SerialTag {};
    FracIntegralOperator(GridPtr grid, double mu, double weight_exponent, SerialTag);
    void fill(bool parallel);

    GridPtr grid_;
    double mu_;
    double beta_;
    std::vector<double> weights_;
};

/// I^{mu;phi} h at node k. A weighted h is routed to frac_integral_weighted.
double frac_integral(const GridFunction& h, double mu, std::size_t k);

/// I^{mu;phi} of the plain function (phi(s) - phi(a))^(xi - 2) h_weighted(s) at node k.
double frac_integral_weighted(const GridFunction& h_weighted, double xi, double mu, std::size_t k);

/// max_i |(phi(t_i) - phi(a))^(2 - xi) y(t_i)|
double weighted_norm(const GridFunction& y, double xi);

/// Gamma(delta)/Gamma(mu + delta) (phi(t) - phi(a))^(mu + delta - 1): the exact
/// fractional integral of (phi(s) - phi(a))^(delta - 1).
double powerlaw_oracle(double mu, double delta, const PhiFunction& phi, double a, double t);

/// Checks numerically that (phi - phi(a))^(xi - 1) lies in the kernel of the
/// Hilfer derivative: its integral of order 2 - xi must be a multiple of
/// (phi - phi(a)), which the second phi-derivative annihilates. Returns the
/// largest deviation from the best such multiple (anchored at t = b).
double hilfer_annihilation_check(double xi, const PhiGrid& grid);

}  // namespace hilfer
