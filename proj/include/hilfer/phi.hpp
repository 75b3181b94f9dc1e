#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hilfer/expr.hpp"

namespace hilfer {

enum class PhiFamily { Identity, LogShift, PowerRho, Custom };

std::string to_string(PhiFamily f);

/// The increasing function phi that defines the fractional operators, with its
/// derivative. Builtin families evaluate in closed form; custom ones go through
/// user expressions in `t`.
class PhiFunction {
public:
    static PhiFunction identity();
    /// log(1 + t - shift); normalised so that phi(shift) = 0.
    static PhiFunction log_shift(double shift);
    /// t^rho, rho > 0 (requires t >= 0).
    static PhiFunction power(double rho);
    static PhiFunction custom(Expr phi, Expr phi_prime);

    PhiFamily family() const noexcept { return family_; }
    double rho() const noexcept { return param_; }
    double shift() const noexcept { return param_; }

    const Expr& phi_expr() const noexcept { return phi_; }
    const Expr& phi_prime_expr() const noexcept { return phi_prime_; }

    double value(double t) const;
    double derivative(double t) const;

    /// Solves phi(t) = u for t in [a, b].
    double inverse(double u, double a, double b) const;

    /// Throws DomainError unless phi is defined and strictly increasing on [a, b]
    /// when sampled at `samples` uniformly spaced points.
    void validate_on(double a, double b, std::size_t samples) const;

    friend bool operator==(const PhiFunction& x, const PhiFunction& y);

private:
    PhiFunction(PhiFamily f, double param, Expr phi, Expr phi_prime);

    PhiFamily family_;
    double param_;
    Expr phi_;
    Expr phi_prime_;
};

struct GridOptions {
    std::size_t intervals = 1024;  // N; the grid has N + 1 nodes
    double grading = 2.0;          // r >= 1; clustering exponent towards a
    std::vector<double> pinned;    // t values that must be exact nodes
};

/// Graded discretisation of [a, b] in the variable u = phi(t):
/// phi(t_i) - phi(a) = (phi(b) - phi(a)) (i/N)^r, with each pinned t snapped
/// onto its nearest node. Immutable once built.
class PhiGrid {
public:
    static std::shared_ptr<const PhiGrid> build(const PhiFunction& phi, double a, double b,
                                                const GridOptions& opts = {});

    std::size_t size() const noexcept { return t_.size(); }
    std::size_t intervals() const noexcept { return t_.size() - 1; }
    double a() const noexcept { return t_.front(); }
    double b() const noexcept { return t_.back(); }
    double grading() const noexcept { return grading_; }

    std::span<const double> nodes() const noexcept { return t_; }
    /// phi(t_i)
    std::span<const double> phi_values() const noexcept { return u_; }
    /// phi(t_i) - phi(a), computed without cancellation
    std::span<const double> offsets() const noexcept { return offset_; }
    std::span<const double> phi_prime_values() const noexcept { return dphi_; }

    double t(std::size_t i) const { return t_[i]; }
    double offset(std::size_t i) const { return offset_[i]; }

    /// Index of the node closest to t (exact for pinned values).
    std::size_t nearest_index(double t) const;

    const PhiFunction& phi() const noexcept { return phi_; }

    /// Splits every panel into `factor` equal pieces in phi. Node i of this grid
    /// is node i * factor of the result.
    std::shared_ptr<const PhiGrid> refine(std::size_t factor) const;

private:
    PhiGrid(PhiFunction phi, double grading) : phi_(std::move(phi)), grading_(grading) {}

    PhiFunction phi_;
    double grading_;
    std::vector<double> t_, u_, offset_, dphi_;
};

using GridPtr = std::shared_ptr<const PhiGrid>;

enum class Representation { Plain, Weighted };

/// Real function sampled on a PhiGrid. The weighted representation stores
/// (phi(t) - phi(a))^(2 - xi) y(t), which stays bounded at t = a for members
/// of the weighted space even when y itself does not.
class GridFunction {
public:
    static GridFunction plain(GridPtr grid, std::vector<double> values);
    static GridFunction weighted(GridPtr grid, std::vector<double> values, double xi);

    template <class F>
    static GridFunction sample_plain(GridPtr grid, F&& fn) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->t(i));
        return plain(std::move(grid), std::move(v));
    }

    const GridPtr& grid() const noexcept { return grid_; }
    const PhiGrid& grid_ref() const noexcept { return *grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    Representation representation() const noexcept { return rep_; }
    bool is_weighted() const noexcept { return rep_ == Representation::Weighted; }
    double xi() const noexcept { return xi_; }

    /// Plain value at node i. At t = a a weighted function with xi < 2 maps to 0
    /// when its weighted value is 0 and to +-infinity otherwise.
    double plain_at(std::size_t i) const;
    /// Weighted value (phi - phi(a))^(2 - xi) y at node i.
    double weighted_at(std::size_t i, double xi) const;

    GridFunction to_plain() const;
    GridFunction to_weighted(double xi) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

private:
    GridFunction(GridPtr grid, std::vector<double> values, Representation rep, double xi);
    void require_compatible(const GridFunction& o) const;

    GridPtr grid_;
    std::vector<double> values_;
    Representation rep_;
    double xi_;
};

}  // namespace hilfer
