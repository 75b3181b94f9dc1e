#pragma once

#include <span>
#include <vector>

#include "hilfer/expr.hpp"
#include "hilfer/phi.hpp"

namespace hilfer {

/// One term lambda * I^delta y(tau) of the nonlocal condition at t = b.
struct BoundaryTerm {
    double lambda = 0.0;
    double delta = 1.0;
    double tau = 0.0;

    friend bool operator==(const BoundaryTerm&, const BoundaryTerm&) = default;
};

/// The boundary value problem
///
///     D^{mu,nu;phi} y(t) = f(t, y(t), D^{mu,nu;phi} y(t)),   t in (a, b]
///     y(a) = 0,   y(b) = sum_i lambda_i I^{delta_i;phi} y(tau_i)
///
/// with Lipschitz constants K (in y) and L (in the derivative argument) for f.
struct ProblemSpec {
    double mu = 1.5;
    double nu = 1.0;
    PhiFunction phi = PhiFunction::identity();
    double a = 0.0;
    double b = 1.0;
    std::vector<BoundaryTerm> boundary;
    Expr f = Expr::constant(0.0, {"t", "y", "d"});
    double K = 0.1;
    double L = 0.1;

    /// Throws DomainError describing the first violated requirement.
    void validate() const;

    double xi() const;
    /// phi(t) - phi(a)
    double offset(double t) const { return phi.value(t) - phi.value(a); }
    double span() const { return offset(b); }

    friend bool operator==(const ProblemSpec& x, const ProblemSpec& y);
};

struct ExistenceCertificate {
    double xi = 0.0;
    double Lambda = 0.0;
    double Omega = 0.0;
    double sigma = 0.0;  // +inf when Lambda vanishes
    bool lambda_nonzero = false;
    bool sigma_lt_one = false;
    bool L_lt_one = false;

    bool passed() const noexcept { return lambda_nonzero && sigma_lt_one && L_lt_one; }
};

/// mu + nu (2 - mu); requires 1 < mu < 2 and 0 <= nu <= 1.
double compute_xi(double mu, double nu);

/// (phi(b)-phi(a))^(xi-1)/Gamma(xi) - sum_i lambda_i (phi(tau_i)-phi(a))^(xi+delta_i-1)/Gamma(xi+delta_i)
double compute_lambda(const ProblemSpec& spec);

/// sum_i lambda_i (phi(b)-phi(a))^delta_i/Gamma(xi+mu+delta_i-1) + 1/Gamma(xi+mu-1)
double compute_omega(const ProblemSpec& spec);

/// True when |Lambda| is below 1e-12 times the magnitude of the terms it is built from.
bool lambda_is_singular(const ProblemSpec& spec);

/// The existence budget; throws SingularLambda when Lambda vanishes.
double compute_sigma(const ProblemSpec& spec);

ExistenceCertificate check_existence(const ProblemSpec& spec);

/// Grid on [a, b] with every tau_i as an exact node.
GridPtr make_grid(const ProblemSpec& spec, std::size_t intervals, double grading = 2.0);

/// The linear functional
///
///     A(g) = [sum_i lambda_i I^{mu+delta_i} g(tau_i) - I^mu g(b)] / (Lambda Gamma(xi))
///
/// stored as one weight per grid node, applied to plain samples of g.
class ATildeFunctional {
public:
    ATildeFunctional(const ProblemSpec& spec, GridPtr grid);

    double operator()(std::span<const double> g_plain) const;
    std::span<const double> weights() const noexcept { return w_; }
    const GridPtr& grid() const noexcept { return grid_; }
    double lambda() const noexcept { return lambda_; }

private:
    GridPtr grid_;
    double lambda_;
    std::vector<double> w_;
};

/// A(g) for a single g; builds the functional on g's grid.
double compute_A_tilde(const ProblemSpec& spec, const GridFunction& g);

}  // namespace hilfer
