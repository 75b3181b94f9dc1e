#pragma once

#include <string>
#include <vector>

#include "hilfer/bvp.hpp"
#include "hilfer/frac_ops.hpp"

namespace hilfer {

enum class InitialGuess { Zero, BoundaryShape };

struct SolverConfig {
    std::size_t grid_size = 1024;
    double grading = 2.0;
    double outer_tol = 1e-10;
    std::size_t outer_max_iters = 200;
    double inner_tol = 1e-12;
    std::size_t inner_max_iters = 100;
    InitialGuess initial_guess = InitialGuess::Zero;

    void validate() const;
    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct Solution {
    Solution(GridFunction y0, GridFunction g0) : y(std::move(y0)), g(std::move(g0)) {}

    GridFunction y;  // weighted with the problem's xi
    GridFunction g;  // plain
    double A_tilde = 0.0;
    std::size_t outer_iters = 0;
    bool converged = false;
    double final_update_norm = 0.0;
    double residual = 0.0;
    std::vector<double> update_norms;  // one entry per outer iteration
    bool certified = false;            // check_existence passed before solving
    std::string warning;

    double xi() const { return y.xi(); }
};

/// Pointwise g(t_i) = f(t_i, y(t_i), g(t_i)) by direct iteration, starting at
/// f(t_i, y(t_i), 0). `y` may be plain or weighted. Parallel over nodes.
GridFunction resolve_g(const ProblemSpec& spec, const GridFunction& y, const SolverConfig& cfg);
GridFunction resolve_g_serial(const ProblemSpec& spec, const GridFunction& y, const SolverConfig& cfg);

/// Reusable pieces of one discretised problem: the grid, I^mu and the A~ functional.
class IntegralEquation {
public:
    IntegralEquation(const ProblemSpec& spec, const SolverConfig& cfg);
    /// Uses an existing grid (which must carry every tau_i as a node).
    IntegralEquation(const ProblemSpec& spec, const SolverConfig& cfg, GridPtr grid);

    const ProblemSpec& spec() const noexcept { return spec_; }
    const SolverConfig& config() const noexcept { return cfg_; }
    const GridPtr& grid() const noexcept { return grid_; }
    double xi() const noexcept { return xi_; }
    const ATildeFunctional& a_tilde() const noexcept { return atilde_; }
    const FracIntegralOperator& integral() const noexcept { return int_mu_; }

    /// (phi - phi(a))^(xi-1) A(g) + I^mu g, in weighted form.
    GridFunction assemble(const GridFunction& g, double* a_tilde_out = nullptr) const;
    /// One step y -> assemble(resolve_g(y)); the returned g is stored if asked.
    GridFunction apply(const GridFunction& y, GridFunction* g_out = nullptr, double* a_tilde_out = nullptr) const;

    GridFunction initial(InitialGuess guess) const;

private:
    ProblemSpec spec_;
    SolverConfig cfg_;
    GridPtr grid_;
    double xi_;
    ATildeFunctional atilde_;
    FracIntegralOperator int_mu_;
};

/// Picard iteration on the integral equation. Throws OuterDivergence when the
/// iteration limit is hit with update norms growing (or non-finite values).
Solution picard_solve(const ProblemSpec& spec, const SolverConfig& cfg);
Solution picard_solve(const IntegralEquation& eq);

struct BoundaryResiduals {
    double left = 0.0;
    double right = 0.0;
};

/// left: |y extrapolated linearly to t = a|; right: |y(b) - sum_i lambda_i I^delta_i y(tau_i)|.
BoundaryResiduals boundary_check(const ProblemSpec& spec, const Solution& sol);

}  // namespace hilfer
