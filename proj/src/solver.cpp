#include "hilfer/solver.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

void SolverConfig::validate() const {
    if (grid_size < 2) throw DomainError("grid size must be at least 2");
    if (!(grading >= 1.0)) throw DomainError("grid grading must be >= 1");
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (outer_max_iters < 1 || inner_max_iters < 1) throw DomainError("iteration caps must be >= 1");
}

namespace {

double solve_node(const Expr& f, double t, double y, const SolverConfig& cfg, std::size_t node) {
    double slots[] = {t, y, 0.0};
    double g = f.eval(slots);
    for (std::size_t it = 0; it < cfg.inner_max_iters; ++it) {
        slots[2] = g;
        const double next = f.eval(slots);
        const double step = std::fabs(next - g);
        g = next;
        if (step <= cfg.inner_tol * std::fmax(1.0, std::fabs(g))) return g;
    }
    throw InnerDivergence("implicit equation g = f(t, y, g) did not converge at t = " + std::to_string(t) +
                              " (is f a contraction in d?)",
                          node);
}

GridFunction resolve(const ProblemSpec& spec, const GridFunction& y, const SolverConfig& cfg, bool parallel) {
    const std::vector<std::string> tyd{"t", "y", "d"};
    const ExprBuilder rebind(tyd);
    const Expr f = spec.f.variables() == tyd ? spec.f : rebind.build(rebind.import(spec.f));
    const PhiGrid& grid = y.grid_ref();
    const std::size_t n = grid.size();
    std::vector<double> g(n);
    std::vector<std::exception_ptr> errors(n);
    const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < rows; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            g[k] = solve_node(f, grid.t(k), y.plain_at(k), cfg, k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return GridFunction::plain(y.grid(), std::move(g));
}

}  // namespace

GridFunction resolve_g(const ProblemSpec& spec, const GridFunction& y, const SolverConfig& cfg) {
    return resolve(spec, y, cfg, true);
}

GridFunction resolve_g_serial(const ProblemSpec& spec, const GridFunction& y, const SolverConfig& cfg) {
    return resolve(spec, y, cfg, false);
}

// ---------------------------------------------------------------------------

IntegralEquation::IntegralEquation(const ProblemSpec& spec, const SolverConfig& cfg)
    : spec_(spec),
      cfg_(cfg),
      grid_((cfg.validate(), spec.validate(), make_grid(spec, cfg.grid_size, cfg.grading))),
      xi_(spec.xi()),
      atilde_(spec, grid_),
      int_mu_(grid_, spec.mu) {}

IntegralEquation::IntegralEquation(const ProblemSpec& spec, const SolverConfig& cfg, GridPtr grid)
    : spec_(spec),
      cfg_(cfg),
      grid_((cfg.validate(), spec.validate(), std::move(grid))),
      xi_(spec.xi()),
      atilde_(spec, grid_),
      int_mu_(grid_, spec.mu) {
    if (!(grid_->phi() == spec.phi) || grid_->a() != spec.a || grid_->b() != spec.b)
        throw DomainError("grid does not match the problem's phi and interval");
    for (const auto& bt : spec.boundary)
        if (grid_->t(grid_->nearest_index(bt.tau)) != bt.tau)
            throw DomainError("grid does not contain tau = " + std::to_string(bt.tau) + " as a node");
}

GridFunction IntegralEquation::assemble(const GridFunction& g, double* a_tilde_out) const {
    const double a = atilde_(g.values());
    if (a_tilde_out) *a_tilde_out = a;
    const auto ig = int_mu_.apply(g.values());
    std::vector<double> w(grid_->size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = grid_->offset(i);
        // (x^(xi-1) A + I g) x^(2-xi), with the first term simplified
        w[i] = i == 0 ? 0.0 : x * a + std::pow(x, 2.0 - xi_) * ig[i];
    }
    return GridFunction::weighted(grid_, std::move(w), xi_);
}

GridFunction IntegralEquation::apply(const GridFunction& y, GridFunction* g_out, double* a_tilde_out) const {
    auto g = resolve_g(spec_, y, cfg_);
    auto next = assemble(g, a_tilde_out);
    if (g_out) *g_out = std::move(g);
    return next;
}

GridFunction IntegralEquation::initial(InitialGuess guess) const {
    std::vector<double> w(grid_->size(), 0.0);
    if (guess == InitialGuess::BoundaryShape)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = grid_->offset(i);
    return GridFunction::weighted(grid_, std::move(w), xi_);
}

namespace {

double diff_norm(const GridFunction& x, const GridFunction& y, double xi) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::fmax(m, std::fabs(x.weighted_at(i, xi) - y.weighted_at(i, xi)));
    return m;
}

bool all_finite(const GridFunction& f) {
    for (double v : f.values())
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

Solution picard_solve(const ProblemSpec& spec, const SolverConfig& cfg) {
    return picard_solve(IntegralEquation(spec, cfg));
}

Solution picard_solve(const IntegralEquation& eq) {
    const auto& cfg = eq.config();
    const double xi = eq.xi();
    const auto cert = check_existence(eq.spec());

    GridFunction y = eq.initial(cfg.initial_guess);
    GridFunction g = GridFunction::plain(eq.grid(), std::vector<double>(eq.grid()->size(), 0.0));
    Solution sol{y, g};
    sol.certified = cert.passed();
    if (!sol.certified)
        sol.warning = "existence not certified (sigma = " + std::to_string(cert.sigma) + "); convergence is not guaranteed";

    double a_tilde = 0.0;
    for (std::size_t it = 1; it <= cfg.outer_max_iters; ++it) {
        GridFunction next = eq.apply(y, &g, &a_tilde);
        if (!all_finite(next)) throw OuterDivergence("Picard iterate became non-finite at iteration " + std::to_string(it));
        const double upd = diff_norm(next, y, xi);
        sol.update_norms.push_back(upd);
        y = std::move(next);
        sol.outer_iters = it;
        if (upd <= cfg.outer_tol) {
            sol.converged = true;
            break;
        }
    }
    sol.final_update_norm = sol.update_norms.back();

    if (!sol.converged) {
        double best = std::numeric_limits<double>::infinity();
        for (double u : sol.update_norms) best = std::fmin(best, u);
        if (sol.final_update_norm > 2.0 * best)
            throw OuterDivergence("Picard iteration diverged: update norm " + std::to_string(sol.final_update_norm) +
                                  " after " + std::to_string(sol.outer_iters) + " iterations (best " +
                                  std::to_string(best) + ")");
        if (!sol.warning.empty()) sol.warning += "; ";
        sol.warning += "iteration limit reached before outer_tol";
    }

    // self-consistency of the final iterate; g and A~ are taken from it
    GridFunction g_final = g;
    const GridFunction check = eq.apply(y, &g_final, &a_tilde);
    sol.residual = diff_norm(check, y, xi);
    sol.y = std::move(y);
    sol.g = std::move(g_final);
    sol.A_tilde = a_tilde;
    return sol;
}

BoundaryResiduals boundary_check(const ProblemSpec& spec, const Solution& sol) {
    const PhiGrid& grid = sol.y.grid_ref();
    const double xi = sol.xi();
    BoundaryResiduals r;

    // Linear extrapolation in s = Phi^(xi-1), the leading behaviour of plain y near a.
    const double s1 = std::pow(grid.offset(1), xi - 1.0), s2 = std::pow(grid.offset(2), xi - 1.0);
    const double y1 = sol.y.plain_at(1), y2 = sol.y.plain_at(2);
    r.left = std::fabs(y1 - (y2 - y1) / (s2 - s1) * s1);

    double rhs = 0.0;
    for (const auto& bt : spec.boundary)
        rhs += bt.lambda * frac_integral_weighted(sol.y, xi, bt.delta, grid.nearest_index(bt.tau));
    r.right = std::fabs(sol.y.plain_at(grid.size() - 1) - rhs);
    return r;
}

}  // namespace hilfer
