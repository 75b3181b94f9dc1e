#include "hilfer/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hilfer/errors.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

std::string to_string(StabilityKind k) {
    switch (k) {
        case StabilityKind::UlamHyers: return "ulam_hyers";
        case StabilityKind::GeneralizedUH: return "generalized_uh";
        case StabilityKind::UlamHyersRassias: return "ulam_hyers_rassias";
        case StabilityKind::GeneralizedUHR: return "generalized_uhr";
    }
    return "?";
}

StabilityKind parse_stability_kind(const std::string& s) {
    if (s == "uh" || s == "ulam_hyers") return StabilityKind::UlamHyers;
    if (s == "generalized_uh") return StabilityKind::GeneralizedUH;
    if (s == "rassias" || s == "uhr" || s == "ulam_hyers_rassias") return StabilityKind::UlamHyersRassias;
    if (s == "generalized_uhr") return StabilityKind::GeneralizedUHR;
    throw DomainError("unknown stability kind '" + s + "'");
}

GridFunction gronwall_bound(const GridFunction& v, double g_const, double mu, const PhiFunction& phi) {
    if (!(g_const >= 0.0)) throw DomainError("gronwall_bound: g must be nonnegative");
    if (!(mu > 0.0)) throw DomainError("gronwall_bound: mu must be positive");
    const PhiGrid& grid = v.grid_ref();
    const bool same_phi = phi == grid.phi();
    const double ua = phi.value(grid.a());
    const double scale = g_const * gamma(mu);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double vi = v.plain_at(i);
        if (i > 0 && vi < v.plain_at(i - 1))
            throw DomainError("gronwall_bound: v decreases at t = " + std::to_string(grid.t(i)));
        const double x = same_phi ? grid.offset(i) : phi.value(grid.t(i)) - ua;
        out[i] = vi * mittag_leffler(mu, scale * std::pow(x, mu));
    }
    return GridFunction::plain(v.grid(), std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

double node_defect(const Expr& f, double t, double z, double h) {
    const double slots[] = {t, z, h};
    return h - f.eval(slots);
}

Expr f_tyd(const ProblemSpec& spec) {
    const std::vector<std::string> tyd{"t", "y", "d"};
    if (spec.f.variables() == tyd) return spec.f;
    const ExprBuilder b(tyd);
    return b.build(b.import(spec.f));
}

void finish_defect(const ProblemSpec& spec, const GridFunction& z, Defect& d, const std::vector<double>* chi) {
    const PhiGrid& grid = z.grid_ref();
    const Expr f = f_tyd(spec);
    d.w.resize(grid.size());
    d.epsilon = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        d.w[i] = node_defect(f, grid.t(i), z.plain_at(i), d.derivative[i]);
        const double level = chi ? std::fabs(d.w[i]) / (*chi)[i] : std::fabs(d.w[i]);
        d.epsilon = std::fmax(d.epsilon, level);
    }
}

}  // namespace

Defect measure_defect(const IntegralEquation& eq, const GridFunction& z, const std::vector<double>* chi,
                      const DefectOptions& opts) {
    const GridPtr& grid = eq.grid();
    if (z.grid() != grid) throw DomainError("measure_defect: z lives on a different grid");
    const std::size_t n = grid->size();
    const std::size_t m = opts.degree + 1;
    if (n < m + 2) throw DomainError("measure_defect: grid too coarse for the requested degree");
    if (chi && chi->size() != n) throw DomainError("measure_defect: chi has the wrong size");
    const double xi = eq.xi();

    GridFunction g = GridFunction::plain(grid, std::vector<double>(n, 0.0));
    const GridFunction tz = eq.apply(z, &g);

    // e = z - T(z), weighted
    Eigen::VectorXd e(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) e(static_cast<Eigen::Index>(i)) = z.weighted_at(i, xi) - tz[i];

    // Chebyshev basis in u on [0, span]
    const double span = grid->offset(n - 1);
    Eigen::MatrixXd cheb(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * grid->offset(i) / span - 1.0;
        const auto r = static_cast<Eigen::Index>(i);
        cheb(r, 0) = 1.0;
        if (m > 1) cheb(r, 1) = x;
        for (std::size_t k = 2; k < m; ++k) {
            const auto c = static_cast<Eigen::Index>(k);
            cheb(r, c) = 2.0 * x * cheb(r, c - 1) - cheb(r, c - 2);
        }
    }

    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m + 1));
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), 0) = grid->offset(i);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) col[i] = cheb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        const auto ic = eq.integral().apply(col);
        for (std::size_t i = 0; i < n; ++i)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k + 1)) =
                i == 0 ? 0.0 : std::pow(grid->offset(i), 2.0 - xi) * ic[i];
    }

    Eigen::VectorXd scale = a.colwise().lpNorm<Eigen::Infinity>().transpose();
    for (Eigen::Index c = 0; c < scale.size(); ++c)
        if (scale(c) == 0.0) scale(c) = 1.0;
    const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
    const Eigen::VectorXd coef = as.colPivHouseholderQr().solve(e).cwiseQuotient(scale);

    Defect d;
    d.fit_residual = (a * coef - e).lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd q = cheb * coef.tail(static_cast<Eigen::Index>(m));
    d.derivative.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.derivative[i] = g[i] + q(static_cast<Eigen::Index>(i));
    finish_defect(eq.spec(), z, d, chi);
    return d;
}

Defect measure_defect_known(const ProblemSpec& spec, const GridFunction& z, std::vector<double> derivative,
                            const std::vector<double>* chi) {
    if (derivative.size() != z.size()) throw DomainError("measure_defect: derivative has the wrong size");
    if (chi && chi->size() != z.size()) throw DomainError("measure_defect: chi has the wrong size");
    Defect d;
    d.derivative = std::move(derivative);
    finish_defect(spec, z, d, chi);
    return d;
}

double residual_epsilon(const ProblemSpec& spec, const GridFunction& z, const SolverConfig& cfg) {
    const IntegralEquation eq(spec, cfg, z.grid());
    return measure_defect(eq, z).epsilon;
}

// ---------------------------------------------------------------------------

namespace {

double stability_factor(const ProblemSpec& spec) {
    if (!(spec.L < 1.0)) throw DomainError("stability constants require L < 1");
    return mittag_leffler(spec.mu, spec.K / (1.0 - spec.L) * std::pow(spec.span(), spec.mu));
}

}  // namespace

double ulam_hyers_constant(const ProblemSpec& spec) {
    const double e = stability_factor(spec);
    return std::pow(spec.span(), spec.mu + 2.0 - spec.xi()) / gamma(spec.mu + 1.0) * e;
}

double ulam_hyers_rassias_constant(const ProblemSpec& spec, double K_star) {
    const double e = stability_factor(spec);
    if (!(K_star >= 0.0)) throw DomainError("K* must be nonnegative");
    return K_star * std::pow(spec.span(), 2.0 - spec.xi()) * e;
}

std::vector<double> sample_chi(const Expr& chi, const PhiGrid& grid) {
    for (const auto& v : chi.free_variables())
        if (v != "t") throw DomainError("chi may only reference t");
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = chi.eval({{"t", grid.t(i)}});
        if (!(out[i] > 0.0)) throw DomainError("chi must be positive; chi(" + std::to_string(grid.t(i)) + ") = " +
                                               std::to_string(out[i]));
    }
    return out;
}

KStarCheck verify_K_star(const ProblemSpec& spec, const Expr& chi, double K_star, std::size_t grid_size) {
    return verify_K_star(spec, chi, K_star, make_grid(spec, grid_size));
}

KStarCheck verify_K_star(const ProblemSpec& spec, const Expr& chi, double K_star, const GridPtr& grid) {
    const auto c = sample_chi(chi, *grid);
    const auto ic = FracIntegralOperator(grid, spec.mu).apply(c);
    KStarCheck r;
    r.passed = true;
    for (std::size_t i = 1; i < c.size(); ++i) {
        r.worst_ratio = std::fmax(r.worst_ratio, ic[i] / c[i]);
        if (ic[i] > K_star * c[i] * (1.0 + 1e-9)) r.passed = false;
        if (c[i] < c[i - 1]) r.chi_nondecreasing = false;
    }
    return r;
}

// ---------------------------------------------------------------------------

StabilityCertificate certify(const ProblemSpec& spec, const GridFunction& z, StabilityKind kind,
                             const std::optional<Expr>& chi, const CertifyOptions& opts) {
    const IntegralEquation eq(spec, opts.solver, z.grid());
    const Solution y = picard_solve(eq);
    return certify(eq, y, z, kind, chi, opts);
}

StabilityCertificate certify(const IntegralEquation& eq, const Solution& y, const GridFunction& z,
                             StabilityKind kind, const std::optional<Expr>& chi, const CertifyOptions& opts) {
    const ProblemSpec& spec = eq.spec();
    const GridPtr& grid = eq.grid();
    if (z.grid() != grid || y.y.grid() != grid) throw DomainError("certify: z and y must share the problem grid");
    const double xi = eq.xi();
    const std::size_t n = grid->size();

    StabilityCertificate c;
    c.kind = kind;

    std::vector<double> chi_vals;
    if (is_rassias(kind)) {
        if (!chi) throw DomainError("Ulam-Hyers-Rassias certificates need a weight chi");
        chi_vals = sample_chi(*chi, *grid);
    }
    const std::vector<double>* chi_ptr = is_rassias(kind) ? &chi_vals : nullptr;

    const Defect d = opts.derivative ? measure_defect_known(spec, z, *opts.derivative, chi_ptr)
                                     : measure_defect(eq, z, chi_ptr, opts.defect);
    c.epsilon_measured = d.epsilon;
    c.fit_residual = d.fit_residual;
    c.epsilon = kind == StabilityKind::GeneralizedUHR ? std::fmax(1.0, d.epsilon)
                                                      : std::fmax(d.epsilon, opts.user_epsilon);

    if (is_rassias(kind)) {
        const auto check = verify_K_star(spec, *chi, opts.K_star.value_or(0.0), grid);
        c.K_star = opts.K_star.value_or(check.worst_ratio);
        c.K_star_verified = opts.K_star ? check.passed : true;
        c.C = ulam_hyers_rassias_constant(spec, *c.K_star);
    } else {
        c.C = ulam_hyers_constant(spec);
    }

    c.observed_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double lhs = std::fabs(z.weighted_at(i, xi) - y.y.weighted_at(i, xi));
        c.deviation = std::fmax(c.deviation, lhs);
        if (is_rassias(kind)) {
            const double rhs = c.epsilon * c.C * chi_vals[i];
            if (rhs - lhs < c.observed_gap) {
                c.observed_gap = rhs - lhs;
                c.bound = rhs;
            }
        }
    }
    if (!is_rassias(kind)) {
        c.bound = c.C * c.epsilon;
        c.observed_gap = c.bound - c.deviation;
    }
    c.bound_holds = c.observed_gap >= 0.0;
    return c;
}

}  // namespace hilfer
