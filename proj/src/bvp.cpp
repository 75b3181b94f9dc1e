#include "hilfer/bvp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hilfer/errors.hpp"
#include "hilfer/frac_ops.hpp"
#include "hilfer/special.hpp"

namespace hilfer {

namespace {

const std::vector<std::string> kFVars{"t", "y", "d"};

// Lambda's two pieces: the b term and the boundary sum.
struct LambdaParts {
    double head;
    double sum;
};

LambdaParts lambda_parts(const ProblemSpec& s) {
    const double xi = s.xi();
    LambdaParts p{std::pow(s.span(), xi - 1.0) / gamma(xi), 0.0};
    for (const auto& bt : s.boundary)
        p.sum += bt.lambda / gamma(xi + bt.delta) * std::pow(s.offset(bt.tau), xi + bt.delta - 1.0);
    return p;
}

}  // namespace

void ProblemSpec::validate() const {
    auto bad = [](const std::string& m) { throw DomainError(m); };
    if (!(mu > 1.0 && mu < 2.0)) bad("mu must satisfy 1 < mu < 2");
    if (!(nu >= 0.0 && nu <= 1.0)) bad("nu must satisfy 0 <= nu <= 1");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) bad("interval requires finite a < b");
    if (!(K > 0.0) || !std::isfinite(K)) bad("K must be positive");
    if (!(L > 0.0 && L < 1.0)) bad("L must satisfy 0 < L < 1");
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const auto& bt = boundary[i];
        const std::string which = "boundary term " + std::to_string(i + 1) + ": ";
        if (!std::isfinite(bt.lambda)) bad(which + "lambda must be finite");
        if (!(bt.delta > 0.0) || !std::isfinite(bt.delta)) bad(which + "delta must be positive");
        if (!(bt.tau >= a && bt.tau <= b)) bad(which + "tau must lie in [a, b]");
        if (i > 0 && !(bt.tau > boundary[i - 1].tau)) bad(which + "tau values must be strictly increasing");
    }
    for (const auto& v : f.free_variables())
        if (v != "t" && v != "y" && v != "d") bad("f may only reference t, y and d");
    phi.validate_on(a, b, 256);
}

double ProblemSpec::xi() const { return mu + nu * (2.0 - mu); }

bool operator==(const ProblemSpec& x, const ProblemSpec& y) {
    return x.mu == y.mu && x.nu == y.nu && x.phi == y.phi && x.a == y.a && x.b == y.b &&
           x.boundary == y.boundary && x.f == y.f && x.K == y.K && x.L == y.L;
}

double compute_xi(double mu, double nu) {
    if (!(mu > 1.0 && mu < 2.0)) throw DomainError("compute_xi: mu must satisfy 1 < mu < 2");
    if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("compute_xi: nu must satisfy 0 <= nu <= 1");
    return mu + nu * (2.0 - mu);
}

double compute_lambda(const ProblemSpec& spec) {
    const auto p = lambda_parts(spec);
    return p.head - p.sum;
}

double compute_omega(const ProblemSpec& spec) {
    const double xi = spec.xi(), mu = spec.mu, span = spec.span();
    double omega = 1.0 / gamma(xi + mu - 1.0);
    for (const auto& bt : spec.boundary)
        omega += bt.lambda * std::pow(span, bt.delta) / gamma(xi + mu + bt.delta - 1.0);
    return omega;
}

bool lambda_is_singular(const ProblemSpec& spec) {
    const auto p = lambda_parts(spec);
    const double scale = std::fmax(1.0, std::fmax(std::fabs(p.head), std::fabs(p.sum)));
    return std::fabs(p.head - p.sum) < 1e-12 * scale;
}

double compute_sigma(const ProblemSpec& spec) {
    if (lambda_is_singular(spec)) throw SingularLambda("Lambda vanishes; the boundary problem is not well posed");
    const double xi = spec.xi(), mu = spec.mu, span = spec.span();
    const double lambda = compute_lambda(spec);
    const double lead = spec.K * gamma(xi - 1.0) * std::pow(span, mu) / (1.0 - spec.L);
    const double brace =
        std::pow(span, xi - 1.0) / (gamma(xi) * std::fabs(lambda)) * compute_omega(spec) + 1.0 / gamma(xi + mu - 1.0);
    return lead * brace;
}

ExistenceCertificate check_existence(const ProblemSpec& spec) {
    ExistenceCertificate c;
    c.xi = spec.xi();
    c.Lambda = compute_lambda(spec);
    c.Omega = compute_omega(spec);
    c.lambda_nonzero = !lambda_is_singular(spec);
    c.L_lt_one = spec.L < 1.0;
    c.sigma = c.lambda_nonzero && c.L_lt_one ? compute_sigma(spec) : std::numeric_limits<double>::infinity();
    c.sigma_lt_one = c.sigma < 1.0;
    return c;
}

GridPtr make_grid(const ProblemSpec& spec, std::size_t intervals, double grading) {
    GridOptions o{intervals, grading, {}};
    for (const auto& bt : spec.boundary) o.pinned.push_back(bt.tau);
    return PhiGrid::build(spec.phi, spec.a, spec.b, o);
}

ATildeFunctional::ATildeFunctional(const ProblemSpec& spec, GridPtr grid) : grid_(std::move(grid)) {
    if (lambda_is_singular(spec)) throw SingularLambda("Lambda vanishes; A~ is undefined");
    lambda_ = compute_lambda(spec);
    const std::size_t n = grid_->size();
    const double scale = 1.0 / (lambda_ * gamma(spec.xi()));
    w_.assign(n, 0.0);
    for (const auto& bt : spec.boundary) {
        const std::size_t k = grid_->nearest_index(bt.tau);
        const auto row = integral_weights(*grid_, spec.mu + bt.delta, k);
        for (std::size_t j = 0; j <= k; ++j) w_[j] += bt.lambda * row[j];
    }
    const auto last = integral_weights(*grid_, spec.mu, n - 1);
    for (std::size_t j = 0; j < n; ++j) w_[j] = (w_[j] - last[j]) * scale;
}

double ATildeFunctional::operator()(std::span<const double> g_plain) const {
    if (g_plain.size() != w_.size()) throw DomainError("A~: sample count does not match grid");
    double s = 0.0;
    for (std::size_t j = 0; j < w_.size(); ++j) s += w_[j] * g_plain[j];
    return s;
}

double compute_A_tilde(const ProblemSpec& spec, const GridFunction& g) {
    if (!g.is_weighted() || g.xi() == 2.0) return ATildeFunctional(spec, g.grid())(g.values());
    // g may be unbounded at a; integrate its weighted form directly
    if (lambda_is_singular(spec)) throw SingularLambda("Lambda vanishes; A~ is undefined");
    const PhiGrid& grid = g.grid_ref();
    double s = -frac_integral(g, spec.mu, grid.size() - 1);
    for (const auto& bt : spec.boundary) s += bt.lambda * frac_integral(g, spec.mu + bt.delta, grid.nearest_index(bt.tau));
    return s / (compute_lambda(spec) * gamma(spec.xi()));
}

}  // namespace hilfer
