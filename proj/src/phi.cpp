#include "hilfer/phi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "hilfer/errors.hpp"

namespace hilfer {

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(PhiFamily f) {
    switch (f) {
        case PhiFamily::Identity: return "identity";
        case PhiFamily::LogShift: return "log_shift";
        case PhiFamily::PowerRho: return "power_rho";
        case PhiFamily::Custom: return "custom";
    }
    return "?";
}

PhiFunction::PhiFunction(PhiFamily f, double param, Expr phi, Expr phi_prime)
    : family_(f), param_(param), phi_(std::move(phi)), phi_prime_(std::move(phi_prime)) {}

PhiFunction PhiFunction::identity() {
    return {PhiFamily::Identity, 0.0, Expr::parse("t", {"t"}), Expr::parse("1", {"t"})};
}

PhiFunction PhiFunction::log_shift(double shift) {
    if (!std::isfinite(shift)) throw DomainError("log_shift: shift must be finite");
    const std::string arg = shift == 0.0 ? "1 + t" : "1 + t - " + num(shift);
    return {PhiFamily::LogShift, shift, Expr::parse("log(" + arg + ")", {"t"}),
            Expr::parse("1/(" + arg + ")", {"t"})};
}

PhiFunction PhiFunction::power(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("power_rho: rho must be positive");
    return {PhiFamily::PowerRho, rho, Expr::parse("t^" + num(rho), {"t"}),
            Expr::parse(num(rho) + "*t^(" + num(rho) + " - 1)", {"t"})};
}

PhiFunction PhiFunction::custom(Expr phi, Expr phi_prime) {
    for (const auto* e : {&phi, &phi_prime})
        for (const auto& v : e->free_variables())
            if (v != "t") throw UnknownIdentifier(v, 0);
    return {PhiFamily::Custom, 0.0, std::move(phi), std::move(phi_prime)};
}

double PhiFunction::value(double t) const {
    switch (family_) {
        case PhiFamily::Identity: return t;
        case PhiFamily::LogShift:
            if (!(t - param_ > -1.0)) throw DomainError("log_shift: t below shift - 1");
            return std::log1p(t - param_);
        case PhiFamily::PowerRho:
            if (t < 0.0) throw DomainError("power_rho: negative t");
            return std::pow(t, param_);
        case PhiFamily::Custom: {
            const double s[] = {t};
            return phi_.eval(s);
        }
    }
    return t;
}

double PhiFunction::derivative(double t) const {
    switch (family_) {
        case PhiFamily::Identity: return 1.0;
        case PhiFamily::LogShift: return 1.0 / (1.0 + (t - param_));
        case PhiFamily::PowerRho:
            if (t == 0.0) return param_ == 1.0 ? 1.0 : (param_ < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
            return param_ * std::pow(t, param_ - 1.0);
        case PhiFamily::Custom: {
            const double s[] = {t};
            return phi_prime_.eval(s);
        }
    }
    return 1.0;
}

double PhiFunction::inverse(double u, double a, double b) const {
    switch (family_) {
        case PhiFamily::Identity: return std::clamp(u, a, b);
        case PhiFamily::LogShift: return std::clamp(param_ + std::expm1(u), a, b);
        case PhiFamily::PowerRho: return std::clamp(std::pow(u, 1.0 / param_), a, b);
        case PhiFamily::Custom: break;
    }
    double lo = a, hi = b;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (value(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void PhiFunction::validate_on(double a, double b, std::size_t samples) const {
    if (!(a < b)) throw DomainError("phi: interval requires a < b");
    samples = std::max<std::size_t>(samples, 2);
    double prev = value(a);
    for (std::size_t i = 1; i <= samples; ++i) {
        const double t = i == samples ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(samples);
        const double v = value(t);
        if (!std::isfinite(v)) throw DomainError("phi is not finite at t = " + num(t));
        if (!(v > prev)) throw DomainError("phi is not strictly increasing near t = " + num(t));
        prev = v;
    }
}

bool operator==(const PhiFunction& x, const PhiFunction& y) {
    if (x.family_ != y.family_) return false;
    if (x.family_ == PhiFamily::Custom) return x.phi_ == y.phi_ && x.phi_prime_ == y.phi_prime_;
    return x.param_ == y.param_;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const PhiGrid> PhiGrid::build(const PhiFunction& phi, double a, double b,
                                              const GridOptions& opts) {
    const std::size_t n = opts.intervals;
    if (n < 2) throw DomainError("grid needs at least 2 intervals");
    if (!(opts.grading >= 1.0)) throw DomainError("grid grading exponent must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw DomainError("grid requires finite a < b");
    phi.validate_on(a, b, std::max<std::size_t>(4 * n, 64));

    std::shared_ptr<PhiGrid> g(new PhiGrid(phi, opts.grading));
    const double ua = phi.value(a);
    const double span = phi.value(b) - ua;

    g->offset_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g->offset_[i] = span * std::pow(static_cast<double>(i) / static_cast<double>(n), opts.grading);
    g->offset_[n] = span;

    std::vector<double> pinned_t(n + 1, std::numeric_limits<double>::quiet_NaN());
    pinned_t[0] = a;
    pinned_t[n] = b;
    for (double tau : opts.pinned) {
        if (!(tau >= a && tau <= b)) throw DomainError("pinned node " + num(tau) + " outside [a, b]");
        if (tau == a || tau == b) continue;
        const double off = phi.value(tau) - ua;
        auto it = std::lower_bound(g->offset_.begin(), g->offset_.end(), off);
        std::size_t i = static_cast<std::size_t>(it - g->offset_.begin());
        if (i > 0 && (i > n || off - g->offset_[i - 1] < g->offset_[i] - off)) --i;
        i = std::clamp<std::size_t>(i, 1, n - 1);
        if (!std::isnan(pinned_t[i]) && pinned_t[i] != tau)
            throw DomainError("pinned nodes " + num(pinned_t[i]) + " and " + num(tau) +
                              " collide at this grid resolution");
        pinned_t[i] = tau;
        g->offset_[i] = off;
    }

    g->t_.resize(n + 1);
    g->u_.resize(n + 1);
    g->dphi_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        g->t_[i] = std::isnan(pinned_t[i]) ? phi.inverse(ua + g->offset_[i], a, b) : pinned_t[i];
        g->u_[i] = ua + g->offset_[i];
        g->dphi_[i] = phi.derivative(g->t_[i]);
        if (!(g->dphi_[i] > 0.0)) throw DomainError("phi' is not positive at t = " + num(g->t_[i]));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        if (!(g->offset_[i] > g->offset_[i - 1]) || !(g->t_[i] > g->t_[i - 1]))
            throw DomainError("grid nodes are not strictly increasing at index " + std::to_string(i) +
                              " (refine the grid or check phi)");
    }
    return g;
}

std::shared_ptr<const PhiGrid> PhiGrid::refine(std::size_t factor) const {
    if (factor < 1) throw DomainError("refinement factor must be >= 1");
    const std::size_t n = intervals();
    std::shared_ptr<PhiGrid> g(new PhiGrid(phi_, grading_));
    const double ua = u_.front();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < factor; ++k) {
            if (k == 0) {
                g->offset_.push_back(offset_[i]);
                g->t_.push_back(t_[i]);
            } else {
                const double off = offset_[i] + (offset_[i + 1] - offset_[i]) * static_cast<double>(k) /
                                                     static_cast<double>(factor);
                g->offset_.push_back(off);
                g->t_.push_back(phi_.inverse(ua + off, t_[i], t_[i + 1]));
            }
        }
    }
    g->offset_.push_back(offset_.back());
    g->t_.push_back(t_.back());
    for (std::size_t i = 0; i < g->t_.size(); ++i) {
        g->u_.push_back(ua + g->offset_[i]);
        g->dphi_.push_back(phi_.derivative(g->t_[i]));
    }
    return g;
}

std::size_t PhiGrid::nearest_index(double t) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), t);
    if (it == t_.end()) return t_.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    if (i > 0 && t - t_[i - 1] < t_[i] - t) --i;
    return i;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(GridPtr grid, std::vector<double> values, Representation rep, double xi)
    : grid_(std::move(grid)), values_(std::move(values)), rep_(rep), xi_(xi) {
    if (!grid_) throw DomainError("grid function needs a grid");
    if (values_.size() != grid_->size())
        throw DomainError("grid function has " + std::to_string(values_.size()) + " values for " +
                          std::to_string(grid_->size()) + " nodes");
}

GridFunction GridFunction::plain(GridPtr grid, std::vector<double> values) {
    return {std::move(grid), std::move(values), Representation::Plain, 2.0};
}

GridFunction GridFunction::weighted(GridPtr grid, std::vector<double> values, double xi) {
    if (!(xi > 1.0 && xi <= 2.0)) throw DomainError("weighted representation needs 1 < xi <= 2");
    return {std::move(grid), std::move(values), Representation::Weighted, xi};
}

double GridFunction::plain_at(std::size_t i) const {
    if (rep_ == Representation::Plain || xi_ == 2.0) return values_[i];
    if (i == 0) {
        if (values_[0] == 0.0) return 0.0;
        return std::copysign(std::numeric_limits<double>::infinity(), values_[0]);
    }
    return std::pow(grid_->offset(i), xi_ - 2.0) * values_[i];
}

double GridFunction::weighted_at(std::size_t i, double xi) const {
    if (rep_ == Representation::Weighted) {
        if (xi == xi_) return values_[i];
        if (i > 0) return std::pow(grid_->offset(i), xi_ - xi) * values_[i];
        if (xi_ > xi || values_[0] == 0.0) return 0.0;
        throw DomainError("cannot reweight a function that is singular at t = a");
    }
    if (xi == 2.0) return values_[i];
    if (i > 0) return std::pow(grid_->offset(i), 2.0 - xi) * values_[i];
    if (std::isfinite(values_[0])) return 0.0;
    return weighted_at(1, xi);
}

GridFunction GridFunction::to_plain() const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = plain_at(i);
    return plain(grid_, std::move(v));
}

GridFunction GridFunction::to_weighted(double xi) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = weighted_at(i, xi);
    return weighted(grid_, std::move(v), xi);
}

void GridFunction::require_compatible(const GridFunction& o) const {
    if (grid_ != o.grid_) throw DomainError("grid functions live on different grids");
    if (rep_ != o.rep_ || (rep_ == Representation::Weighted && xi_ != o.xi_))
        throw DomainError("grid functions have different representations");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

}  // namespace hilfer
