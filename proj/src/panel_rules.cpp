#include "panel_rules.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hilfer::detail {

namespace {

constexpr int kGaussPoints = 16;

struct GaussLegendre {
    std::array<double, kGaussPoints> x{}, w{};
    GaussLegendre() {
        constexpr int n = kGaussPoints;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-17) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

const GaussLegendre& gauss() {
    static const GaussLegendre g;
    return g;
}

double beta_fn(double p, double q) { return std::exp(std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q)); }

// int_0^x s (1 - s)^(mu - 1) ds, accurate also for small x.
double hat_moment(double x, double r, double mu) {
    if (x <= 0.25) {
        double sum = 0.0, c = 1.0, xp = x * x;
        for (int n = 0; n < 200; ++n) {
            const double term = c * xp / (n + 2);
            sum += term;
            if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
            c *= -(mu - 1.0 - n) / (n + 1.0);
            xp *= x;
        }
        return sum;
    }
    return (1.0 - std::pow(r, mu)) / mu - (1.0 - std::pow(r, mu + 1.0)) / (mu + 1.0);
}

struct Moments {
    double m0;    // int K
    double mref;  // int K (x - ref)
};

// Integrals of K(x) = x^beta (D - x)^alpha over [x0, x1], 0 <= x0 < x1 <= D.
class SingularMoments {
public:
    SingularMoments(double D, double alpha, double beta) : D_(D), alpha_(alpha), beta_(beta) {}

    Moments operator()(double x0, double x1, double ref, int depth = 0) const {
        const bool left = x0 == 0.0;
        const bool right = x1 == D_;
        const double half = 0.5 * D_;
        if (left && right) {
            const double s = std::pow(D_, alpha_ + beta_ + 1.0);
            const double m0 = s * beta_fn(beta_ + 1.0, alpha_ + 1.0);
            const double m1 = s * D_ * beta_fn(beta_ + 2.0, alpha_ + 1.0);
            if (ref == D_) return {m0, -s * D_ * beta_fn(beta_ + 1.0, alpha_ + 2.0)};
            return {m0, m1 - ref * m0};
        }
        if (left) {
            if (x1 <= half) return left_series(x1, ref);
            return add(left_series(half, ref), (*this)(half, x1, ref, depth + 1));
        }
        if (right) {
            if (D_ - x0 <= half) return right_series(x0, ref);
            return add((*this)(x0, half, ref, depth + 1), right_series(half, ref));
        }
        const double gap = std::fmin(x0, D_ - x1);
        if (x1 - x0 <= 2.0 * gap || depth > 60) return gauss_panel(x0, x1, ref);
        const double mid = 0.5 * (x0 + x1);
        return add((*this)(x0, mid, ref, depth + 1), (*this)(mid, x1, ref, depth + 1));
    }

private:
    static Moments add(Moments a, Moments b) { return {a.m0 + b.m0, a.mref + b.mref}; }

    Moments gauss_panel(double x0, double x1, double ref) const {
        const auto& g = gauss();
        const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
        double m0 = 0.0, mr = 0.0;
        for (int i = 0; i < kGaussPoints; ++i) {
            const double x = c + h * g.x[i];
            const double k = g.w[i] * std::pow(x, beta_) * std::pow(D_ - x, alpha_);
            m0 += k;
            mr += k * (x - ref);
        }
        return {h * m0, h * mr};
    }

    // [0, x1] with x1 <= D/2: expand (D - x)^alpha = D^alpha sum_n binom(alpha, n) (-x/D)^n.
    Moments left_series(double x1, double ref) const {
        double t0 = 0.0, t1 = 0.0, c = 1.0, ratio = 1.0;
        const double q = x1 / D_;
        for (int n = 0; n < 400; ++n) {
            const double a0 = c * ratio / (beta_ + n + 1.0);
            const double a1 = c * ratio * x1 / (beta_ + n + 2.0);
            t0 += a0;
            t1 += a1;
            if (std::fabs(a0) <= 1e-18 * std::fabs(t0) && std::fabs(a1) <= 1e-18 * std::fabs(t1)) break;
            c *= -(alpha_ - n) / (n + 1.0);
            ratio *= q;
        }
        const double scale = std::pow(D_, alpha_) * std::pow(x1, beta_ + 1.0);
        t0 *= scale;
        t1 *= scale;
        return {t0, t1 - ref * t0};
    }

    // [x0, D] with D - x0 <= D/2: in v = D - x expand (D - v)^beta.
    Moments right_series(double x0, double ref) const {
        const double w = D_ - x0;
        const double q = w / D_;
        double t0 = 0.0, t1 = 0.0, c = 1.0, ratio = 1.0;
        for (int n = 0; n < 400; ++n) {
            const double a0 = c * ratio / (alpha_ + n + 1.0);
            const double a1 = c * ratio * w / (alpha_ + n + 2.0);
            t0 += a0;
            t1 += a1;
            if (std::fabs(a0) <= 1e-18 * std::fabs(t0) && std::fabs(a1) <= 1e-18 * std::fabs(t1)) break;
            c *= -(beta_ - n) / (n + 1.0);
            ratio *= q;
        }
        const double scale = std::pow(D_, beta_) * std::pow(w, alpha_ + 1.0);
        t0 *= scale;  // int v^alpha (D - v)^beta
        t1 *= scale;  // int v^(alpha+1) (D - v)^beta
        // x - ref = (D - ref) - v
        return {t0, (D_ - ref) * t0 - t1};
    }

    double D_, alpha_, beta_;
};

}  // namespace

PanelWeights plain_panel(double dist, double width, double mu) {
    const double x = width / dist;  // in (0, 1]
    const double r = (dist - width) / dist;
    const double m0 = x >= 1.0 ? std::pow(dist, mu) / mu
                               : -std::pow(dist, mu) * std::expm1(mu * std::log1p(-x)) / mu;
    const double g = x >= 1.0 ? 1.0 / mu - 1.0 / (mu + 1.0) : hat_moment(x, r, mu);
    const double right = std::pow(dist, mu + 1.0) * g / width;
    return {m0 - right, right};
}

PanelWeights weighted_panel(double x0, double x1, double D, double mu, double beta) {
    const SingularMoments mom(D, mu - 1.0, beta);
    const double width = x1 - x0;
    const Moments from_left = mom(x0, x1, x0);
    const Moments from_right = mom(x0, x1, x1);
    return {-from_right.mref / width, from_left.mref / width};
}

}  // namespace hilfer::detail
