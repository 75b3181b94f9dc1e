#include <doctest.h>

#include <cmath>
#include <random>

#include "hilfer/errors.hpp"
#include "hilfer/frac_ops.hpp"
#include "hilfer/special.hpp"
#include "oracles.hpp"

using namespace hilfer;

namespace {

GridPtr unit_grid(const PhiFunction& phi, std::size_t n, double r = 2.0) {
    return PhiGrid::build(phi, 0.0, 1.0, {n, r});
}

std::vector<PhiFunction> families() {
    return {PhiFunction::identity(), PhiFunction::log_shift(0.0), PhiFunction::power(0.5)};
}

// I^mu of x^(delta - 1) at t = b; delta < 1 uses the weighted representation.
double integrate_power(const GridPtr& g, double mu, double delta) {
    const std::size_t n = g->size();
    if (delta < 1.0) {
        auto h = GridFunction::weighted(g, std::vector<double>(n, 1.0), delta + 1.0);
        return frac_integral(h, mu, n - 1);
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(g->offset(i), delta - 1.0);
    return frac_integral(GridFunction::plain(g, v), mu, n - 1);
}

}  // namespace

TEST_CASE("frac_integral examples") {
    auto g = unit_grid(PhiFunction::identity(), 64);
    auto one = GridFunction::plain(g, std::vector<double>(g->size(), 1.0));
    CHECK(frac_integral(one, 1.0, g->size() - 1) == doctest::Approx(1.0).epsilon(1e-14));

    for (const auto& phi : families()) {
        auto gg = unit_grid(phi, 64);
        auto c = GridFunction::plain(gg, std::vector<double>(gg->size(), 1.0));
        for (double mu : {0.3, 1.0, 1.5, 2.5})
            for (std::size_t k : {std::size_t{0}, std::size_t{5}, gg->size() - 1}) {
                const double exact = std::pow(gg->offset(k), mu) / hilfer::gamma(mu + 1.0);
                CHECK(frac_integral(c, mu, k) == doctest::Approx(exact).epsilon(1e-13));
            }
    }

    auto g2 = unit_grid(PhiFunction::identity(), 2048);
    std::vector<double> h(g2->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::pow(g2->offset(i), 0.3);
    const double got = frac_integral(GridFunction::plain(g2, h), 1.5, g2->size() - 1);
    const double ref = oracle::powerlaw(1.5, 1.3, 1.0);
    CHECK(std::fabs(got - ref) <= 1e-6 * ref);
}

TEST_CASE("frac_integral rejects bad orders") {
    auto g = unit_grid(PhiFunction::identity(), 16);
    auto one = GridFunction::plain(g, std::vector<double>(g->size(), 1.0));
    CHECK_THROWS_AS(frac_integral(one, 0.0, 3), DomainError);
    CHECK_THROWS_AS(frac_integral(one, -1.0, 3), DomainError);
    CHECK_THROWS_AS(FracIntegralOperator(g, 0.0), DomainError);
    auto inf = GridFunction::plain(g, std::vector<double>(g->size(), INFINITY));
    CHECK_THROWS_AS(frac_integral(inf, 1.5, 3), DomainError);
}

TEST_CASE("power law quadrature against the closed form") {
    for (const auto& phi : families()) {
        auto g = unit_grid(phi, 2048);
        const double span = g->offset(g->size() - 1);
        for (double mu : {0.5, 1.3, 1.5, 2.5})
            for (double delta : {0.5, 1.0, 1.3}) {
                const double ref = oracle::powerlaw(mu, delta, span);
                const double got = integrate_power(g, mu, delta);
                CHECK_MESSAGE(std::fabs(got - ref) <= 1e-6 * ref,
                              to_string(phi.family()) << " mu=" << mu << " delta=" << delta);
                CHECK(powerlaw_oracle(mu, delta, phi, 0.0, 1.0) == doctest::Approx(ref).epsilon(1e-12));
            }
    }
}

TEST_CASE("power law error decays at order >= 1.5 until round-off") {
    for (double mu : {0.5, 1.3, 1.5, 2.5})
        for (double delta : {0.5, 1.0, 1.3}) {
            const double ref = oracle::powerlaw(mu, delta, 1.0);
            double prev = -1.0;
            for (std::size_t n : {128, 256, 512, 1024, 2048}) {
                const double err = std::fabs(integrate_power(unit_grid(PhiFunction::identity(), n), mu, delta) - ref);
                if (prev >= 0.0)
                    CHECK_MESSAGE(err <= std::fmax(prev / std::pow(2.0, 1.5), 1e-13 * ref),
                                  "mu=" << mu << " delta=" << delta << " n=" << n << " err=" << err);
                prev = err;
            }
        }
}

TEST_CASE("powerlaw_oracle examples") {
    auto id = PhiFunction::identity();
    CHECK(powerlaw_oracle(1.0, 1.0, id, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(powerlaw_oracle(1.5, 1.0, id, 0.0, 1.0) == doctest::Approx(0.75225277806).epsilon(1e-10));
    CHECK_THROWS_AS(powerlaw_oracle(0.0, 1.0, id, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(powerlaw_oracle(1.0, -1.0, id, 0.0, 1.0), DomainError);
}

TEST_CASE("weighted integral examples") {
    for (const auto& phi : families()) {
        auto g = unit_grid(phi, 256);
        const std::size_t k = g->size() - 1;
        const double x = g->offset(k);
        for (double xi : {1.2, 1.5, 1.75, 2.0})
            for (double mu : {0.5, 1.5}) {
                auto one = GridFunction::weighted(g, std::vector<double>(g->size(), 1.0), xi);
                const double exact = hilfer::gamma(xi - 1.0) / hilfer::gamma(mu + xi - 1.0) * std::pow(x, mu + xi - 2.0);
                CHECK(frac_integral_weighted(one, xi, mu, k) == doctest::Approx(exact).epsilon(1e-12));
            }
        // linear weighted data is also exact
        std::vector<double> lin(g->size());
        for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = g->offset(i);
        auto hw = GridFunction::weighted(g, lin, 1.5);
        const double exact = hilfer::gamma(1.5) / hilfer::gamma(3.0) * x * x;
        CHECK(frac_integral_weighted(hw, 1.5, 1.5, k) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("weighted integral with xi = 2 is the plain integral") {
    auto g = unit_grid(PhiFunction::log_shift(0.0), 128);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(3.0 * g->t(i)) + 2.0;
    auto p = GridFunction::plain(g, v);
    auto w = GridFunction::weighted(g, v, 2.0);
    for (std::size_t k : {std::size_t{1}, std::size_t{40}, g->size() - 1})
        CHECK(frac_integral_weighted(w, 2.0, 1.3, k) == doctest::Approx(frac_integral(p, 1.3, k)).epsilon(1e-14));
    CHECK_THROWS_AS(frac_integral_weighted(w, 1.0, 1.3, 3), DomainError);
    CHECK_THROWS_AS(frac_integral_weighted(w, 2.5, 1.3, 3), DomainError);
}

TEST_CASE("semigroup on h = 1") {
    for (double mu : {0.5, 1.5})
        for (double chi : {0.5, 1.5}) {
            auto g = unit_grid(PhiFunction::identity(), 1024);
            const auto inner = FracIntegralOperator(g, mu).apply(std::vector<double>(g->size(), 1.0));
            const auto nested = FracIntegralOperator(g, chi).apply(inner);
            const auto direct = FracIntegralOperator(g, mu + chi).apply(std::vector<double>(g->size(), 1.0));
            // relative at t = b, and uniformly relative to the largest value
            CHECK(std::fabs(nested.back() - direct.back()) <= 1e-5 * direct.back());
            for (std::size_t k = 0; k < g->size(); ++k)
                REQUIRE(std::fabs(nested[k] - direct[k]) <= 1e-5 * direct.back());
        }
}

TEST_CASE("linearity and positivity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto g = unit_grid(PhiFunction::power(0.5), 200);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> h1(g->size()), h2(g->size()), comb(g->size());
        const double alpha = u(rng) * 3, beta = u(rng) * 3;
        for (std::size_t i = 0; i < h1.size(); ++i) {
            h1[i] = u(rng);
            h2[i] = u(rng);
            comb[i] = alpha * h1[i] + beta * h2[i];
        }
        const double mu = 0.5 + trial * 0.2;
        FracIntegralOperator op(g, mu);
        const auto a = op.apply(h1), b = op.apply(h2), c = op.apply(comb);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double scale = std::fabs(alpha * a[k]) + std::fabs(beta * b[k]) + 1e-300;
            REQUIRE(std::fabs(c[k] - (alpha * a[k] + beta * b[k])) <= 1e-13 * scale + 1e-15);
        }
        std::vector<double> pos(g->size());
        for (auto& x : pos) x = std::fabs(u(rng));
        for (double v : op.apply(pos)) REQUIRE(v >= 0.0);
    }
}

TEST_CASE("weights are nonnegative") {
    auto g = unit_grid(PhiFunction::identity(), 300);
    for (double mu : {0.3, 1.0, 1.7, 2.5})
        for (double beta : {0.0, -0.5, -0.05})
            for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{150}, std::size_t{300}})
                for (double w : integral_weights(*g, mu, k, beta)) REQUIRE(w >= 0.0);
}

TEST_CASE("parallel and serial operators are bit-identical") {
    auto g = unit_grid(PhiFunction::log_shift(0.0), 500);
    for (double beta : {0.0, -0.4}) {
        FracIntegralOperator par(g, 1.3, beta);
        auto ser = FracIntegralOperator::build_serial(g, 1.3, beta);
        for (std::size_t k = 0; k < g->size(); ++k) {
            const auto a = par.row(k), b = ser.row(k);
            for (std::size_t j = 0; j <= k; ++j) REQUIRE(a[j] == b[j]);
        }
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(g->t(i));
        CHECK(par.apply(v) == ser.apply_serial(v));
        // row-wise functions match the operator
        const auto w = integral_weights(*g, 1.3, 200, beta);
        for (std::size_t j = 0; j <= 200; ++j) CHECK(w[j] == par.row(200)[j]);
    }
}

TEST_CASE("weighted norm") {
    auto g = unit_grid(PhiFunction::log_shift(0.0), 128);
    const double xi = 1.5;
    auto zero = GridFunction::plain(g, std::vector<double>(g->size(), 0.0));
    CHECK(weighted_norm(zero, xi) == 0.0);

    std::vector<double> y(g->size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::pow(g->offset(i), xi - 1.0);
    CHECK(weighted_norm(GridFunction::plain(g, y), xi) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    auto singular = GridFunction::weighted(g, std::vector<double>(g->size(), 1.0), xi);
    CHECK(weighted_norm(singular, xi) == 1.0);
    CHECK(weighted_norm(singular.to_plain(), xi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("weighted norm axioms") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto g = unit_grid(PhiFunction::identity(), 64);
    const double xi = 1.7;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(g->size()), b(g->size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        auto fa = GridFunction::weighted(g, a, xi), fb = GridFunction::weighted(g, b, xi);
        const double s = u(rng);
        CHECK(weighted_norm(s * fa, xi) == std::fabs(s) * weighted_norm(fa, xi));
        CHECK(weighted_norm(fa + fb, xi) <= weighted_norm(fa, xi) + weighted_norm(fb, xi));
        CHECK(weighted_norm(fa, xi) >= 0.0);
        CHECK(weighted_norm(fa - fa, xi) == 0.0);
    }
}

TEST_CASE("Hilfer annihilation of the boundary power") {
    CHECK(hilfer_annihilation_check(2.0, *unit_grid(PhiFunction::identity(), 256)) <= 1e-14);
    CHECK(hilfer_annihilation_check(1.5, *unit_grid(PhiFunction::identity(), 1024)) <= 1e-6);
    CHECK(hilfer_annihilation_check(1.5, *unit_grid(PhiFunction::log_shift(0.0), 2048)) <= 1e-6);
    CHECK(hilfer_annihilation_check(1.2, *unit_grid(PhiFunction::power(0.5), 1024)) <= 1e-6);
    CHECK_THROWS_AS(hilfer_annihilation_check(1.0, *unit_grid(PhiFunction::identity(), 16)), DomainError);
}
