// Serial reference vs OpenMP kernels: operator build, operator apply, resolve_g
// and a full Picard solve on the worked example with a forcing term.
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>

#include "hilfer/solver.hpp"

using namespace hilfer;
using Clock = std::chrono::steady_clock;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, double diff) {
    std::printf("%-24s %12.6f %12.6f %9.2fx   max|diff| %.3g\n", name, serial, parallel, serial / parallel, diff);
}

double max_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::fmax(d, std::fabs(a[i] - b[i]));
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP timings"};
    std::size_t n = 4096;
    int reps = 3;
    app.add_option("-n,--grid-size", n, "grid intervals")->check(CLI::PositiveNumber);
    app.add_option("-r,--reps", reps, "repetitions (best time is reported)")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    ProblemSpec s;
    s.boundary = {{10.0 / 7.0, 0.8, 1.0 / 3.0}, {13.0 / 6.0, 8.0 / 3.0, 0.5}};
    s.f = Expr::parse("cos(t)/(10*e^(t+1)) * (sin(y) + d) + t", {"t", "y", "d"});
    s.K = s.L = 1.0 / (10.0 * M_E);
    s.nu = 0.5;
    s.phi = PhiFunction::log_shift(0.0);
    SolverConfig cfg;
    cfg.grid_size = n;
    auto grid = make_grid(s, n);

    std::printf("N = %zu, threads = %d, best of %d\n", n, omp_get_max_threads(), reps);
    std::printf("%-24s %12s %12s %10s\n", "kernel", "serial [s]", "openmp [s]", "speedup");

    std::optional<FracIntegralOperator> ps, pp;
    const double ts = best_of(reps, [&] { ps.emplace(FracIntegralOperator::build_serial(grid, s.mu)); });
    const double tp = best_of(reps, [&] { pp.emplace(grid, s.mu); });
    double d = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k) d = std::fmax(d, max_diff(ps->row(k), pp->row(k)));
    report("operator build", ts, tp, d);

    std::vector<double> h(grid->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::sin(5.0 * grid->t(i)) + 1.0;
    std::vector<double> as, ap;
    const double as_t = best_of(reps, [&] { as = pp->apply_serial(h); });
    const double ap_t = best_of(reps, [&] { ap = pp->apply(h); });
    report("operator apply", as_t, ap_t, max_diff(as, ap));

    auto y = GridFunction::sample_plain(grid, [](double t) { return 0.2 * t * std::cos(t); });
    std::optional<GridFunction> gs, gp;
    const double rs = best_of(reps, [&] { gs.emplace(resolve_g_serial(s, y, cfg)); });
    const double rp = best_of(reps, [&] { gp.emplace(resolve_g(s, y, cfg)); });
    report("resolve_g", rs, rp, max_diff(gs->values(), gp->values()));

    const int saved = omp_get_max_threads();
    std::optional<Solution> ss, sp;
    omp_set_num_threads(1);
    const double ps_t = best_of(1, [&] { ss.emplace(picard_solve(s, cfg)); });
    omp_set_num_threads(saved);
    const double pp_t = best_of(1, [&] { sp.emplace(picard_solve(s, cfg)); });
    report("picard_solve (1 vs all)", ps_t, pp_t, max_diff(ss->y.values(), sp->y.values()));
    return 0;
}
