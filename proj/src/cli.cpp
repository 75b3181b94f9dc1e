#include "hilfer/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "hilfer/config.hpp"
#include "hilfer/errors.hpp"
#include "hilfer/stability.hpp"

namespace hilfer::cli {

using nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// JSON numbers rounded to 12 significant digits; non-finite values as strings.
ordered_json jnum(double x) {
    if (!std::isfinite(x)) return fmt(x);
    return std::strtod(fmt(x).c_str(), nullptr);
}

ordered_json jarray(std::span<const double> xs) {
    ordered_json a = ordered_json::array();
    for (double x : xs) a.push_back(jnum(x));
    return a;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'", 0);
    f << text;
    if (!f) throw ConfigError("failed writing '" + path + "'", 0);
}

std::string sidecar_path(const std::string& csv) {
    const auto dot = csv.rfind('.');
    const auto slash = csv.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return csv.substr(0, dot) + ".json";
    return csv + ".json";
}

void print_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.first.size());
    for (const auto& [k, v] : rows) out << "  " << k << std::string(w - k.size() + 2, ' ') << v << "\n";
}

PhiFunction variant_phi(const std::string& v, double a) {
    if (v == "identity") return PhiFunction::identity();
    if (v == "log") return PhiFunction::log_shift(a);
    if (v == "power") return PhiFunction::power(0.5);
    throw ConfigError("unknown --phi-variant '" + v + "' (identity, log, power)", 0);
}

ProblemConfig load(const Options& o) {
    if (o.config_path.empty()) throw ConfigError("--config is required", 0);
    ProblemConfig cfg = load_config(o.config_path);
    if (o.grid_size) {
        if (*o.grid_size < 2) throw ConfigError("--grid-size must be at least 2", 0);
        cfg.solver.grid_size = *o.grid_size;
    }
    if (o.phi_variant) {
        cfg.spec.phi = variant_phi(*o.phi_variant, cfg.spec.a);
        try {
            cfg.spec.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("with --phi-variant: ") + e.what(), 0);
        }
    }
    return cfg;
}

// Maps library errors onto the exit-code contract.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const OuterDivergence& e) {
        err << "diverged: " << e.what() << "\n";
        return kDiverged;
    } catch (const Error& e) {
        err << "compute error: " << e.what() << "\n";
        return kComputeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kComputeError;
    }
}

ordered_json existence_json(const ExistenceCertificate& c) {
    return ordered_json{{"xi", jnum(c.xi)},
                        {"Lambda", jnum(c.Lambda)},
                        {"Omega", jnum(c.Omega)},
                        {"sigma", jnum(c.sigma)},
                        {"lambda_nonzero", c.lambda_nonzero},
                        {"sigma_lt_one", c.sigma_lt_one},
                        {"L_lt_one", c.L_lt_one},
                        {"passed", c.passed()}};
}

void print_existence(std::ostream& out, const ExistenceCertificate& c) {
    print_rows(out, {{"xi", fmt(c.xi)},
                     {"Lambda", fmt(c.Lambda)},
                     {"Omega", fmt(c.Omega)},
                     {"sigma", fmt(c.sigma)},
                     {"Lambda != 0", yes_no(c.lambda_nonzero)},
                     {"sigma < 1", yes_no(c.sigma_lt_one)},
                     {"L < 1", yes_no(c.L_lt_one)}});
    out << "result: " << (c.passed() ? "existence certified" : "existence NOT certified") << "\n";
}

ordered_json solution_json(const Solution& s, const BoundaryResiduals& br, std::size_t n) {
    return ordered_json{{"status", s.converged ? "converged" : "not_converged"},
                        {"N", n},
                        {"xi", jnum(s.xi())},
                        {"A_tilde", jnum(s.A_tilde)},
                        {"outer_iters", s.outer_iters},
                        {"converged", s.converged},
                        {"final_update_norm", jnum(s.final_update_norm)},
                        {"residual", jnum(s.residual)},
                        {"boundary_left_residual", jnum(br.left)},
                        {"boundary_right_residual", jnum(br.right)},
                        {"existence_certified", s.certified},
                        {"warning", s.warning},
                        {"update_norms", jarray(s.update_norms)}};
}

std::string solution_csv(const Solution& s) {
    const PhiGrid& g = s.y.grid_ref();
    std::ostringstream o;
    o << "t,phi_t,y_weighted,y_plain,g\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        o << fmt(g.t(i)) << ',' << fmt(g.phi_values()[i]) << ',' << fmt(s.y[i]) << ',' << fmt(s.y.plain_at(i)) << ','
          << fmt(s.g[i]) << '\n';
    return o.str();
}

// f + amplitude * shape(t) [* chi(t)]
Expr perturbed_f(const Expr& f, const Expr& shape, double amplitude, const Expr* chi) {
    const ExprBuilder b({"t", "y", "d"});
    auto term = b.binary(BinaryOp::Mul, b.number(amplitude), b.import(shape));
    if (chi) term = b.binary(BinaryOp::Mul, term, b.import(*chi));
    return b.build(b.binary(BinaryOp::Add, b.import(f), term));
}

struct CertifyRun {
    StabilityCertificate cert;
    double amplitude = 0.0;
    std::optional<KStarCheck> k_check;
};

CertifyRun run_certificate(const IntegralEquation& eq, const Solution& y, StabilityKind kind, double amplitude,
                           const Expr& shape, const std::optional<Expr>& chi, std::optional<double> K_star) {
    ProblemSpec perturbed = eq.spec();
    const Expr* chi_ptr = is_rassias(kind) ? &*chi : nullptr;
    perturbed.f = perturbed_f(eq.spec().f, shape, amplitude, chi_ptr);
    const IntegralEquation eqz(perturbed, eq.config(), eq.grid());
    const Solution z = picard_solve(eqz);

    double shape_max = 0.0;
    for (std::size_t i = 0; i < eq.grid()->size(); ++i)
        shape_max = std::fmax(shape_max, std::fabs(shape.eval({{"t", eq.grid()->t(i)}})));

    CertifyOptions opts;
    opts.solver = eq.config();
    opts.user_epsilon = amplitude * shape_max;
    opts.K_star = K_star;
    CertifyRun r;
    r.amplitude = amplitude;
    r.cert = certify(eq, y, z.y, kind, chi, opts);
    if (is_rassias(kind)) r.k_check = verify_K_star(eq.spec(), *chi, r.cert.K_star.value_or(0.0), eq.grid());
    return r;
}

ordered_json certificate_json(const CertifyRun& r) {
    const auto& c = r.cert;
    ordered_json j{{"kind", to_string(c.kind)},
                   {"amplitude", jnum(r.amplitude)},
                   {"epsilon", jnum(c.epsilon)},
                   {"epsilon_measured", jnum(c.epsilon_measured)},
                   {"fit_residual", jnum(c.fit_residual)},
                   {"C", jnum(c.C)}};
    if (c.K_star) {
        j["K_star"] = jnum(*c.K_star);
        j["K_star_verified"] = r.k_check ? r.k_check->passed : c.K_star_verified;
        if (r.k_check) j["K_star_worst_ratio"] = jnum(r.k_check->worst_ratio);
    }
    j["deviation"] = jnum(c.deviation);
    j["bound"] = jnum(c.bound);
    j["observed_gap"] = jnum(c.observed_gap);
    j["bound_holds"] = c.bound_holds;
    return j;
}

void print_certificate(std::ostream& out, const CertifyRun& r) {
    const auto& c = r.cert;
    std::vector<std::pair<std::string, std::string>> rows{{"kind", to_string(c.kind)},
                                                          {"amplitude", fmt(r.amplitude)},
                                                          {"epsilon (measured)", fmt(c.epsilon_measured)},
                                                          {"epsilon (used)", fmt(c.epsilon)},
                                                          {"defect fit residual", fmt(c.fit_residual)},
                                                          {"C", fmt(c.C)}};
    if (c.K_star) {
        rows.emplace_back("K*", fmt(*c.K_star));
        if (r.k_check) {
            rows.emplace_back("K* verified", yes_no(r.k_check->passed));
            rows.emplace_back("max I^mu chi / chi", fmt(r.k_check->worst_ratio));
        }
    }
    rows.emplace_back(is_rassias(c.kind) ? "max weighted |z - y|" : "||z - y|| (weighted)", fmt(c.deviation));
    rows.emplace_back("bound", fmt(c.bound));
    rows.emplace_back("observed gap", fmt(c.observed_gap));
    rows.emplace_back("bound holds", yes_no(c.bound_holds));
    print_rows(out, rows);
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load(o);
        const auto c = check_existence(cfg.spec);
        out << "existence check\n";
        print_existence(out, c);
        if (!o.out_path.empty()) write_file(o.out_path, existence_json(c).dump(2) + "\n");
        return c.passed() ? kOk : kVerdictFailed;
    });
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    const std::string csv = o.out_path.empty() ? "solution.csv" : o.out_path;
    return guarded(err, [&] {
        const ProblemConfig cfg = load(o);
        const IntegralEquation eq(cfg.spec, cfg.solver);
        Solution sol = [&] {
            try {
                return picard_solve(eq);
            } catch (const OuterDivergence& e) {
                ordered_json j{{"status", "diverged"}, {"N", cfg.solver.grid_size}, {"error", e.what()}};
                write_file(sidecar_path(csv), j.dump(2) + "\n");
                throw;
            }
        }();
        const auto br = boundary_check(cfg.spec, sol);
        write_file(csv, solution_csv(sol));
        write_file(sidecar_path(csv), solution_json(sol, br, cfg.solver.grid_size).dump(2) + "\n");
        out << "solve\n";
        print_rows(out, {{"N", std::to_string(cfg.solver.grid_size)},
                         {"converged", yes_no(sol.converged)},
                         {"outer iterations", std::to_string(sol.outer_iters)},
                         {"A~", fmt(sol.A_tilde)},
                         {"final update norm", fmt(sol.final_update_norm)},
                         {"residual", fmt(sol.residual)},
                         {"boundary residual at a", fmt(br.left)},
                         {"boundary residual at b", fmt(br.right)},
                         {"output", csv}});
        if (!sol.warning.empty()) out << "warning: " << sol.warning << "\n";
        return sol.converged ? kOk : kDiverged;
    });
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig cfg = load(o);
        StabilityKind kind;
        try {
            kind = parse_stability_kind(o.kind);
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), 0);
        }
        if (is_rassias(kind) && (!cfg.stability || !cfg.stability->chi))
            throw ConfigError("--kind " + o.kind + " needs a [stability] table with chi", 0);
        const StabilityConfig st = cfg.stability.value_or(StabilityConfig{});
        const double amplitude = o.perturb_amplitude.value_or(st.amplitude);
        if (!(amplitude >= 0.0)) throw ConfigError("--perturb-amplitude must be nonnegative", 0);

        const IntegralEquation eq(cfg.spec, cfg.solver);
        const Solution y = picard_solve(eq);
        const CertifyRun r = run_certificate(eq, y, kind, amplitude, st.perturbation, st.chi, st.K_star);
        out << "stability certificate\n";
        print_certificate(out, r);
        if (!o.out_path.empty()) write_file(o.out_path, certificate_json(r).dump(2) + "\n");
        return r.cert.bound_holds ? kOk : kVerdictFailed;
    });
}

// ---------------------------------------------------------------------------

std::string example_config_text() {
    return R"cfg(# Caputo-type example: mu = 3/2, nu = 1, phi(t) = t on [0, 1]
[problem]
mu = 3/2
nu = 1
a = 0
b = 1
phi = "identity"
f = "cos(t)/(10*e^(t+1)) * (sin(y) + d)"
K = 1/(10*e)
L = 1/(10*e)

[[boundary]]
lambda = 10/7
delta = 4/5
tau = 1/3

[[boundary]]
lambda = 13/6
delta = 8/3
tau = 1/2

[solver]
N = 1024

[stability]
chi = "mlf(1.5, (1/9)*t^1.5)"
K_star = 1/9
perturbation = "cos(t)"
amplitude = 0.01
)cfg";
}

namespace {

struct Variant {
    std::string name;
    std::string phi;
    double nu;
    std::string chi;
};

const Variant kVariants[] = {
    {"identity", "identity", 1.0, "mlf(1.5, (1/9)*t^1.5)"},
    {"log", "log", 0.5, "mlf(1.5, (1/9)*log(1 + t)^1.5)"},
    {"power", "power", 0.5, "mlf(1.5, (1/9)*(t^0.5)^1.5)"},
};

struct Published {
    const char* name;
    double value;
    double tol;
};

}  // namespace

int cmd_reproduce_example(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemConfig base = parse_config(example_config_text());
        bool constants_ok = true;
        ordered_json report = ordered_json::array();

        for (const auto& v : kVariants) {
            if (o.phi_variant && *o.phi_variant != v.name) continue;
            ProblemConfig cfg = base;
            cfg.spec.phi = variant_phi(v.phi, cfg.spec.a);
            cfg.spec.nu = v.nu;
            cfg.stability->chi = Expr::parse(v.chi, {"t"});
            if (o.grid_size) cfg.solver.grid_size = *o.grid_size;
            const double amplitude = o.perturb_amplitude.value_or(cfg.stability->amplitude);

            out << "== variant " << v.name << ": mu = " << fmt(cfg.spec.mu) << ", nu = " << fmt(cfg.spec.nu)
                << ", phi = " << cfg.spec.phi.phi_expr().to_string() << ", N = " << cfg.solver.grid_size << "\n";
            ordered_json jv{{"variant", v.name}, {"nu", jnum(cfg.spec.nu)}, {"N", cfg.solver.grid_size}};

            const auto ex = check_existence(cfg.spec);
            out << "existence\n";
            print_existence(out, ex);
            jv["existence"] = existence_json(ex);

            if (v.name == "identity") {
                const Published pub[] = {{"Lambda", 0.87045, 5e-5}, {"Omega", 1.35464, 5e-5}, {"sigma", 0.0881987, 1e-4}};
                const double got[] = {ex.Lambda, ex.Omega, ex.sigma};
                out << "published constants\n";
                out << "  quantity  published   computed         |diff|              tolerance  ok\n";
                ordered_json jc = ordered_json::array();
                for (int i = 0; i < 3; ++i) {
                    const double diff = std::fabs(got[i] - pub[i].value);
                    const bool ok = diff <= pub[i].tol;
                    constants_ok = constants_ok && ok;
                    char line[160];
                    std::snprintf(line, sizeof line, "  %-8s  %-10s  %-15s  %-18s  %-9s  %s\n", pub[i].name,
                                  fmt(pub[i].value).c_str(), fmt(got[i]).c_str(), fmt(diff).c_str(),
                                  fmt(pub[i].tol).c_str(), yes_no(ok));
                    out << line;
                    jc.push_back({{"quantity", pub[i].name},
                                  {"published", jnum(pub[i].value)},
                                  {"computed", jnum(got[i])},
                                  {"abs_diff", jnum(diff)},
                                  {"tolerance", jnum(pub[i].tol)},
                                  {"ok", ok}});
                }
                jv["published_comparison"] = jc;
            } else {
                out << "published constants: none for this variant (informational run)\n";
            }

            const IntegralEquation eq(cfg.spec, cfg.solver);
            const Solution y = picard_solve(eq);
            const auto br = boundary_check(cfg.spec, y);
            out << "solve\n";
            print_rows(out, {{"converged", yes_no(y.converged)},
                             {"outer iterations", std::to_string(y.outer_iters)},
                             {"A~", fmt(y.A_tilde)},
                             {"residual", fmt(y.residual)},
                             {"boundary residual at a", fmt(br.left)},
                             {"boundary residual at b", fmt(br.right)},
                             {"max |y| (plain)", fmt(weighted_norm(y.y, 2.0))}});
            jv["solve"] = solution_json(y, br, cfg.solver.grid_size);
            jv["solve"].erase("update_norms");

            ordered_json jcerts = ordered_json::array();
            const auto& st = *cfg.stability;
            auto emit = [&](const std::string& title, const CertifyRun& r) {
                out << title << "\n";
                print_certificate(out, r);
                auto j = certificate_json(r);
                j["label"] = title;
                jcerts.push_back(j);
            };
            emit("certificate: Ulam-Hyers",
                 run_certificate(eq, y, StabilityKind::UlamHyers, amplitude, st.perturbation, st.chi, std::nullopt));
            emit("certificate: Ulam-Hyers-Rassias, K* = 1/9 as published",
                 run_certificate(eq, y, StabilityKind::UlamHyersRassias, amplitude, st.perturbation, st.chi, st.K_star));
            emit("certificate: Ulam-Hyers-Rassias, K* = smallest value valid on the grid",
                 run_certificate(eq, y, StabilityKind::UlamHyersRassias, amplitude, st.perturbation, st.chi,
                                 std::nullopt));
            jv["certificates"] = jcerts;
            report.push_back(jv);
            out << "\n";
        }
        if (report.empty()) throw ConfigError("unknown --phi-variant '" + o.phi_variant.value_or("") + "'", 0);
        out << "published constants " << (constants_ok ? "reproduced" : "NOT reproduced") << "\n";
        if (!o.out_path.empty()) write_file(o.out_path, report.dump(2) + "\n");
        return constants_ok ? kOk : kVerdictFailed;
    });
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlocal boundary value problems for implicit phi-Hilfer fractional differential equations"};
    app.require_subcommand(1);
    Options o;
    std::string variant;
    std::size_t grid = 0;
    double amplitude = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config_path, "problem configuration file");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_path, "output file");
        sub->add_option("--grid-size", grid, "override the number of grid intervals N")->check(CLI::PositiveNumber);
        sub->add_option("--phi-variant", variant, "replace phi: identity, log or power")
            ->check(CLI::IsMember({"identity", "log", "power"}));
    };
    auto* check = app.add_subcommand("check", "existence certificate (sigma < 1, Lambda != 0, L < 1)");
    add_common(check, true);
    auto* solve = app.add_subcommand("solve", "solve the integral equation; writes CSV and a JSON sidecar");
    add_common(solve, true);
    auto* certify = app.add_subcommand("certify", "Ulam stability certificate for an injected perturbation");
    add_common(certify, true);
    certify->add_option("--kind", o.kind, "uh, generalized_uh, rassias or generalized_uhr")
        ->check(CLI::IsMember({"uh", "ulam_hyers", "generalized_uh", "rassias", "ulam_hyers_rassias", "generalized_uhr"}));
    certify->add_option("--perturb-amplitude", amplitude, "amplitude of the injected defect");
    auto* repro = app.add_subcommand("reproduce-example", "run the bundled example and compare with published constants");
    add_common(repro, false);
    repro->add_option("--perturb-amplitude", amplitude, "amplitude of the injected defect");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << e.what() << "\n" << "run with --help for usage\n";
        return kConfigError;
    }
    for (auto* sub : {certify, repro})
        if (sub->parsed() && sub->count("--perturb-amplitude")) o.perturb_amplitude = amplitude;
    for (auto* sub : {check, solve, certify, repro}) {
        if (!sub->parsed()) continue;
        if (sub->count("--grid-size")) o.grid_size = grid;
        if (sub->count("--phi-variant")) o.phi_variant = variant;
    }

    if (check->parsed()) return cmd_check(o, out, err);
    if (solve->parsed()) return cmd_solve(o, out, err);
    if (certify->parsed()) return cmd_certify(o, out, err);
    return cmd_reproduce_example(o, out, err);
}

}  // namespace hilfer::cli
