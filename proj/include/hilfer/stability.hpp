#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hilfer/solver.hpp"

namespace hilfer {

enum class StabilityKind { UlamHyers, GeneralizedUH, UlamHyersRassias, GeneralizedUHR };

std::string to_string(StabilityKind k);
/// Accepts "uh", "ulam_hyers", "generalized_uh", "rassias", "ulam_hyers_rassias", "generalized_uhr".
StabilityKind parse_stability_kind(const std::string& s);
inline bool is_rassias(StabilityKind k) {
    return k == StabilityKind::UlamHyersRassias || k == StabilityKind::GeneralizedUHR;
}

struct StabilityCertificate {
    StabilityKind kind = StabilityKind::UlamHyers;
    double epsilon = 0.0;           // level used in the bound
    double epsilon_measured = 0.0;  // defect measured from z
    double fit_residual = 0.0;      // how well the defect model reproduces z (0 when the derivative was known)
    double C = 0.0;
    std::optional<double> K_star;
    bool K_star_verified = true;    // I^mu chi <= K* chi held on the grid; reported, not part of bound_holds
    double deviation = 0.0;         // max over nodes of the left side of the bound
    double bound = 0.0;             // right side at the node where the gap is smallest
    double observed_gap = 0.0;      // min over nodes of (right side - left side)
    bool bound_holds = false;
};

/// v(t) E_mu(g Gamma(mu) (phi(t) - phi(a))^mu) for a plain, nondecreasing v.
GridFunction gronwall_bound(const GridFunction& v, double g_const, double mu, const PhiFunction& phi);

/// Defect of an approximate solution z: the function w with
/// D z = f(t, z, D z) + w, sampled on z's grid.
struct Defect {
    std::vector<double> w;
    std::vector<double> derivative;  // D z at the nodes
    double epsilon = 0.0;            // max |w|, or max |w| / chi with a weight
    double fit_residual = 0.0;
};

struct DefectOptions {
    std::size_t degree = 16;  // polynomial degree of the correction model
};

/// Recovers D z from z by writing z = T(z) + c (phi - phi(a))^(xi-1) + I^mu q,
/// T being the integral-equation map, and fitting q by least squares in a
/// Chebyshev basis in phi. Then w = D z - f(t, z, D z). With `chi`, epsilon is
/// max |w| / chi instead of max |w|.
Defect measure_defect(const IntegralEquation& eq, const GridFunction& z, const std::vector<double>* chi = nullptr,
                      const DefectOptions& opts = {});

/// Same with D z known at the nodes (for instance from a perturbed solve).
Defect measure_defect_known(const ProblemSpec& spec, const GridFunction& z, std::vector<double> derivative,
                            const std::vector<double>* chi = nullptr);

/// Smallest epsilon such that |D z - f(t, z, D z)| <= epsilon on the grid.
double residual_epsilon(const ProblemSpec& spec, const GridFunction& z, const SolverConfig& cfg = {});

/// (phi(b)-phi(a))^(mu+2-xi)/Gamma(mu+1) E_mu(K/(1-L) (phi(b)-phi(a))^mu)
double ulam_hyers_constant(const ProblemSpec& spec);

/// K* (phi(b)-phi(a))^(2-xi) E_mu(K/(1-L) (phi(b)-phi(a))^mu)
double ulam_hyers_rassias_constant(const ProblemSpec& spec, double K_star);

struct KStarCheck {
    bool passed = false;
    double worst_ratio = 0.0;  // max over t > a of I^mu chi(t) / chi(t)
    bool chi_nondecreasing = true;
};

/// Checks I^mu chi <= K* chi at every node t > a (relative slack 1e-9).
KStarCheck verify_K_star(const ProblemSpec& spec, const Expr& chi, double K_star, std::size_t grid_size = 1024);
KStarCheck verify_K_star(const ProblemSpec& spec, const Expr& chi, double K_star, const GridPtr& grid);

/// Samples chi (an expression in t) on a grid; throws DomainError unless chi > 0.
std::vector<double> sample_chi(const Expr& chi, const PhiGrid& grid);

struct CertifyOptions {
    SolverConfig solver;
    double user_epsilon = 0.0;                      // the larger of this and the measured defect is used
    std::optional<double> K_star;                   // Rassias kinds; defaults to the measured worst ratio
    std::optional<std::vector<double>> derivative;  // D z at the nodes, when known
    DefectOptions defect;
};

/// Solves the unperturbed problem on z's grid and checks the stability bound
/// of the requested kind against the measured defect of z.
StabilityCertificate certify(const ProblemSpec& spec, const GridFunction& z, StabilityKind kind,
                             const std::optional<Expr>& chi, const CertifyOptions& opts = {});

/// Same, reusing an already computed reference solution on z's grid.
StabilityCertificate certify(const IntegralEquation& eq, const Solution& y, const GridFunction& z,
                             StabilityKind kind, const std::optional<Expr>& chi, const CertifyOptions& opts = {});

}  // namespace hilfer
