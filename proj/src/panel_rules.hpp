#pragma once

// Exact panel moments for the product-integration rules. Internal header.

namespace hilfer::detail {

struct PanelWeights {
    double left;
    double right;
};

/// Panel [u_j, u_j + width] with the target at distance `dist` = U - u_j from
/// its left end. Returns the integrals of (U - u)^(mu - 1) against the two hat
/// functions of the panel (no 1/Gamma factor).
PanelWeights plain_panel(double dist, double width, double mu);

/// Panel [x0, x1] in x = u - u_a with the target at x = D >= x1. Returns the
/// integrals of x^beta (D - x)^(mu - 1) against the two hat functions.
PanelWeights weighted_panel(double x0, double x1, double D, double mu, double beta);

}  // namespace hilfer::detail
