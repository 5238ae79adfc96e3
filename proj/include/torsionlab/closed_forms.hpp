#pragma once

// Exact and series reference solutions for the torsion problem
//   Laplacian v = -1 in Omega,  v = 0 on the boundary,
// the cross-sectional parabola approximation v1, and the exponential-plus-
// oscillation error functional that controls |v - v1| on wide domains.

#include "torsionlab/domain.hpp"

namespace torsionlab {

struct SeriesTruncation {
    int n_max = 0;          // last Fourier index kept
    double tail_bound = 0;  // a-posteriori bound on the dropped tail
};

struct ErrorBudget {
    double x_tilde = 0;
    double term_exp = 0;  // C1 * exp(-c1 * d(x_tilde))
    double term_osc = 0;  // C1 * sup of exp-weighted |h(x) - h(x_tilde)|
    double total = 0;
    double c1 = 1, C1 = 1;
};

// Torsion function of [-N/2, N/2] x [0, 1]:
//   y(1-y)/2 - (2/pi^3) sum_{n odd} 2/(n^3 cosh(n pi N / 2)) sin(n pi y) cosh(n pi x).
// The cutoff is chosen so the geometric tail bound is below tol (capped at 1e5).
double torsion_rectangle(double N, double x, double y, double tol = 1e-12);
double torsion_rectangle_ex(double N, double x, double y, double tol, SeriesTruncation& trunc);

// Torsion function of the ellipse with major axis N/2, minor axis 1/2,
// centred at the origin (centred coordinates: |y| <= 1/2):
//   (1/8) (1/N^2 + 1)^{-1} (1 - 4 x^2 / N^2 - 4 y^2).
// Mapping to domain coordinates of ConvexDomain::ellipse(N):
//   x_centred = x - (a+b)/2,  y_centred = y - 1/2.
double torsion_ellipse(double N, double x, double y);

// v1(x, y) = (y - f1(x)) (f2(x) - y) / 2.
double v1(const ConvexDomain& dom, double x, double y);

// Hessian of v1; yy entry is exactly -1.  Uses analytic boundary derivatives
// when the family provides them, else finite differences with one-sided
// stencils next to breakpoints.
struct SymMat2 {
    double xx = 0, xy = 0, yy = 0;
    double trace() const { return xx + yy; }
};
SymMat2 v1_hessian(const ConvexDomain& dom, double x, double y);

// Error(x~) = C1 e^{-c1 d(x~)} + C1 sup_{|x-x~| <= 3/4 d(x~)} e^{-c1|x-x~|} |h(x)-h(x~)|.
// The sup is taken by dense sampling (1024 points per unit length, plus
// breakpoints) refined by golden section around the sampled argmax.
// Requires h(x~) >= 1/2.
ErrorBudget error_budget(const ConvexDomain& dom, double x_tilde, double c1, double C1);

}  // namespace torsionlab
