#pragma once

// Rectangle Green's function machinery: the double sine series reference,
// the Poisson-summed slice kernel f_n, the vertically warped kernel for a
// height-function domain, and the quadrature that reconstructs the
// cross-sectional parabola from the kernel.

#include "torsionlab/domain.hpp"

namespace torsionlab {

struct Point {
    double x = 0, y = 0;
};

// Evaluation context for the warped kernel around a working abscissa.
// All series bookkeeping keeps the translated convention: the slice
// [x_tilde - d/2, x_tilde + d/2] maps to [0, d] with x_tilde at d/2.
struct KernelContext {
    double x_tilde = 0;
    double h_tilde = 1;  // h(x_tilde), must lie in [1/2, 1]
    double d_tilde = 1;  // min distance of x_tilde to the lateral ends, >= 1
    int n_cutoff = 0;    // 0 = adaptive in |x - x'|
    int m_cutoff = 16;   // lattice-sum truncation; tail < 1e-40 for d/h >= 1

    static KernelContext at(const ConvexDomain& dom, double x_tilde, int n_cutoff = 0,
                            int m_cutoff = 16);

    // untranslated slice edges
    double slice_left() const { return x_tilde - 0.5 * d_tilde; }
    double slice_right() const { return x_tilde + 0.5 * d_tilde; }
};

// Vertical warp mapping [f1(x), f2(x)] onto [0, h_tilde].
struct WarpMap {
    const ConvexDomain* dom = nullptr;
    double h_tilde = 1;
    double operator()(double x, double y) const {
        double y1 = dom->f1(x);
        double h = dom->f2(x) - y1;
        if (h <= 0) throw GeometryError("warp: degenerate slice (h = 0)");
        return (y - y1) * h_tilde / h;
    }
};

// Reference double sine series for the Green's function of the Laplacian on
// [0, d] x [0, c]; slow, oracle use only.  p, q in [0,d] x [0,c], p != q.
double rect_green_double_series(double c, double d, Point p, Point q, int n_cutoff);

// Slice kernel: lattice of exponentials (both coordinates translated,
// x, x' in [0, d_tilde]).
double f_n(const KernelContext& ctx, int n, double x, double x_prime);

// Term-wise analytic one-sided x-derivative of f_n; side = +1 evaluates the
// right limit at x, side = -1 the left limit.
double f_n_dx(const KernelContext& ctx, int n, double x, double x_prime, int side);

// Warped vertical mode: sin(n pi (y - f1(x)) / h(x)).
double g_n(const ConvexDomain& dom, int n, double x, double y);

// Warped kernel sum_n f_n(x;x') g_n(x,y) g_n(x',y').  p, q untranslated,
// both within the slice |x - x_tilde| <= d_tilde/2.  Refuses |x - x'| < 1e-6.
double approx_green(const ConvexDomain& dom, const KernelContext& ctx, Point p, Point q);

// Lattice identity sum_m e^{2 pi i m xi} / (a^2 + 4 pi^2 m^2)  =
//                 sum_m e^{-a |xi + m|} / (2a).
// Both sides truncated at |m| <= m_cutoff; returns |LHS - RHS|.
double poisson_identity_residual(double a, double xi, long m_cutoff);

// Individual sides and their truncation-tail bounds (for verification runs).
double poisson_lhs(double a, double xi, long m_cutoff, bool integral_tail_correction = false);
double poisson_lhs_tail_bound(long m_cutoff);
double poisson_rhs(double a, double xi, long m_cutoff);
double poisson_rhs_tail_bound(double a, double xi, long m_cutoff);

// -integral over the slice of the warped kernel against 1, by midpoint
// quadrature (1024 x-cells and 256 y-cells per unit) with the x-cell
// containing the singular line refined dyadically (8 levels).  Converges to
// v1(q) up to the kernel's exponential/oscillation error.
double reconstruct_v1(const ConvexDomain& dom, const KernelContext& ctx, Point q,
                      double c_star = 0.25);

}  // namespace torsionlab
