#include "torsionlab/greens_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace torsionlab {

KernelContext KernelContext::at(const ConvexDomain& dom, double x_tilde, int n_cutoff,
                                int m_cutoff) {
    KernelContext ctx;
    ctx.x_tilde = x_tilde;
    ctx.h_tilde = dom.height(x_tilde);
    ctx.d_tilde = dom.dist_to_ends(x_tilde);
    ctx.n_cutoff = n_cutoff;
    ctx.m_cutoff = m_cutoff;
    if (ctx.h_tilde < 0.5 - 1e-12 || ctx.h_tilde > 1.0 + 1e-12)
        throw GeometryError("KernelContext: h(x_tilde) outside [1/2, 1]");
    if (ctx.d_tilde < 1.0 - 1e-12)
        throw GeometryError("KernelContext: requires d(x_tilde) >= 1");
    return ctx;
}

double rect_green_double_series(double c, double d, Point p, Point q, int n_cutoff) {
    if (p.x < 0 || p.x > d || p.y < 0 || p.y > c || q.x < 0 || q.x > d || q.y < 0 || q.y > c)
        throw DomainRangeError("rect_green_double_series: point outside [0,d] x [0,c]");
    if (p.x == q.x && p.y == q.y)
        throw SingularityError("rect_green_double_series: p == q");
    const double inv_d2 = 1.0 / (d * d), inv_c2 = 1.0 / (c * c);
    KahanSum sum;
    for (int n1 = 1; n1 <= n_cutoff; ++n1) {
        const double sx = std::sin(n1 * kPi * p.x / d) * std::sin(n1 * kPi * q.x / d);
        if (sx == 0.0) continue;
        KahanSum inner;
        for (int n2 = 1; n2 <= n_cutoff; ++n2) {
            double sy = std::sin(n2 * kPi * p.y / c) * std::sin(n2 * kPi * q.y / c);
            inner.add(sy / (inv_d2 * double(n1) * n1 + inv_c2 * double(n2) * n2));
        }
        sum.add(sx * inner.value());
    }
    return -4.0 / (kPi * kPi * c * d) * sum.value();
}

namespace {

// One lattice family sum_m exp(-A |xi + m|), |m| <= M, with underflow skip.
double lattice_sum(double A, double xi, int M) {
    KahanSum s;
    for (int m = -M; m <= M; ++m) {
        double e = -A * std::abs(xi + m);
        if (e > -745.0) s.add(std::exp(e));
    }
    return s.value();
}

double lattice_sum_dx(double A, double xi, int M, double dxi_dx, int side) {
    // derivative of exp(-A|xi+m|) wrt x where xi = xi(x); at xi + m == 0 the
    // one-sided limit takes the sign of `side`.
    KahanSum s;
    for (int m = -M; m <= M; ++m) {
        double u = xi + m;
        double e = -A * std::abs(u);
        if (e <= -745.0) continue;
        double sg = u > 0 ? 1.0 : (u < 0 ? -1.0 : (side >= 0 ? 1.0 : -1.0));
        s.add(-A * sg * dxi_dx * std::exp(e));
    }
    return s.value();
}

}  // namespace

double f_n(const KernelContext& ctx, int n, double x, double x_prime) {
    if (n < 1) throw DomainRangeError("f_n: n must be >= 1");
    if (x < -1e-12 || x > ctx.d_tilde + 1e-12 || x_prime < -1e-12 || x_prime > ctx.d_tilde + 1e-12)
        throw DomainRangeError("f_n: coordinates outside [0, d_tilde]");
    const double A = 2.0 * kPi * (ctx.d_tilde / ctx.h_tilde) * n;
    const double xp = (x + x_prime) / (2.0 * ctx.d_tilde);
    const double xm = (x - x_prime) / (2.0 * ctx.d_tilde);
    return (lattice_sum(A, xp, ctx.m_cutoff) - lattice_sum(A, xm, ctx.m_cutoff)) / (kPi * n);
}

double f_n_dx(const KernelContext& ctx, int n, double x, double x_prime, int side) {
    const double A = 2.0 * kPi * (ctx.d_tilde / ctx.h_tilde) * n;
    const double xp = (x + x_prime) / (2.0 * ctx.d_tilde);
    const double xm = (x - x_prime) / (2.0 * ctx.d_tilde);
    const double dxi = 1.0 / (2.0 * ctx.d_tilde);
    return (lattice_sum_dx(A, xp, ctx.m_cutoff, dxi, +1) -
            lattice_sum_dx(A, xm, ctx.m_cutoff, dxi, side)) /
           (kPi * n);
}

double g_n(const ConvexDomain& dom, int n, double x, double y) {
    if (n < 1) throw DomainRangeError("g_n: n must be >= 1");
    if (x < dom.a() - 1e-12 || x > dom.b() + 1e-12)
        throw DomainRangeError("g_n: x outside [a, b]");
    double y1 = dom.f1(x);
    double h = dom.f2(x) - y1;
    if (h <= 0) throw GeometryError("g_n: degenerate slice (h = 0)");
    return std::sin(n * kPi * (y - y1) / h);
}

namespace {

int adaptive_cutoff(const KernelContext& ctx, double sep) {
    if (ctx.n_cutoff > 0) return ctx.n_cutoff;
    double s = std::max(sep, 1e-2);
    return static_cast<int>(std::ceil(40.0 * ctx.h_tilde / s));
}

}  // namespace

double approx_green(const ConvexDomain& dom, const KernelContext& ctx, Point p, Point q) {
    const double half = 0.5 * ctx.d_tilde;
    if (std::abs(p.x - ctx.x_tilde) > half + 1e-12 || std::abs(q.x - ctx.x_tilde) > half + 1e-12)
        throw DomainRangeError("approx_green: point outside the working slice");
    const double sep = std::abs(p.x - q.x);
    if (sep < 1e-6)
        throw SingularityError("approx_green: |x - x'| < 1e-6 (refused near the singular line)");
    const double xt = p.x - ctx.slice_left();
    const double xt_prime = q.x - ctx.slice_left();
    const int N = adaptive_cutoff(ctx, sep);

    // gn values via the sin(n t) recurrence in n
    const double y1p = dom.f1(p.x), hp = dom.f2(p.x) - y1p;
    const double y1q = dom.f1(q.x), hq = dom.f2(q.x) - y1q;
    if (hp <= 0 || hq <= 0) throw GeometryError("approx_green: degenerate slice");
    const double tp = kPi * (p.y - y1p) / hp;
    const double tq = kPi * (q.y - y1q) / hq;
    double sp1 = std::sin(tp), sp0 = 0.0, cp = 2.0 * std::cos(tp);
    double sq1 = std::sin(tq), sq0 = 0.0, cq = 2.0 * std::cos(tq);

    KahanSum sum;
    for (int n = 1; n <= N; ++n) {
        sum.add(f_n(ctx, n, xt, xt_prime) * sp1 * sq1);
        double sp2 = cp * sp1 - sp0;
        sp0 = sp1;
        sp1 = sp2;
        double sq2 = cq * sq1 - sq0;
        sq0 = sq1;
        sq1 = sq2;
    }
    return sum.value();
}

// ---------------------------------------------------------------------------
// Lattice identity

double poisson_lhs(double a, double xi, long M, bool integral_tail_correction) {
    KahanSum s;
    s.add(1.0 / (a * a));
    for (long m = 1; m <= M; ++m) {
        double den = a * a + 4.0 * kPi * kPi * double(m) * m;
        s.add(2.0 * std::cos(2.0 * kPi * m * xi) / den);
    }
    if (integral_tail_correction) {
        // midpoint Euler-Maclaurin tail for the xi = 0 lattice
        double t = M + 0.5;
        s.add(2.0 * (1.0 / (2.0 * kPi * a)) * (0.5 * kPi - std::atan(2.0 * kPi * t / a)));
    }
    return s.value();
}

double poisson_lhs_tail_bound(long M) { return 2.0 / (4.0 * kPi * kPi * double(M)); }

double poisson_rhs(double a, double xi, long M) {
    KahanSum s;
    for (long m = -M; m <= M; ++m) {
        double e = -a * std::abs(xi + m);
        if (e > -745.0) s.add(std::exp(e) / (2.0 * a));
    }
    return s.value();
}

double poisson_rhs_tail_bound(double a, double xi, long M) {
    double reach = a * (double(M) + 1.0 - std::abs(xi - std::round(xi)));
    return std::exp(-reach) / (a * (1.0 - std::exp(-a)));
}

double poisson_identity_residual(double a, double xi, long m_cutoff) {
    if (a <= 0) throw DomainRangeError("poisson_identity_residual: a must be positive");
    return std::abs(poisson_lhs(a, xi, m_cutoff) - poisson_rhs(a, xi, m_cutoff));
}

// ---------------------------------------------------------------------------
// Kernel-integration reconstruction

namespace {

// Contribution of one quadrature column [xl, xr] evaluated at its midpoint:
//   dx * sum_n f_n(xc; x') * S_n(xc) * g_n(q),
// with S_n the midpoint y-sum of g_n over the column's interior rows.
struct ColumnEval {
    const ConvexDomain* dom;
    const KernelContext* ctx;
    double xq_t;            // x' in translated coordinates
    double tq;              // pi (y' - f1(x')) / h(x')
    int rows_per_unit;

    double operator()(double xl, double xr) const { return at(0.5 * (xl + xr), xr - xl); }

    // width * integrand(xc), xc in translated coordinates
    double at(double xc, double dxw) const {
        const double x_un = xc + ctx->slice_left();  // untranslated abscissa
        double y1 = dom->f1(x_un);
        double y2 = dom->f2(x_un);
        if (y2 - y1 <= 0) return 0.0;
        double sep = std::abs(xc - xq_t);
        int N = adaptive_cutoff(*ctx, sep);

        const double dy = 1.0 / rows_per_unit;
        const int j0 = static_cast<int>(std::ceil(y1 / dy - 0.5));
        const int j1 = static_cast<int>(std::floor(y2 / dy - 0.5));
        if (j1 < j0) return 0.0;

        std::vector<double> S(static_cast<size_t>(N) + 1, 0.0);
        const double h = y2 - y1;
        for (int j = j0; j <= j1; ++j) {
            double y = (j + 0.5) * dy;
            double t = kPi * (y - y1) / h;
            double s1 = std::sin(t), s0 = 0.0, c = 2.0 * std::cos(t);
            for (int n = 1; n <= N; ++n) {
                S[n] += s1;
                double s2 = c * s1 - s0;
                s0 = s1;
                s1 = s2;
            }
        }
        double sq1 = std::sin(tq), sq0 = 0.0, cq = 2.0 * std::cos(tq);
        KahanSum acc;
        for (int n = 1; n <= N; ++n) {
            acc.add(f_n(*ctx, n, xc, xq_t) * S[n] * dy * sq1);
            double sq2 = cq * sq1 - sq0;
            sq0 = sq1;
            sq1 = sq2;
        }
        return dxw * acc.value();
    }
};

}  // namespace

double reconstruct_v1(const ConvexDomain& dom, const KernelContext& ctx, Point q, double c_star) {
    if (std::abs(q.x - ctx.x_tilde) > 1.0 + 1e-12)
        throw DomainRangeError("reconstruct_v1: require |x' - x_tilde| <= 1");
    const double f1q = dom.f1(q.x), f2q = dom.f2(q.x);
    if (q.y < f1q + c_star - 1e-9 || q.y > f2q - c_star + 1e-9)
        throw DomainRangeError("reconstruct_v1: y' outside [f1 + c*, f2 - c*]");

    const int cols_per_unit = 1024;
    const int rows_per_unit = 256;
    const double xq_t = q.x - ctx.slice_left();
    ColumnEval col{&dom, &ctx, xq_t, kPi * (q.y - f1q) / (f2q - f1q), rows_per_unit};

    const double width = ctx.d_tilde;
    const int ncols = std::max(1, static_cast<int>(std::lround(width * cols_per_unit)));
    const double dx = width / ncols;
    const int jsing = std::clamp(static_cast<int>(xq_t / dx), 0, ncols - 1);

    KahanSum base;
    for (int j = 0; j < ncols; ++j) {
        if (j == jsing) continue;
        base.add(col(j * dx, (j + 1) * dx));
    }

    // dyadic refinement of the cell holding the singular line
    auto refine = [&](int levels) {
        KahanSum part;
        double xl = jsing * dx, xr = (jsing + 1) * dx;
        for (int lev = 0; lev < levels; ++lev) {
            double mid = 0.5 * (xl + xr);
            if (xq_t < mid) {
                part.add(col(mid, xr));
                xr = mid;
            } else {
                part.add(col(xl, mid));
                xl = mid;
            }
        }
        // innermost cell: shift the evaluation point off the singular line
        // if the midpoint falls inside the refused radius
        double mid = 0.5 * (xl + xr);
        if (std::abs(mid - xq_t) < 1e-6) mid = xq_t + (mid >= xq_t ? 1e-6 : -1e-6);
        part.add(col.at(mid, xr - xl));
        return part.value();
    };

    double v8 = -(base.value() + refine(8));
    double v7 = -(base.value() + refine(7));
    if (std::abs(v8 - v7) > 1e-4)
        throw QuadratureError("reconstruct_v1: dyadic refinement did not settle");
    return v8;
}

}  // namespace torsionlab
