#include "torsionlab/closed_forms.hpp"

#include <algorithm>
#include <cmath>

namespace torsionlab {

namespace {

// cosh(u)/cosh(v) for 0 <= u <= v without overflow.
double cosh_ratio(double u, double v) {
    return std::exp(u - v) * (1.0 + std::exp(-2.0 * u)) / (1.0 + std::exp(-2.0 * v));
}

}  // namespace

double torsion_rectangle_ex(double N, double x, double y, double tol, SeriesTruncation& trunc) {
    if (tol <= 0) throw DomainRangeError("torsion_rectangle: tol must be positive");
    if (std::abs(x) > 0.5 * N + 1e-12 || y < -1e-12 || y > 1.0 + 1e-12)
        throw DomainRangeError("torsion_rectangle: point outside the rectangle");
    x = std::clamp(x, -0.5 * N, 0.5 * N);
    y = std::clamp(y, 0.0, 1.0);

    const double pi3 = kPi * kPi * kPi;
    const double ax = std::abs(x);
    const double dx = 0.5 * N - ax;  // distance to the lateral walls
    const int n_cap = 100000;

    KahanSum series;
    int n = 1;
    double tail = 0;
    for (;; n += 2) {
        double term = (4.0 / pi3) / (double(n) * n * n) * cosh_ratio(n * kPi * ax, n * kPi * 0.5 * N) *
                      std::sin(n * kPi * y);
        series.add(term);
        // tail after this n: geometric bound from the cosh decay, and the
        // plain cubic bound (sharp when x sits on a wall)
        const double m = n + 2;
        double cubic = (4.0 / pi3) * 0.5 / ((m - 1.0) * (m - 1.0));
        double geo = 1e300;
        if (dx > 0) {
            double q = std::exp(-2.0 * kPi * dx);
            geo = (4.0 / pi3) / (m * m * m) * 2.0 * std::exp(-m * kPi * dx) / (1.0 - q);
        }
        tail = std::min(cubic, geo);
        if (tail < tol || n >= n_cap) break;
    }
    trunc.n_max = n;
    trunc.tail_bound = tail;
    return 0.5 * y * (1.0 - y) - series.value();
}

double torsion_rectangle(double N, double x, double y, double tol) {
    SeriesTruncation t;
    return torsion_rectangle_ex(N, x, y, tol, t);
}

double torsion_ellipse(double N, double x, double y) {
    double r = 4.0 * x * x / (N * N) + 4.0 * y * y;
    if (r > 1.0 + 1e-9) throw DomainRangeError("torsion_ellipse: point outside the ellipse");
    return 0.125 / (1.0 / (N * N) + 1.0) * (1.0 - 4.0 * x * x / (N * N) - 4.0 * y * y);
}

double v1(const ConvexDomain& dom, double x, double y) {
    if (x < dom.a() - 1e-12 || x > dom.b() + 1e-12)
        throw DomainRangeError("v1: x outside [a, b]");
    x = std::clamp(x, dom.a(), dom.b());
    double y1 = dom.f1(x), y2 = dom.f2(x);
    if (y < y1 - 1e-9 || y > y2 + 1e-9)
        throw DomainRangeError("v1: point outside the domain");
    return 0.5 * (y - y1) * (y2 - y);
}

namespace {

// First/second derivative of f at x, avoiding stencils that straddle a
// breakpoint: a one-sided stencil on the clean side is used instead.
struct BoundaryDerivs {
    double d1, d2;
    bool one_sided;
};

BoundaryDerivs derive(const std::function<double(double)>& f, const ConvexDomain::Fn& df,
                      const ConvexDomain::Fn& d2f, double x, double lo, double hi,
                      const std::vector<double>& kinks) {
    if (df && d2f) return {df(x), d2f(x), false};
    const double s = 1e-4;
    bool kink_near = false;
    for (double k : kinks)
        if (std::abs(k - x) < 3.5 * s) kink_near = true;
    auto centered_ok = [&](void) {
        return !kink_near && x - s >= lo && x + s <= hi;
    };
    if (centered_ok()) {
        double fm = f(x - s), f0 = f(x), fp = f(x + s);
        return {(fp - fm) / (2 * s), (fp - 2 * f0 + fm) / (s * s), false};
    }
    // pick the side with more room / no kink
    double room_r = hi - x, room_l = x - lo;
    bool go_right = room_r >= room_l;
    if (kink_near) {
        // choose the side whose 3-step stencil avoids every kink
        auto clean = [&](double dir) {
            for (double k : kinks) {
                double t = (k - x) * dir;
                if (t > -1e-15 && t < 3.5 * s) return false;
            }
            return true;
        };
        if (clean(1.0) && room_r >= 3 * s) go_right = true;
        else if (clean(-1.0) && room_l >= 3 * s) go_right = false;
    }
    double dir = go_right ? 1.0 : -1.0;
    double f0 = f(x), fa = f(x + dir * s), fb = f(x + dir * 2 * s), fc = f(x + dir * 3 * s);
    double d1 = dir * (-3 * f0 + 4 * fa - fb) / (2 * s);
    double d2 = (2 * f0 - 5 * fa + 4 * fb - fc) / (s * s);
    return {d1, d2, true};
}

}  // namespace

SymMat2 v1_hessian(const ConvexDomain& dom, double x, double y) {
    if (!dom.inside(x, y)) throw DomainRangeError("v1_hessian: point outside the domain");
    auto b1 = derive([&dom](double t) { return dom.f1(t); }, dom.df1(), dom.d2f1(), x, dom.a(),
                     dom.b(), dom.breakpoints());
    auto b2 = derive([&dom](double t) { return dom.f2(t); }, dom.df2(), dom.d2f2(), x, dom.a(),
                     dom.b(), dom.breakpoints());
    double y1 = dom.f1(x), y2 = dom.f2(x);
    SymMat2 H;
    H.xx = 0.5 * (-b1.d2 * (y2 - y) - 2.0 * b1.d1 * b2.d1 + b2.d2 * (y - y1));
    H.xy = 0.5 * (b1.d1 + b2.d1);
    H.yy = -1.0;
    return H;
}

ErrorBudget error_budget(const ConvexDomain& dom, double x_tilde, double c1, double C1) {
    if (!(c1 > 0 && C1 > 0))
        throw DomainRangeError("error_budget: constants must be positive");
    const double ht = dom.height(x_tilde);
    if (ht < 0.5 - 1e-12)
        throw HypothesisError("error_budget: requires h(x_tilde) >= 1/2");
    const double d = dom.dist_to_ends(x_tilde);
    const double T = 0.75 * d;

    auto h = [&](double x) { return dom.f2(x) - dom.f1(x); };
    auto weighted = [&](double x) { return std::exp(-c1 * std::abs(x - x_tilde)) * std::abs(h(x) - ht); };

    // outward scan at 1024 samples per unit; once exp(-c1 t) drops below the
    // running max, no farther sample can win (|h - h(x~)| <= 1)
    const double step = 1.0 / 1024.0;
    const double decay = std::exp(-c1 * step);
    double best = 0, best_x = x_tilde;
    for (double dir : {+1.0, -1.0}) {
        double w = 1.0;
        for (double t = step; t <= T; t += step) {
            w *= decay;
            if (w < best) break;
            double x = x_tilde + dir * t;
            double v = w * std::abs(h(x) - ht);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
    }
    for (double k : dom.breakpoints()) {
        if (std::abs(k - x_tilde) <= T) {
            double v = weighted(k);
            if (v > best) {
                best = v;
                best_x = k;
            }
        }
    }
    // local refinement around the sampled argmax
    if (best > 0) {
        double lo = std::max(x_tilde - T, best_x - step);
        double hi = std::min(x_tilde + T, best_x + step);
        double xr = golden_max(weighted, lo, hi, 1e-12);
        best = std::max(best, weighted(xr));
    }

    ErrorBudget eb;
    eb.x_tilde = x_tilde;
    eb.c1 = c1;
    eb.C1 = C1;
    eb.term_exp = C1 * std::exp(-c1 * d);
    eb.term_osc = C1 * best;
    eb.total = eb.term_exp + eb.term_osc;
    return eb;
}

}  // namespace torsionlab
