#pragma once

// Shared error types and small numeric helpers used across torsionlab.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torsionlab {

// ---------------------------------------------------------------------------
// Error taxonomy.  All preconditions throw one of these; report-only
// operations never throw.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point or parameter outside the admissible range of an evaluation.
struct DomainRangeError : Error {
    using Error::Error;
};

// Ill-posed geometric request (window leaves the domain, degenerate slice...).
struct GeometryError : Error {
    using Error::Error;
};

// Kernel evaluated at (or too near) its singular configuration.
struct SingularityError : Error {
    using Error::Error;
};

// Iterative solve failed to converge; message carries the residual.
struct NumericalError : Error {
    using Error::Error;
};

// Quadrature refinement failed to settle.
struct QuadratureError : Error {
    using Error::Error;
};

// Grid too coarse for the requested domain.
struct ResolutionError : Error {
    using Error::Error;
};

// A stated hypothesis of the evaluated estimate does not hold.
struct HypothesisError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Numerics

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Root of a monotone continuous function on [lo, hi] by bisection.
// f(lo) and f(hi) must bracket zero; tolerance is on the argument.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-10) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw Error("bisect: endpoints do not bracket a root");
    while (hi - lo > xtol) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Maximizer of a unimodal function on [lo, hi] (golden section).
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double xtol = 1e-10) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Compensated (Kahan) accumulator for deterministic long sums.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// Ordinary least squares line y = a + b*x; returns {a, b, rms residual}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("fit_line: need at least two points");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw Error("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - out.intercept - out.slope * x[i];
        ss += r * r;
    }
    out.rms = std::sqrt(ss / n);
    return out;
}

// Parse a spacing given either as a decimal ("0.015625") or a rational
// ("1/64"); rationals are evaluated exactly in double.
inline double parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    double num = std::stod(s.substr(0, slash));
    double den = std::stod(s.substr(slash + 1));
    if (den == 0.0) throw Error("parse_rational: zero denominator");
    return num / den;
}

}  // namespace torsionlab
