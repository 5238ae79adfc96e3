#pragma once

// Normalized convex planar domains described by a pair of boundary height
// functions on [a, b]:
//
//   Omega = { (x, y) : a <= x <= b,  f1(x) <= y <= f2(x) },
//
// with 0 <= f1 <= f2 <= 1, f1 convex, f2 concave, and max_x (f2 - f1) = 1.
// The vertical thickness h(x) = f2(x) - f1(x) is concave.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torsionlab/common.hpp"

namespace torsionlab {

enum class DomainKind {
    Rectangle,
    Ellipse,
    Omega1,
    Omega2,
    PiecewiseLinear,
    CustomHeight,
};

std::string to_string(DomainKind k);

class ConvexDomain {
  public:
    using Fn = std::function<double(double)>;

    // Built-in families. N controls the eccentricity (diameter ~ N).
    static ConvexDomain rectangle(double N);
    static ConvexDomain ellipse(double N);
    static ConvexDomain omega1(double N);
    static ConvexDomain omega2(double N);

    // Convex polygon; rotated to its minimal-width orientation (rotating
    // calipers) and rescaled vertically so that max h = 1.
    static ConvexDomain piecewise_linear(const std::vector<std::pair<double, double>>& vertices);

    // Caller-supplied boundary functions, already normalized.
    static ConvexDomain custom_height(double a, double b, Fn f1, Fn f2,
                                      std::vector<double> breakpoints = {});

    double a() const { return a_; }
    double b() const { return b_; }
    double span() const { return b_ - a_; }
    DomainKind kind() const { return kind_; }
    double family_N() const { return N_; }

    double f1(double x) const { return f1_(x); }
    double f2(double x) const { return f2_(x); }

    // h(x) = f2(x) - f1(x).  Throws DomainRangeError outside [a, b].
    double height(double x) const;

    // d(x) = min(x - a, b - x).
    double dist_to_ends(double x) const;

    // Abscissa where h attains its maximum (exact for the built-in families).
    double x_bar() const { return x_bar_; }

    // Kink locations of f1/f2, if any (used by one-sided stencils).
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    bool inside(double x, double y) const {
        return x >= a_ && x <= b_ && y >= f1_(x) && y <= f2_(x);
    }

    // Analytic derivatives of the boundary functions when the family has
    // them; empty std::function otherwise (callers fall back to finite
    // differences).
    const Fn& df1() const { return df1_; }
    const Fn& df2() const { return df2_; }
    const Fn& d2f1() const { return d2f1_; }
    const Fn& d2f2() const { return d2f2_; }

  private:
    ConvexDomain() = default;

    double a_ = 0, b_ = 1;
    DomainKind kind_ = DomainKind::CustomHeight;
    double N_ = 0;  // family parameter; 0 when not applicable
    Fn f1_, f2_;
    Fn df1_, df2_, d2f1_, d2f2_;
    std::vector<double> breakpoints_;
    double x_bar_ = 0;
};

// ---------------------------------------------------------------------------
// Reports

struct LengthScaleReport {
    double L = 0;                  // largest L with h >= 1 - 1/L^2 on a window of length L
    double I_lo = 0, I_hi = 0;     // the realizing window
    double Ip_lo = 0, Ip_hi = 0;   // concentric window of half the length
};

struct PropertyMaxCertificate {
    double M = 0;
    double delta = 0;
    double x_minus = 0, x_plus = 0;  // h = 1 - 2*delta crossings (or clamped window edges)
    bool clamped_minus = false;      // no crossing inside [x_bar - M, x_bar]; edge used
    bool clamped_plus = false;
    double error_at_worst = 0;       // max of the error functional over [x_minus, x_plus]
    double c1 = 0, C1 = 0;           // constants the certificate was checked with
};

struct ValidationIssue {
    std::string what;
    double x = 0;
};

struct ValidationReport {
    bool valid = true;
    std::vector<ValidationIssue> issues;
};

// ---------------------------------------------------------------------------
// Operations

// Largest L such that h >= 1 - L^-2 on some window of length L.  Found by
// bisection on L against the length of the superlevel set {h >= 1 - L^-2}
// (a single interval, h being concave).
LengthScaleReport length_scale(const ConvexDomain& dom);

// Which certificate to return when several delta grid points are admissible.
// Largest follows the search order written in the flatness definition;
// Smallest is the scale relevant to the Hessian comparability estimate,
// which wants delta as small as the error functional allows.
enum class CertificateSelection { Largest, Smallest };

// Quantitative flatness certificate for h near its maximum: a delta such
// that the approximation-error functional stays below delta/100 on the
// whole plateau [x_minus, x_plus] where h >= 1 - 2*delta (intersected with
// [x_bar - M, x_bar + M]).  Returns nullopt when no grid delta qualifies.
std::optional<PropertyMaxCertificate> find_property_max(
    const ConvexDomain& dom, double M, double c1, double C1,
    CertificateSelection sel = CertificateSelection::Largest);

// Report-only invariant audit (ordering, convexity/concavity, normalization).
ValidationReport validate(const ConvexDomain& dom);

}  // namespace torsionlab
