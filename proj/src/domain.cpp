#include "torsionlab/domain.hpp"

#include <algorithm>
#include <cmath>

#include "torsionlab/closed_forms.hpp"

namespace torsionlab {

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::Rectangle: return "rectangle";
        case DomainKind::Ellipse: return "ellipse";
        case DomainKind::Omega1: return "omega1";
        case DomainKind::Omega2: return "omega2";
        case DomainKind::PiecewiseLinear: return "piecewise_linear";
        case DomainKind::CustomHeight: return "custom_height";
    }
    return "unknown";
}

ConvexDomain ConvexDomain::rectangle(double N) {
    if (N <= 0) throw GeometryError("rectangle: N must be positive");
    ConvexDomain d;
    d.kind_ = DomainKind::Rectangle;
    d.N_ = N;
    d.a_ = -0.5 * N;
    d.b_ = 0.5 * N;
    d.f1_ = [](double) { return 0.0; };
    d.f2_ = [](double) { return 1.0; };
    d.df1_ = d.df2_ = d.d2f1_ = d.d2f2_ = [](double) { return 0.0; };
    d.x_bar_ = 0.0;
    return d;
}

ConvexDomain ConvexDomain::ellipse(double N) {
    if (N <= 0) throw GeometryError("ellipse: N must be positive");
    ConvexDomain d;
    d.kind_ = DomainKind::Ellipse;
    d.N_ = N;
    d.a_ = -0.5 * N;
    d.b_ = 0.5 * N;
    auto g = [N](double x) { return std::sqrt(std::max(0.0, 0.25 - x * x / (N * N))); };
    d.f1_ = [g](double x) { return 0.5 - g(x); };
    d.f2_ = [g](double x) { return 0.5 + g(x); };
    auto dg = [N, g](double x) {
        double gx = g(x);
        if (gx == 0.0) return 0.0;  // vertical tangent; callers avoid the tips
        return -x / (N * N * gx);
    };
    auto d2g = [N, g](double x) {
        double gx = g(x);
        if (gx == 0.0) return 0.0;
        double t = x / (N * N);
        return -1.0 / (N * N * gx) - t * t / (gx * gx * gx);
    };
    d.df1_ = [dg](double x) { return -dg(x); };
    d.df2_ = dg;
    d.d2f1_ = [d2g](double x) { return -d2g(x); };
    d.d2f2_ = d2g;
    d.x_bar_ = 0.0;
    return d;
}

ConvexDomain ConvexDomain::omega1(double N) {
    if (N < 2) throw GeometryError("omega1: require N >= 2");
    ConvexDomain d;
    d.kind_ = DomainKind::Omega1;
    d.N_ = N;
    d.a_ = 0.0;
    d.b_ = N;
    const double rtN = std::sqrt(N);
    const double N3 = N * N * N;
    d.f1_ = [](double) { return 0.0; };
    d.f2_ = [rtN, N3](double x) {
        if (x <= rtN) return x / rtN;
        return 1.0 - (x - rtN) / N3;
    };
    d.df1_ = [](double) { return 0.0; };
    d.df2_ = [rtN, N3](double x) { return x < rtN ? 1.0 / rtN : -1.0 / N3; };
    d.d2f1_ = [](double) { return 0.0; };
    d.d2f2_ = [](double) { return 0.0; };
    d.breakpoints_ = {rtN};
    d.x_bar_ = rtN;
    return d;
}

ConvexDomain ConvexDomain::omega2(double N) {
    // need N^{1/4} < N/2 for the two pieces to be ordered
    if (N < 4) throw GeometryError("omega2: require N >= 4");
    ConvexDomain d;
    d.kind_ = DomainKind::Omega2;
    d.N_ = N;
    d.a_ = -0.5 * N;
    d.b_ = 0.5 * N;
    const double q = std::pow(N, 0.25);
    const double cap = 1.0 - std::pow(N, -1.5);  // h at the parabolic/linear junction
    const double run = 0.5 * N - q;
    d.f1_ = [](double) { return 0.0; };
    d.f2_ = [N, q, cap, run](double x) {
        double ax = std::abs(x);
        if (ax <= q) return 1.0 - ax * ax / (N * N);
        return cap * (1.0 - (ax - q) / run);
    };
    d.df1_ = [](double) { return 0.0; };
    d.df2_ = [N, q, cap, run](double x) {
        double ax = std::abs(x);
        double s = x < 0 ? -1.0 : 1.0;
        if (ax < q) return s * (-2.0 * ax / (N * N));
        return s * (-cap / run);
    };
    d.d2f1_ = [](double) { return 0.0; };
    d.d2f2_ = [N, q](double x) {
        double ax = std::abs(x);
        return ax < q ? -2.0 / (N * N) : 0.0;
    };
    d.breakpoints_ = {-q, 0.0, q};  // |x| kink at 0 is removable for f2 but kept for stencils
    d.x_bar_ = 0.0;
    return d;
}

ConvexDomain ConvexDomain::custom_height(double a, double b, Fn f1, Fn f2,
                                         std::vector<double> breakpoints) {
    if (!(b > a)) throw GeometryError("custom_height: require b > a");
    ConvexDomain d;
    d.kind_ = DomainKind::CustomHeight;
    d.a_ = a;
    d.b_ = b;
    d.f1_ = std::move(f1);
    d.f2_ = std::move(f2);
    d.breakpoints_ = std::move(breakpoints);
    auto h = [&d](double x) { return d.f2_(x) - d.f1_(x); };
    d.x_bar_ = golden_max(h, a, b, 1e-12 * (b - a));
    return d;
}

namespace {

struct Pt {
    double x, y;
};

// Convex hull (Andrew monotone chain); returns CCW hull without repetition.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end(), [](const Pt& p, const Pt& q) {
        return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Pt& p, const Pt& q) { return p.x == q.x && p.y == q.y; }),
              pts.end());
    auto cross = [](const Pt& o, const Pt& p, const Pt& q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw GeometryError("piecewise_linear: need at least 3 distinct vertices");
    std::vector<Pt> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

ConvexDomain ConvexDomain::piecewise_linear(const std::vector<std::pair<double, double>>& verts) {
    std::vector<Pt> pts;
    pts.reserve(verts.size());
    for (auto& v : verts) pts.push_back({v.first, v.second});
    std::vector<Pt> hull = convex_hull(pts);
    const int n = static_cast<int>(hull.size());

    // Rotating calipers: the minimal width is attained over edge directions.
    double best_w = 1e300, best_theta = 0;
    for (int i = 0; i < n; ++i) {
        const Pt& p = hull[i];
        const Pt& q = hull[(i + 1) % n];
        double ex = q.x - p.x, ey = q.y - p.y;
        double len = std::hypot(ex, ey);
        if (len == 0) continue;
        double w = 0;
        for (const Pt& r : hull) {
            double d = std::abs((r.x - p.x) * ey - (r.y - p.y) * ex) / len;
            w = std::max(w, d);
        }
        if (w < best_w) {
            best_w = w;
            best_theta = std::atan2(ey, ex);
        }
    }
    if (best_w <= 0) throw GeometryError("piecewise_linear: degenerate polygon");

    // Rotate the minimal-width edge to horizontal, drop to y = 0, rescale
    // vertically so max h = 1.
    const double c = std::cos(-best_theta), s = std::sin(-best_theta);
    double ymin = 1e300;
    for (Pt& p : hull) {
        double x = c * p.x - s * p.y;
        double y = s * p.x + c * p.y;
        p = {x, y};
        ymin = std::min(ymin, y);
    }
    for (Pt& p : hull) p.y = (p.y - ymin) / best_w;

    // Split into lower/upper chains between the extreme abscissae.
    auto cmp = [](const Pt& p, const Pt& q) { return p.x < q.x || (p.x == q.x && p.y < q.y); };
    Pt lm = *std::min_element(hull.begin(), hull.end(), cmp);
    Pt rm = *std::max_element(hull.begin(), hull.end(), cmp);
    std::vector<Pt> lower, upper;
    for (const Pt& p : hull) {
        double t = (p.x - lm.x) / (rm.x - lm.x);
        (void)t;
        // classify by side of the chord lm->rm; ties (the chord itself) go to both
        double side = (rm.x - lm.x) * (p.y - lm.y) - (rm.y - lm.y) * (p.x - lm.x);
        if (side <= 0) lower.push_back(p);
        if (side >= 0) upper.push_back(p);
    }
    std::sort(lower.begin(), lower.end(), cmp);
    std::sort(upper.begin(), upper.end(), cmp);
    // vertical left/right edges: keep the extreme y on each chain per x
    auto dedup = [](std::vector<Pt>& chain, bool keep_low) {
        std::vector<Pt> out;
        for (const Pt& p : chain) {
            if (!out.empty() && out.back().x == p.x) {
                if (keep_low ? (p.y < out.back().y) : (p.y > out.back().y)) out.back() = p;
            } else {
                out.push_back(p);
            }
        }
        chain = out;
    };
    dedup(lower, true);
    dedup(upper, false);

    auto make_interp = [](std::vector<Pt> chain) {
        return [chain](double x) {
            auto it = std::lower_bound(chain.begin(), chain.end(), x,
                                       [](const Pt& p, double v) { return p.x < v; });
            if (it == chain.begin()) return chain.front().y;
            if (it == chain.end()) return chain.back().y;
            const Pt& q = *it;
            const Pt& p = *(it - 1);
            if (q.x == p.x) return p.y;
            double t = (x - p.x) / (q.x - p.x);
            return p.y + t * (q.y - p.y);
        };
    };

    ConvexDomain d;
    d.kind_ = DomainKind::PiecewiseLinear;
    d.a_ = lm.x;
    d.b_ = rm.x;
    d.f1_ = make_interp(lower);
    d.f2_ = make_interp(upper);
    for (const Pt& p : lower) d.breakpoints_.push_back(p.x);
    for (const Pt& p : upper) d.breakpoints_.push_back(p.x);
    std::sort(d.breakpoints_.begin(), d.breakpoints_.end());
    d.breakpoints_.erase(std::unique(d.breakpoints_.begin(), d.breakpoints_.end()),
                         d.breakpoints_.end());
    auto h = [&d](double x) { return d.f2_(x) - d.f1_(x); };
    // argmax of a piecewise-linear concave function sits at a breakpoint
    double xb = d.a_, hb = h(d.a_);
    for (double x : d.breakpoints_) {
        if (x < d.a_ || x > d.b_) continue;
        double hx = h(x);
        if (hx > hb) {
            hb = hx;
            xb = x;
        }
    }
    d.x_bar_ = xb;
    return d;
}

double ConvexDomain::height(double x) const {
    if (x < a_ - 1e-12 || x > b_ + 1e-12)
        throw DomainRangeError("height: x outside [a, b]");
    x = std::clamp(x, a_, b_);
    return f2_(x) - f1_(x);
}

double ConvexDomain::dist_to_ends(double x) const {
    if (x < a_ - 1e-12 || x > b_ + 1e-12)
        throw DomainRangeError("dist_to_ends: x outside [a, b]");
    x = std::clamp(x, a_, b_);
    return std::min(x - a_, b_ - x);
}

// ---------------------------------------------------------------------------

namespace {

// Length of the (single) interval {x : h(x) >= level}; h concave with
// maximum >= level at x_bar.  Crossings located by bisection.
struct Superlevel {
    double lo, hi;
    double length() const { return hi - lo; }
};

Superlevel height_superlevel(const ConvexDomain& dom, double level) {
    const double a = dom.a(), b = dom.b(), xb = dom.x_bar();
    auto h = [&](double x) { return dom.f2(x) - dom.f1(x); };
    Superlevel s{a, b};
    if (h(a) < level)
        s.lo = bisect([&](double x) { return h(x) - level; }, a, xb, 1e-12);
    if (h(b) < level)
        s.hi = bisect([&](double x) { return h(x) - level; }, xb, b, 1e-12);
    return s;
}

}  // namespace

LengthScaleReport length_scale(const ConvexDomain& dom) {
    const double N = dom.span();
    // phi(L) = |{h >= 1 - L^-2}| - L is strictly decreasing; its root is L.
    auto phi = [&](double L) {
        double level = 1.0 - 1.0 / (L * L);
        return height_superlevel(dom, level).length() - L;
    };
    double lo = 1.0, hi = N;
    if (phi(hi) >= 0.0) {
        lo = hi;  // h == 1 throughout: the window is the whole domain
    } else {
        while (phi(lo) < 0.0 && lo > 1e-6) lo *= 0.5;
        lo = bisect(phi, lo, hi, 1e-10);
    }
    const double L = lo;
    Superlevel s = height_superlevel(dom, 1.0 - 1.0 / (L * L));
    // center a window of length L inside the superlevel interval
    double c = 0.5 * (s.lo + s.hi);
    double Ilo = std::max(s.lo, c - 0.5 * L);
    double Ihi = Ilo + L;
    if (Ihi > s.hi + 1e-9) {
        Ihi = s.hi;
        Ilo = Ihi - L;
    }
    LengthScaleReport rep;
    rep.L = L;
    rep.I_lo = Ilo;
    rep.I_hi = Ihi;
    rep.Ip_lo = 0.5 * (Ilo + Ihi) - 0.25 * L;
    rep.Ip_hi = 0.5 * (Ilo + Ihi) + 0.25 * L;
    return rep;
}

// ---------------------------------------------------------------------------

std::optional<PropertyMaxCertificate> find_property_max(const ConvexDomain& dom, double M,
                                                        double c1, double C1,
                                                        CertificateSelection sel) {
    if (!(M > 2.0)) throw GeometryError("find_property_max: require M > 2");
    if (!(c1 > 0.0 && C1 > 0.0))
        throw GeometryError("find_property_max: constants must be positive");
    const double xb = dom.x_bar();
    if (xb - M < dom.a() || xb + M > dom.b())
        throw GeometryError("find_property_max: window [x_bar - M, x_bar + M] leaves the domain");

    auto h = [&](double x) { return dom.f2(x) - dom.f1(x); };

    // 64 log-spaced delta candidates in [1e-6, 0.25]
    std::vector<double> grid(64);
    const double lo = 1e-6, hi = 0.25;
    for (int i = 0; i < 64; ++i)
        grid[i] = lo * std::pow(hi / lo, i / 63.0);

    std::optional<PropertyMaxCertificate> best;
    for (int gi = 63; gi >= 0; --gi) {
        const double delta = grid[gi];
        const double level = 1.0 - 2.0 * delta;
        PropertyMaxCertificate cert;
        cert.M = M;
        cert.delta = delta;
        cert.c1 = c1;
        cert.C1 = C1;
        // left crossing of h = 1 - 2 delta inside [x_bar - M, x_bar]
        if (h(xb - M) >= level) {
            cert.x_minus = xb - M;
            cert.clamped_minus = true;
        } else {
            cert.x_minus = bisect([&](double x) { return h(x) - level; }, xb - M, xb, 1e-10);
        }
        if (h(xb + M) >= level) {
            cert.x_plus = xb + M;
            cert.clamped_plus = true;
        } else {
            cert.x_plus = bisect([&](double x) { return h(x) - level; }, xb, xb + M, 1e-10);
        }

        // worst error over a dense grid of x~ in [x_minus, x_plus]
        bool admissible = true;
        double worst = 0;
        const int K = 256;
        for (int k = 0; k <= K; ++k) {
            double xt = cert.x_minus + (cert.x_plus - cert.x_minus) * k / K;
            if (h(xt) < 0.5) {
                admissible = false;  // error functional hypothesis violated
                break;
            }
            double e = error_budget(dom, xt, c1, C1).total;
            worst = std::max(worst, e);
            if (worst > delta / 100.0) {
                admissible = false;
                break;
            }
        }
        cert.error_at_worst = worst;
        if (!admissible) continue;
        best = cert;
        if (sel == CertificateSelection::Largest) return best;
        // Smallest: keep scanning downward; the last admissible wins
    }
    return best;
}

// ---------------------------------------------------------------------------

ValidationReport validate(const ConvexDomain& dom) {
    ValidationReport rep;
    auto flag = [&rep](const std::string& what, double x) {
        rep.valid = false;
        if (rep.issues.size() < 16) rep.issues.push_back({what, x});
    };

    const int S = 4096;
    std::vector<double> xs;
    xs.reserve(S + 8);
    for (int i = 0; i <= S; ++i) xs.push_back(dom.a() + dom.span() * i / S);
    for (double b : dom.breakpoints())
        if (b >= dom.a() && b <= dom.b()) xs.push_back(b);
    std::sort(xs.begin(), xs.end());

    double hmax = 0;
    for (double x : xs) {
        double y1 = dom.f1(x), y2 = dom.f2(x);
        if (y1 < -1e-9) flag("f1 < 0", x);
        if (y2 > 1.0 + 1e-9) flag("f2 > 1", x);
        if (y1 > y2 + 1e-9) flag("f1 > f2", x);
        hmax = std::max(hmax, y2 - y1);
    }
    if (std::abs(hmax - 1.0) > 1e-9) flag("max h != 1", dom.x_bar());

    // sampled second-difference sign checks; tolerance scaled to the span
    const double tol = 1e-7 * std::max(1.0, dom.span());
    for (size_t i = 1; i + 1 < xs.size(); ++i) {
        double xm = xs[i - 1], x0 = xs[i], xp = xs[i + 1];
        if (xp - xm < 1e-12) continue;
        // divided second difference (valid for non-uniform triples)
        auto second = [&](auto&& f) {
            double d1 = (f(x0) - f(xm)) / (x0 - xm);
            double d2 = (f(xp) - f(x0)) / (xp - x0);
            return (d2 - d1) / (0.5 * (xp - xm));
        };
        if (second([&](double x) { return dom.f1(x); }) < -tol) flag("f1 not convex", x0);
        if (second([&](double x) { return dom.f2(x); }) > tol) flag("f2 not concave", x0);
    }
    return rep;
}

}  // namespace torsionlab
