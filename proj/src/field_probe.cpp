#include "torsionlab/field_probe.hpp"

#include <algorithm>
#include <cmath>

namespace torsionlab {

namespace {

// Solve the small SPD normal-equations system by Gaussian elimination with
// partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        if (std::abs(A[c][c]) < 1e-300) throw NumericalError("solve_dense: singular system");
        for (int r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

// Quadratic q = c0 + c1 u + c2 v + c3 u^2 + c4 u v + c5 v^2 fitted to
// samples; returns the 6 coefficients.
std::vector<double> fit_quadratic_2d(const std::vector<double>& us, const std::vector<double>& vs,
                                     const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<std::vector<double>> M(6, std::vector<double>(6, 0.0));
    std::vector<double> rhs(6, 0.0);
    for (int s = 0; s < n; ++s) {
        double row[6] = {1.0, us[s], vs[s], us[s] * us[s], us[s] * vs[s], vs[s] * vs[s]};
        for (int a = 0; a < 6; ++a) {
            rhs[a] += row[a] * f[s];
            for (int b = 0; b < 6; ++b) M[a][b] += row[a] * row[b];
        }
    }
    return solve_dense(std::move(M), std::move(rhs));
}

}  // namespace

double ray_extent(const ConvexDomain& dom, double x, double y, double cx, double cy,
                  double t_max) {
    auto ok = [&](double t) {
        double px = x + t * cx, py = y + t * cy;
        return px >= dom.a() && px <= dom.b() && py >= dom.f1(px) && py <= dom.f2(px);
    };
    if (ok(t_max)) return t_max;
    double lo = 0, hi = t_max;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

SymMat2 hessian_at_node(const ScalarField& field, int i, int j) {
    const Grid& g = field.grid;
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
            if (!g.is_interior(i + di, j + dj))
                throw GeometryError("hessian_at_node: 5x5 neighbourhood not interior");
    std::vector<double> us, vs, f;
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
            us.push_back(di * g.dx);
            vs.push_back(dj * g.dy);
            f.push_back(field.at_node(i + di, j + dj));
        }
    auto c = fit_quadratic_2d(us, vs, f);
    return {2.0 * c[3], c[4], 2.0 * c[5]};
}

MaxReport locate_max(const ScalarField& field) {
    const Grid& g = field.grid;
    // grid argmax; scan order gives the smallest-x, then smallest-y tie-break
    int bi = -1, bj = -1;
    double best = -1e300;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            if (!g.interior[static_cast<size_t>(g.id(i, j))]) continue;
            double v = field.at_node(i, j);
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0) throw GeometryError("locate_max: field has no interior nodes");
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di)
            if (!g.is_interior(bi + di, bj + dj))
                throw GeometryError("locate_max: argmax touches the boundary ring");

    std::vector<double> us, vs, f;
    for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
            us.push_back(di * g.dx);
            vs.push_back(dj * g.dy);
            f.push_back(field.at_node(bi + di, bj + dj));
        }
    auto c = fit_quadratic_2d(us, vs, f);

    // stationary point of the fitted quadratic (clipped to the stencil)
    double det = 4.0 * c[3] * c[5] - c[4] * c[4];
    double du = 0, dv = 0;
    if (std::abs(det) > 1e-300) {
        du = (-2.0 * c[5] * c[1] + c[4] * c[2]) / det;
        dv = (c[4] * c[1] - 2.0 * c[3] * c[2]) / det;
    }
    du = std::clamp(du, -2.0 * g.dx, 2.0 * g.dx);
    dv = std::clamp(dv, -2.0 * g.dy, 2.0 * g.dy);

    MaxReport rep;
    rep.x_star = g.x(bi) + du;
    rep.y_star = g.y(bj) + dv;
    rep.v_star = c[0] + c[1] * du + c[2] * dv + c[3] * du * du + c[4] * du * dv + c[5] * dv * dv;
    rep.hessian = {2.0 * c[3], c[4], 2.0 * c[5]};

    // directional second derivatives: 1-D quadratic fits with
    // direction-adapted windows
    const ConvexDomain& dom = *field.domain;
    const double margin = 2.0 * std::max(g.dx, g.dy);
    for (int k = 0; k < 16; ++k) {
        double a = k * kPi / 16.0;
        double cx = std::cos(a), cy = std::sin(a);
        double want = std::min(1.0 / std::max(std::abs(cx), 1e-12),
                               0.2 / std::max(std::abs(cy), 1e-12));
        double tp = ray_extent(dom, rep.x_star, rep.y_star, cx, cy, want) - margin;
        double tm = ray_extent(dom, rep.x_star, rep.y_star, -cx, -cy, want) - margin;
        double T = std::max(std::min(tp, tm), 4.0 * std::max(g.dx, g.dy));
        const int S = 16;
        std::vector<double> ts, fv;
        for (int s = -S; s <= S; ++s) {
            double t = T * s / S;
            ts.push_back(t);
            fv.push_back(field.eval(rep.x_star + t * cx, rep.y_star + t * cy));
        }
        // 1-D LSQ quadratic
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, b0 = 0, b1 = 0, b2 = 0;
        for (size_t s = 0; s < ts.size(); ++s) {
            double t = ts[s], ft = fv[s];
            s0 += 1;
            s1 += t;
            s2 += t * t;
            s3 += t * t * t;
            s4 += t * t * t * t;
            b0 += ft;
            b1 += ft * t;
            b2 += ft * t * t;
        }
        auto sol = solve_dense({{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}}, {b0, b1, b2});
        rep.directional.push_back({a, 2.0 * sol[2], T});
    }
    return rep;
}

// ---------------------------------------------------------------------------

SuperlevelReport superlevel_projection(const ScalarField& field, double level) {
    const Grid& g = field.grid;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<std::pair<double, double>> boundary_pts;

    auto crossing = [&](double va, double vb, double ca, double cb) {
        // linear interpolation of the level crossing between two samples
        double t = (level - va) / (vb - va);
        return ca + t * (cb - ca);
    };

    // column scan for y extents
    for (int i = 0; i < g.nx; ++i) {
        bool prev_in = false;
        double prev_v = 0;
        for (int j = 0; j < g.ny; ++j) {
            double v = field.at_node(i, j);
            bool in = v >= level;
            if (in) {
                ymin = std::min(ymin, g.y(j));
                ymax = std::max(ymax, g.y(j));
                xmin = std::min(xmin, g.x(i));
                xmax = std::max(xmax, g.x(i));
            }
            if (j > 0 && in != prev_in) {
                double yc = crossing(prev_v, v, g.y(j - 1), g.y(j));
                boundary_pts.push_back({g.x(i), yc});
                ymin = std::min(ymin, yc);
                ymax = std::max(ymax, yc);
            }
            prev_in = in;
            prev_v = v;
        }
    }
    // row scan for x extents
    for (int j = 0; j < g.ny; ++j) {
        bool prev_in = false;
        double prev_v = 0;
        for (int i = 0; i < g.nx; ++i) {
            double v = field.at_node(i, j);
            bool in = v >= level;
            if (i > 0 && in != prev_in) {
                double xc = crossing(prev_v, v, g.x(i - 1), g.x(i));
                boundary_pts.push_back({xc, g.y(j)});
                xmin = std::min(xmin, xc);
                xmax = std::max(xmax, xc);
            }
            prev_in = in;
            prev_v = v;
        }
    }
    if (xmin > xmax) throw DomainRangeError("superlevel_projection: empty superlevel set");

    SuperlevelReport rep;
    rep.x_len = xmax - xmin;
    rep.y_len = ymax - ymin;
    if (boundary_pts.size() < 2) {
        rep.diameter = 0;
        return rep;
    }
    // diameter via the convex hull (monotone chain) of the crossing points
    std::sort(boundary_pts.begin(), boundary_pts.end());
    boundary_pts.erase(std::unique(boundary_pts.begin(), boundary_pts.end()),
                       boundary_pts.end());
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& p,
                    const std::pair<double, double>& q) {
        return (p.first - o.first) * (q.second - o.second) -
               (p.second - o.second) * (q.first - o.first);
    };
    const size_t np = boundary_pts.size();
    std::vector<std::pair<double, double>> hull(2 * np);
    size_t k = 0;
    for (size_t i = 0; i < np; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], boundary_pts[i]) <= 0) --k;
        hull[k++] = boundary_pts[i];
    }
    for (size_t i = np - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], boundary_pts[i]) <= 0) --k;
        hull[k++] = boundary_pts[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    double diam = 0;
    for (size_t a = 0; a < hull.size(); ++a)
        for (size_t b = a + 1; b < hull.size(); ++b)
            diam = std::max(diam, std::hypot(hull[a].first - hull[b].first,
                                             hull[a].second - hull[b].second));
    rep.diameter = diam;
    return rep;
}

double check_fm_inequality(const ScalarField& v_field, const ScalarField& u_field, double lambda) {
    const Grid& gv = v_field.grid;
    const Grid& gu = u_field.grid;
    if (gv.nx != gu.nx || gv.ny != gu.ny || gv.dx != gu.dx || gv.dy != gu.dy)
        throw GeometryError("check_fm_inequality: fields on different grids");
    double worst = -1e300;
    for (int32_t node : gu.node_of_unknown) {
        double diff = u_field.values[static_cast<size_t>(node)] -
                      lambda * v_field.values[static_cast<size_t>(node)];
        worst = std::max(worst, diff);
    }
    return worst;
}

double sqrt_concavity_check(const ScalarField& v_field) {
    const Grid& g = v_field.grid;
    const ConvexDomain& dom = *v_field.domain;
    // deterministic probe set: a coarse lattice of interior nodes with room
    std::vector<std::pair<double, double>> probes;
    const int PI_ = 6, PJ = 5;
    for (int a = 1; a <= PI_; ++a)
        for (int b = 1; b <= PJ; ++b) {
            int i = a * (g.nx - 1) / (PI_ + 1);
            int j = b * (g.ny - 1) / (PJ + 1);
            if (!g.is_interior(i, j)) continue;
            bool room = true;
            for (int dj = -3; dj <= 3 && room; ++dj)
                for (int di = -3; di <= 3 && room; ++di)
                    if (!g.is_interior(i + di, j + dj)) room = false;
            if (room) probes.push_back({g.x(i), g.y(j)});
        }
    double worst = -1e300;
    const double s = 2.0 * std::max(g.dx, g.dy);
    for (auto [px, py] : probes) {
        double v0 = v_field.eval(px, py);
        for (int k = 0; k < 8; ++k) {
            double a = k * kPi / 8.0;
            double cx = std::cos(a), cy = std::sin(a);
            if (ray_extent(dom, px, py, cx, cy, s) < s) continue;
            if (ray_extent(dom, px, py, -cx, -cy, s) < s) continue;
            double fp = v_field.eval(px + s * cx, py + s * cy);
            double fm = v_field.eval(px - s * cx, py - s * cy);
            double d1 = (fp - fm) / (2 * s);
            double d2 = (fp - 2 * v0 + fm) / (s * s);
            worst = std::max(worst, v0 * d2 - 0.5 * d1 * d1);
        }
    }
    return worst;
}

}  // namespace torsionlab
