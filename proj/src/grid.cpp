#include "torsionlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace torsionlab {

namespace {

// Fractional distance from (x0, y0) toward (x1, y1) at which the segment
// leaves the domain; both endpoints pre-classified (inside / outside).
double crossing_fraction(const ConvexDomain& dom, double x0, double y0, double x1, double y1) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double x = x0 + mid * (x1 - x0);
        double y = y0 + mid * (y1 - y0);
        bool in = x >= dom.a() && x <= dom.b() && y > dom.f1(x) && y < dom.f2(x);
        (in ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Grid build_grid(const ConvexDomain& dom, double target_h, double x_aspect) {
    if (!(target_h > 0) || target_h > 1.0 / 16.0 + 1e-15)
        throw ResolutionError("build_grid: target_h must lie in (0, 1/16]");
    if (x_aspect < 1.0 || x_aspect > 4.0)
        throw ResolutionError("build_grid: x_aspect must lie in [1, 4]");

    Grid g;
    const double W = dom.span();
    const double hx = target_h * x_aspect;
    g.nx = static_cast<int>(std::ceil(W / hx - 1e-12)) + 1;
    g.ny = static_cast<int>(std::ceil(1.0 / target_h - 1e-12)) + 1;
    g.dx = W / (g.nx - 1);
    g.dy = 1.0 / (g.ny - 1);
    g.x0 = dom.a();
    g.y0 = 0.0;

    const size_t total = static_cast<size_t>(g.nx) * g.ny;
    g.interior.assign(total, 0);
    g.unknown_of_node.assign(total, -1);

    // classify nodes; thin-slab check runs per column (outermost rows and
    // columns of the bounding box are never interior)
    for (int i = 1; i + 1 < g.nx; ++i) {
        double x = g.x(i);
        double y1 = dom.f1(x), y2 = dom.f2(x);
        double h = y2 - y1;
        int count = 0;
        for (int j = 1; j + 1 < g.ny; ++j) {
            double y = g.y(j);
            if (y > y1 && y < y2) {
                g.interior[static_cast<size_t>(g.id(i, j))] = 1;
                ++count;
            }
        }
        if (h > 0.1 && count < 4)
            throw ResolutionError("build_grid: a slab thicker than 0.1 has fewer than 4 cells");
    }

    // unknown numbering, row-major over interior nodes
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.interior[static_cast<size_t>(g.id(i, j))]) {
                g.unknown_of_node[static_cast<size_t>(g.id(i, j))] =
                    static_cast<int32_t>(g.node_of_unknown.size());
                g.node_of_unknown.push_back(g.id(i, j));
            }

    // cut arms toward non-interior neighbours
    for (int32_t node : g.node_of_unknown) {
        int i = node % g.nx, j = node / g.nx;
        double x = g.x(i), y = g.y(j);
        CutArms arms;
        bool any = false;
        auto probe = [&](int di, int dj, double& slot) {
            int ii = i + di, jj = j + dj;
            double xn = g.x0 + ii * g.dx, yn = g.y0 + jj * g.dy;
            bool nbr_in = g.is_interior(ii, jj);
            if (!nbr_in) {
                double th = crossing_fraction(dom, x, y, xn, yn);
                if (th < 1.0 - 1e-9) {  // grid-aligned boundary: keep the full arm
                    slot = std::max(th, 1e-6);
                    any = true;
                }
            }
        };
        probe(+1, 0, arms.e);
        probe(-1, 0, arms.w);
        probe(0, +1, arms.n);
        probe(0, -1, arms.s);
        if (any) g.cut.emplace(node, arms);
    }
    return g;
}

}  // namespace torsionlab
