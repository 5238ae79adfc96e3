#include "torsionlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace torsionlab {

double ScalarField::eval(double x, double y) const {
    const Grid& g = grid;
    double fx = (x - g.x0) / g.dx;
    double fy = (y - g.y0) / g.dy;
    fx = std::clamp(fx, 0.0, double(g.nx - 1));
    fy = std::clamp(fy, 0.0, double(g.ny - 1));
    int i = std::min(static_cast<int>(fx), g.nx - 2);
    int j = std::min(static_cast<int>(fy), g.ny - 2);
    double tx = fx - i, ty = fy - j;
    double v00 = at_node(i, j), v10 = at_node(i + 1, j);
    double v01 = at_node(i, j + 1), v11 = at_node(i + 1, j + 1);
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

// ---------------------------------------------------------------------------
// Discrete operator: boundary values eliminated through the fractional arms,
// so off-diagonal couplings are the plain 1/dx^2, 1/dy^2 and the matrix is
// symmetric positive definite.

void DiscreteLaplacian::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const Grid& g = *grid;
    const double ix2 = 1.0 / (g.dx * g.dx);
    const double iy2 = 1.0 / (g.dy * g.dy);
    const size_t n = g.n_unknowns();
    y.resize(n);
    for (size_t u = 0; u < n; ++u) {
        const int node = g.node_of_unknown[u];
        const int i = node % g.nx, j = node / g.nx;
        CutArms a = g.arms(i, j);
        double diag = (1.0 / a.e + 1.0 / a.w) * ix2 + (1.0 / a.n + 1.0 / a.s) * iy2;
        double acc = diag * x[u];
        int32_t ue;
        if (a.e == 1.0 && (ue = g.unknown_of_node[static_cast<size_t>(node) + 1]) >= 0)
            acc -= ix2 * x[static_cast<size_t>(ue)];
        if (a.w == 1.0 && (ue = g.unknown_of_node[static_cast<size_t>(node) - 1]) >= 0)
            acc -= ix2 * x[static_cast<size_t>(ue)];
        if (a.n == 1.0 && (ue = g.unknown_of_node[static_cast<size_t>(node) + g.nx]) >= 0)
            acc -= iy2 * x[static_cast<size_t>(ue)];
        if (a.s == 1.0 && (ue = g.unknown_of_node[static_cast<size_t>(node) - g.nx]) >= 0)
            acc -= iy2 * x[static_cast<size_t>(ue)];
        y[u] = acc;
    }
}

std::vector<double> DiscreteLaplacian::diagonal() const {
    const Grid& g = *grid;
    const double ix2 = 1.0 / (g.dx * g.dx);
    const double iy2 = 1.0 / (g.dy * g.dy);
    std::vector<double> d(g.n_unknowns());
    for (size_t u = 0; u < d.size(); ++u) {
        const int node = g.node_of_unknown[u];
        CutArms a = g.arms(node % g.nx, node / g.nx);
        d[u] = (1.0 / a.e + 1.0 / a.w) * ix2 + (1.0 / a.n + 1.0 / a.s) * iy2;
    }
    return d;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveStats cg_solve(const DiscreteLaplacian& A, const std::vector<double>& rhs,
                    std::vector<double>& x, double rtol, int max_iter) {
    const size_t n = rhs.size();
    x.assign(n, 0.0);
    std::vector<double> r = rhs, z(n), p(n), Ap(n);
    std::vector<double> invdiag = A.diagonal();
    for (double& d : invdiag) d = 1.0 / d;

    const double bnorm = nrm2(rhs);
    if (bnorm == 0.0) return {0, 0.0};

    for (size_t i = 0; i < n; ++i) z[i] = invdiag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    SolveStats st;
    for (int it = 1; it <= max_iter; ++it) {
        A.apply(p, Ap);
        double alpha = rz / dot(p, Ap);
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rnorm = nrm2(r);
        st.iterations = it;
        st.relative_residual = rnorm / bnorm;
        if (st.relative_residual <= rtol) return st;
        for (size_t i = 0; i < n; ++i) z[i] = invdiag[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NumericalError("cg_solve: no convergence after " + std::to_string(max_iter) +
                         " iterations, relative residual " +
                         std::to_string(st.relative_residual));
}

ScalarField solve_torsion(const ConvexDomain& dom, double target_h, double x_aspect) {
    ScalarField f;
    f.domain = std::make_shared<ConvexDomain>(dom);
    f.grid = build_grid(dom, target_h, x_aspect);
    f.kind = FieldKind::Torsion;
    DiscreteLaplacian A{&f.grid};
    std::vector<double> rhs(f.grid.n_unknowns(), 1.0), sol;
    f.stats = cg_solve(A, rhs, sol, 1e-10);
    f.values.assign(static_cast<size_t>(f.grid.nx) * f.grid.ny, 0.0);
    for (size_t u = 0; u < sol.size(); ++u)
        f.values[static_cast<size_t>(f.grid.node_of_unknown[u])] = sol[u];
    return f;
}

// ---------------------------------------------------------------------------
// Eigenpair: thick-restarted Lanczos on the inverse operator.  The shift-free
// inverse applications are plain CG solves, so the whole path stays SPD.

namespace {

// Cyclic Jacobi eigensolver for a small dense symmetric matrix.
void jacobi_eigen(std::vector<std::vector<double>> A, std::vector<double>& eval,
                  std::vector<std::vector<double>>& evec) {
    const int n = static_cast<int>(A.size());
    evec.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) evec[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A[i][j] * A[i][j];
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = evec[k][p], vkq = evec[k][q];
                    evec[k][p] = c * vkp - s * vkq;
                    evec[k][q] = s * vkp + c * vkq;
                }
            }
    }
    eval.resize(n);
    for (int i = 0; i < n; ++i) eval[i] = A[i][i];
}

}  // namespace

std::pair<ScalarField, EigenReport> solve_ground_state(const ConvexDomain& dom, double target_h,
                                                       double x_aspect) {
    ScalarField f;
    f.domain = std::make_shared<ConvexDomain>(dom);
    f.grid = build_grid(dom, target_h, x_aspect);
    f.kind = FieldKind::Eigenfunction;
    const Grid& g = f.grid;
    DiscreteLaplacian A{&g};
    const size_t n = g.n_unknowns();

    const int m_basis = 40;  // Lanczos basis before a thick restart
    const int k_keep = 10;   // Ritz pairs carried across restarts
    const int max_inner_solves = 500;

    // smooth positive seed compatible with the boundary
    std::vector<double> seed(n);
    for (size_t u = 0; u < n; ++u) {
        int node = g.node_of_unknown[u];
        double x = g.x(node % g.nx), y = g.y(node / g.nx);
        double y1 = dom.f1(x), h = dom.f2(x) - y1;
        seed[u] = h > 0 ? std::sin(kPi * (y - y1) / h) * h * h : 0.0;
    }
    double s0 = nrm2(seed);
    for (double& v : seed) v /= s0;

    std::vector<std::vector<double>> V;  // basis vectors
    V.push_back(seed);
    std::vector<std::vector<double>> T(1, std::vector<double>(1, 0.0));  // projected operator

    auto grow_T = [&T](int size) {
        T.resize(size);
        for (auto& row : T) row.resize(size, 0.0);
    };

    EigenReport rep;
    double mu_prev = 0;
    double mu = 0;
    std::vector<double> ritz;  // top eigenvector of T in basis coords
    int jstart = 0;
    bool converged = false;

    while (!converged) {
        int m = std::min<int>(m_basis, jstart + (max_inner_solves - rep.inner_iterations));
        if (m <= jstart) break;
        grow_T(m + 1);
        double beta_last = 0;
        int j = jstart;
        for (; j < m; ++j) {
            std::vector<double> w;
            SolveStats st = cg_solve(A, V[static_cast<size_t>(j)], w, 1e-11);
            rep.inner_iterations += 1;
            rep.lanczos_steps += 1;
            (void)st;
            // full reorthogonalization (two passes); the first pass supplies
            // the projected-operator column
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= j; ++i) {
                    double hij = dot(w, V[static_cast<size_t>(i)]);
                    if (pass == 0) {
                        T[i][j] = hij;
                        T[j][i] = hij;
                    }
                    for (size_t t = 0; t < n; ++t) w[t] -= hij * V[static_cast<size_t>(i)][t];
                }
            double beta = nrm2(w);
            beta_last = beta;
            if (rep.inner_iterations >= max_inner_solves) {
                ++j;
                break;
            }
            if (beta < 1e-13) {
                ++j;
                break;  // invariant subspace reached
            }
            T[j + 1][j] = T[j][j + 1] = beta;
            for (double& t : w) t /= beta;
            V.push_back(std::move(w));
        }
        const int dim = j;
        std::vector<std::vector<double>> Tm(dim, std::vector<double>(dim));
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) Tm[a][b] = T[a][b];
        std::vector<double> evals;
        std::vector<std::vector<double>> evecs;
        jacobi_eigen(Tm, evals, evecs);
        // index of largest eigenvalue of the inverse operator
        int top = 0;
        for (int i = 1; i < dim; ++i)
            if (evals[i] > evals[top]) top = i;
        mu = evals[top];
        ritz.assign(dim, 0.0);
        for (int i = 0; i < dim; ++i) ritz[i] = evecs[i][top];
        double resid = std::abs(beta_last * ritz[dim - 1]);
        bool mu_settled = mu_prev != 0 && std::abs(mu - mu_prev) <= 1e-10 * std::abs(mu);
        converged = (resid <= 1e-9 * mu) || mu_settled;
        mu_prev = mu;
        if (converged || rep.inner_iterations >= max_inner_solves) break;

        // thick restart: keep the k top Ritz vectors plus the residual vector
        int k = std::min(k_keep, dim - 1);
        std::vector<int> order(dim);
        for (int i = 0; i < dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return evals[a] > evals[b]; });
        std::vector<std::vector<double>> Y(static_cast<size_t>(k), std::vector<double>(n, 0.0));
        for (int c = 0; c < k; ++c) {
            int col = order[static_cast<size_t>(c)];
            for (int i = 0; i < dim; ++i) {
                double s = evecs[i][col];
                const std::vector<double>& vi = V[static_cast<size_t>(i)];
                std::vector<double>& yc = Y[static_cast<size_t>(c)];
                if (s != 0.0)
                    for (size_t t = 0; t < n; ++t) yc[t] += s * vi[t];
            }
        }
        std::vector<double> vres = V[static_cast<size_t>(dim)];  // the (m+1)-th vector
        V.clear();
        for (auto& y : Y) V.push_back(std::move(y));
        V.push_back(std::move(vres));
        // retained block of the projected operator is diagonal; the border
        // column is recomputed from fresh inner products at the next step
        grow_T(0);
        grow_T(k + 1);
        for (int c = 0; c < k; ++c) T[c][c] = evals[order[static_cast<size_t>(c)]];
        jstart = k;
    }

    if (!converged)
        throw NumericalError("solve_ground_state: eigenvalue change above 1e-10 after " +
                             std::to_string(rep.inner_iterations) + " inverse iterations");

    // assemble the eigenvector in node space
    std::vector<double> u(n, 0.0);
    for (size_t i = 0; i < ritz.size(); ++i) {
        double s = ritz[i];
        if (s == 0.0) continue;
        const std::vector<double>& vi = V[i];
        for (size_t t = 0; t < n; ++t) u[t] += s * vi[t];
    }
    // sign and sup normalization
    double vmax = 0;
    for (double v : u) vmax = std::max(vmax, std::abs(v));
    double signed_max = 0;
    for (double v : u)
        if (std::abs(v) == vmax) signed_max = v;
    for (double& v : u) v /= signed_max;

    f.values.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
    for (size_t w = 0; w < n; ++w)
        f.values[static_cast<size_t>(g.node_of_unknown[w])] = u[w];

    rep.lambda = 1.0 / mu;

    // refined argmax (quadratic fit around the grid argmax)
    int best = 0;
    for (size_t w = 1; w < n; ++w)
        if (u[w] > u[static_cast<size_t>(best)]) best = static_cast<int>(w);
    int node = g.node_of_unknown[static_cast<size_t>(best)];
    rep.x1 = g.x(node % g.nx);
    rep.y1 = g.y(node / g.nx);
    return {std::move(f), rep};
}

}  // namespace torsionlab
