#pragma once

// Finite-difference solves on the cut-cell grid: the torsion problem
// (Laplacian v = -1, v = 0 on the boundary) and the principal Dirichlet
// eigenpair.  The discrete operator eliminates boundary values through the
// fractional arms, which keeps the system symmetric positive definite, so
// both solves run on Jacobi-preconditioned conjugate gradients.

#include <memory>
#include <string>

#include "torsionlab/grid.hpp"

namespace torsionlab {

enum class FieldKind { Torsion, Eigenfunction };

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0;
};

struct ScalarField {
    std::shared_ptr<const ConvexDomain> domain;
    Grid grid;
    std::vector<double> values;  // per node; 0 outside the domain
    FieldKind kind = FieldKind::Torsion;
    SolveStats stats;

    double at_node(int i, int j) const { return values[static_cast<size_t>(grid.id(i, j))]; }
    // Bilinear evaluation anywhere in the bounding box.
    double eval(double x, double y) const;
};

struct EigenReport {
    double lambda = 0;
    double x1 = 0, y1 = 0;  // refined argmax of the eigenfunction
    int lanczos_steps = 0;
    int inner_iterations = 0;
};

// Discrete SPD operator  (-Laplacian restricted to interior unknowns).
struct DiscreteLaplacian {
    const Grid* grid;
    // y = A x
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;
};

// Jacobi-preconditioned CG; returns stats.  Throws NumericalError after
// max_iter without reaching rtol.
SolveStats cg_solve(const DiscreteLaplacian& A, const std::vector<double>& rhs,
                    std::vector<double>& x, double rtol = 1e-10, int max_iter = 100000);

// Torsion solve.  Relative residual 1e-10.
ScalarField solve_torsion(const ConvexDomain& dom, double target_h, double x_aspect = 1.0);

// Principal eigenpair by Lanczos on the inverse operator (each step one CG
// solve), thick-restarted; eigenvector normalized to max = 1, positive.
std::pair<ScalarField, EigenReport> solve_ground_state(const ConvexDomain& dom, double target_h,
                                                       double x_aspect = 1.0);

}  // namespace torsionlab
