#pragma once

// Probing of solved fields: maxima with sub-grid refinement, Hessian and
// directional second derivatives, superlevel-set geometry, and the
// eigenfunction/torsion comparison checks.

#include "torsionlab/closed_forms.hpp"
#include "torsionlab/solver.hpp"

namespace torsionlab {

struct DirectionalSecond {
    double angle = 0;       // direction (cos a, sin a)
    double second = 0;      // fitted d^2/dt^2 along the direction
    double half_width = 0;  // window used for the fit
};

struct MaxReport {
    double x_star = 0, y_star = 0;
    double v_star = 0;
    SymMat2 hessian;  // from the 5x5 least-squares quadratic
    std::vector<DirectionalSecond> directional;
};

// Sub-grid maximum from a least-squares quadratic over the 5x5 node
// neighbourhood of the grid argmax; ties broken toward smaller x, then y.
// Directional second derivatives are separate 1-D quadratic fits along 16
// uniformly spaced angles with direction-adapted windows (x half-width up
// to 1, y half-width up to 0.2, both shrunk to stay inside the domain).
MaxReport locate_max(const ScalarField& field);

// Least-squares quadratic over the 5x5 neighbourhood of node (i, j);
// returns the fitted Hessian (used for interior trace probes).
SymMat2 hessian_at_node(const ScalarField& field, int i, int j);

struct SuperlevelReport {
    double x_len = 0;
    double y_len = 0;
    double diameter = 0;
};

// Axis projections and diameter of {v >= level}, scanned per grid column /
// row with linear interpolation at the crossings.
SuperlevelReport superlevel_projection(const ScalarField& field, double level);

// max over interior nodes of u - lambda * v (u normalized to sup 1).
double check_fm_inequality(const ScalarField& v_field, const ScalarField& u_field, double lambda);

// max over deterministic interior probes and 8 directions of the
// square-root-concavity defect  v * d2v - (dv)^2 / 2.
double sqrt_concavity_check(const ScalarField& v_field);

// Largest t <= t_max with (x + t cx, y + t cy) inside the domain (the
// domain is convex, so the whole segment is inside too).
double ray_extent(const ConvexDomain& dom, double x, double y, double cx, double cy,
                  double t_max);

}  // namespace torsionlab
