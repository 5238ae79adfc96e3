#pragma once

// Pilot-calibrated constants: per-family kernel constants for the error
// functional and empirical thresholds for the experiment verdicts.  Loaded
// from the versioned calibration file shipped with the repository so that
// no experiment carries inline tuning constants.

#include <string>

#include "torsionlab/domain.hpp"

namespace torsionlab {

struct KernelConstants {
    double c1 = 1.0;
    double C1 = 1.0;
};

struct Calibration {
    int version = 0;

    KernelConstants rectangle;
    KernelConstants ellipse;
    KernelConstants omega1;
    KernelConstants omega2;
    KernelConstants fallback;

    // exp_maxima_separation
    double sep_r_min = 0.03;
    double sep_ratio_max = 2.0;
    double sep_u_at_vmax = 0.9;

    // exp_torsion_near_eigenmax
    double near_K_rectangle = 2.0;
    double near_K_omega2 = 5.0;

    // exp_approx_convergence / exp_hessian_scaling slope bands
    double approx_slope = -2.0, approx_slope_tol = 0.5;
    double hessian_slope = -2.0, hessian_slope_tol = 0.3;
    double diameter_level_coeff = 0.1;

    // exp_directional_hessian
    double directional_spread_max = 10.0;
    double directional_M = 2.5;
    double yy_band_lo = 0.8, yy_band_hi = 1.05;

    // reconstruction error envelope (fitted on pilot probes)
    double recon_c1 = 1.0;
    double recon_C1_envelope = 1.0;

    KernelConstants for_kind(DomainKind k) const;
};

// Loads the JSON calibration file; throws Error on parse problems.
Calibration load_calibration(const std::string& path);

// Built-in copy of the shipped calibration (used when no file is given).
Calibration default_calibration();

}  // namespace torsionlab
