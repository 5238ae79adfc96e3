#pragma once

// Reproducible desk-scale experiments; each emits a machine-readable report
// whose pass/fail verdicts are recomputable from the stored metrics and the
// calibration thresholds alone.

#include <filesystem>
#include <map>
#include <vector>

#include "torsionlab/calibration.hpp"
#include "torsionlab/field_probe.hpp"

namespace torsionlab {

struct CriterionResult {
    std::string name;
    double measured = 0;
    std::string relation;  // "<=", ">=", "in" (band given by threshold/threshold2)
    double threshold = 0;
    double threshold2 = 0;
    bool pass = false;
};

struct ExperimentReport {
    std::string name;
    std::map<std::string, double> params;
    std::map<std::string, double> metrics;
    std::vector<CriterionResult> criteria;
    int calibration_version = 0;
    std::vector<std::string> artifacts;

    bool passed() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
};

// JSON report (plus .dat series for per-N metrics) under dir.
void write_report(const ExperimentReport& rep, const std::filesystem::path& dir);
std::string report_to_json(const ExperimentReport& rep);

ConvexDomain make_domain(DomainKind kind, double N);

// sup_y |v - v1| at the thickest abscissa and the x-derivative near it,
// against N; log-log slopes are the verdicts for the parabolic-cap family.
// N-list experiments accept a worker cap; per-N runs are independent and
// report assembly is single-writer in N order, so results do not depend on
// the thread count.
ExperimentReport exp_approx_convergence(DomainKind family, const std::vector<double>& N_list,
                                        const Calibration& cal, double target_h = 1.0 / 64,
                                        int threads = 1);

// torsion max vs eigenfunction max on the ramp-plateau family.
ExperimentReport exp_maxima_separation(const std::vector<double>& N_list, const Calibration& cal,
                                       double target_h = 1.0 / 64, int threads = 1);

// K = L^2 * max (v* - v) over the box around the eigenfunction maximum.
ExperimentReport exp_torsion_near_eigenmax(DomainKind family, double N, const Calibration& cal,
                                           double target_h = 1.0 / 64);

// -dxx v at the maximum against N, plus the diameter of the superlevel set
// at depth N^{-1/2} * diameter_level_coeff below the maximum.
ExperimentReport exp_hessian_scaling(const std::vector<double>& N_list, const Calibration& cal,
                                     double target_h = 1.0 / 128, int threads = 1);

// comparability of -d^2_n v with max(b^2, delta) over 16 directions.
ExperimentReport exp_directional_hessian(double N, double M, const Calibration& cal,
                                         double target_h = 1.0 / 128);

// 1/8 - delta/100 <= v* <= 1/8 sandwich (with discretization slack).
ExperimentReport exp_max_value_sandwich(double N, const Calibration& cal,
                                        double target_h = 1.0 / 64);

// kernel structure: lattice identity vs closed forms, slice-kernel ODE /
// jump / symmetry / boundary checks, kernel decay and singularity fits.
ExperimentReport exp_kernel_checks(const Calibration& cal);

// kernel-integration reconstruction against v1 (and against the fitted
// error envelope on the parabolic-cap family).
ExperimentReport exp_reconstruction(const Calibration& cal, bool include_omega2 = true);

}  // namespace torsionlab
