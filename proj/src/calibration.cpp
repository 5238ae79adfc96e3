#include "torsionlab/calibration.hpp"

#include <fstream>

#include <json.hpp>

namespace torsionlab {

KernelConstants Calibration::for_kind(DomainKind k) const {
    switch (k) {
        case DomainKind::Rectangle: return rectangle;
        case DomainKind::Ellipse: return ellipse;
        case DomainKind::Omega1: return omega1;
        case DomainKind::Omega2: return omega2;
        default: return fallback;
    }
}

Calibration default_calibration() {
    Calibration c;
    c.version = 1;
    c.rectangle = {1.0, 1.0};
    c.ellipse = {1.0, 3.4e-3};
    // omega1's height profile is not two-sided power-like around its
    // maximum; the defaults are kept so certificates are (correctly) denied
    c.omega1 = {1.0, 1.0};
    c.omega2 = {1.0, 7.0e-4};
    c.fallback = {1.0, 1.0};

    c.sep_r_min = 0.03;
    c.sep_ratio_max = 2.0;
    c.sep_u_at_vmax = 0.9;
    c.near_K_rectangle = 2.0;
    c.near_K_omega2 = 5.0;
    c.approx_slope = -2.0;
    c.approx_slope_tol = 0.5;
    c.hessian_slope = -2.0;
    c.hessian_slope_tol = 0.3;
    c.diameter_level_coeff = 0.1;
    c.directional_spread_max = 10.0;
    c.directional_M = 2.5;
    c.yy_band_lo = 0.8;
    c.yy_band_hi = 1.05;
    c.recon_c1 = 1.0;
    c.recon_C1_envelope = 0.013;  // 1.25x the worst pilot ratio on the cap family
    return c;
}

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_calibration: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(std::string("load_calibration: parse failure: ") + e.what());
    }
    Calibration c = default_calibration();
    c.version = j.value("version", 0);
    auto kc = [&](const char* name, KernelConstants& slot) {
        if (!j.contains("kernel_constants")) return;
        auto& k = j["kernel_constants"];
        if (!k.contains(name)) return;
        slot.c1 = k[name].value("c1", slot.c1);
        slot.C1 = k[name].value("C1", slot.C1);
    };
    kc("rectangle", c.rectangle);
    kc("ellipse", c.ellipse);
    kc("omega1", c.omega1);
    kc("omega2", c.omega2);
    kc("default", c.fallback);
    if (j.contains("thresholds")) {
        auto& t = j["thresholds"];
        c.sep_r_min = t.value("sep_r_min", c.sep_r_min);
        c.sep_ratio_max = t.value("sep_ratio_max", c.sep_ratio_max);
        c.sep_u_at_vmax = t.value("sep_u_at_vmax", c.sep_u_at_vmax);
        c.near_K_rectangle = t.value("near_K_rectangle", c.near_K_rectangle);
        c.near_K_omega2 = t.value("near_K_omega2", c.near_K_omega2);
        c.approx_slope = t.value("approx_slope", c.approx_slope);
        c.approx_slope_tol = t.value("approx_slope_tol", c.approx_slope_tol);
        c.hessian_slope = t.value("hessian_slope", c.hessian_slope);
        c.hessian_slope_tol = t.value("hessian_slope_tol", c.hessian_slope_tol);
        c.diameter_level_coeff = t.value("diameter_level_coeff", c.diameter_level_coeff);
        c.directional_spread_max = t.value("directional_spread_max", c.directional_spread_max);
        c.directional_M = t.value("directional_M", c.directional_M);
        c.yy_band_lo = t.value("yy_band_lo", c.yy_band_lo);
        c.yy_band_hi = t.value("yy_band_hi", c.yy_band_hi);
        c.recon_c1 = t.value("recon_c1", c.recon_c1);
        c.recon_C1_envelope = t.value("recon_C1_envelope", c.recon_C1_envelope);
    }
    return c;
}

}  // namespace torsionlab
