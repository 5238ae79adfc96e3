// Acceptance suite: twelve numbered criteria, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.  Heavy solves are cached and shared
// between criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "torsionlab/experiments.hpp"
#include "torsionlab/greens_kernel.hpp"

using namespace torsionlab;

namespace {

int g_fail = 0;
std::chrono::steady_clock::time_point g_tick;

void tick() { g_tick = std::chrono::steady_clock::now(); }

double tock() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - g_tick).count();
}

void line(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::ostringstream t;
    t.precision(1);
    t << std::fixed << tock();
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << idx << " (" << name << "): "
              << detail << "  [" << t.str() << "s]" << std::endl;
    if (!pass) ++g_fail;
    tick();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

struct FieldCache {
    std::map<std::string, ScalarField> torsion;
    std::map<std::string, std::pair<ScalarField, EigenReport>> eigen;

    ScalarField& get_torsion(DomainKind k, double N, double h) {
        std::string key = to_string(k) + "/" + fmt(N) + "/" + fmt(h);
        auto it = torsion.find(key);
        if (it == torsion.end())
            it = torsion.emplace(key, solve_torsion(make_domain(k, N), h)).first;
        return it->second;
    }
    std::pair<ScalarField, EigenReport>& get_eigen(DomainKind k, double N, double h) {
        std::string key = to_string(k) + "/" + fmt(N) + "/" + fmt(h);
        auto it = eigen.find(key);
        if (it == eigen.end())
            it = eigen.emplace(key, solve_ground_state(make_domain(k, N), h)).first;
        return it->second;
    }
};

FieldCache cache;

// max error of the delivered (bilinearly evaluated) field against a closed
// form, over a fixed dense probe lattice independent of the solve grid
template <typename Exact>
double dense_field_error(const ScalarField& f, const ConvexDomain& dom, Exact exact,
                         double margin) {
    double worst = 0;
    const int NX = 1200, NY = 160;
    for (int i = 0; i <= NX; ++i) {
        double x = dom.a() + dom.span() * i / NX;
        double y1 = dom.f1(x), y2 = dom.f2(x);
        if (y2 - y1 <= 2 * margin) continue;
        for (int j = 0; j <= NY; ++j) {
            double y = y1 + margin + (y2 - y1 - 2 * margin) * j / NY;
            worst = std::max(worst, std::abs(f.eval(x, y) - exact(x, y)));
        }
    }
    return worst;
}

// -------------------------------------------------------------------------

void criterion_1() {
    ConvexDomain e = ConvexDomain::ellipse(8);
    auto exact = [](double x, double y) { return torsion_ellipse(8, x, y - 0.5); };
    ScalarField& f64 = cache.get_torsion(DomainKind::Ellipse, 8, 1.0 / 64);
    ScalarField f128 = solve_torsion(e, 1.0 / 128);
    double e64 = dense_field_error(f64, e, exact, 0.02);
    double e128 = dense_field_error(f128, e, exact, 0.02);
    double ratio = e64 / e128;
    double secs = tock();
    bool pass = e64 <= 5e-4 && ratio >= 3.0 && ratio <= 5.0 && secs <= 60.0;
    line(1, "ellipse exactness", pass,
         "max err " + fmt(e64) + " (<= 5e-4), halving ratio " + fmt(ratio) +
             " (in [3,5]), runtime <= 60s");
}

void criterion_2() {
    ConvexDomain r = ConvexDomain::rectangle(4);
    ScalarField& f = cache.get_torsion(DomainKind::Rectangle, 4, 1.0 / 64);
    auto exact = [](double x, double y) { return torsion_rectangle(4, x, y, 1e-12); };
    double err = dense_field_error(f, r, exact, 0.01);
    double secs = tock();
    line(2, "rectangle series cross-check", err <= 5e-4 && secs <= 60.0,
         "max err " + fmt(err) + " (<= 5e-4), runtime <= 60s");
}

void criterion_3() {
    double worst_exp = 0, worst_poly_excess = -1e300, accel = 0;
    for (double a : {0.5, 1.0, 5.0}) {
        double closed = std::cosh(a / 2) / std::sinh(a / 2) / (2 * a);
        worst_exp = std::max(worst_exp, std::abs(poisson_rhs(a, 0.0, 64) - closed));
        long M = 1000000;
        double gap = std::abs(poisson_lhs(a, 0.0, M) - closed);
        worst_poly_excess = std::max(worst_poly_excess, gap - poisson_lhs_tail_bound(M));
        accel = std::max(accel, std::abs(poisson_lhs(a, 0.0, M, true) - closed));
    }
    bool pass = worst_exp <= 1e-10 && worst_poly_excess <= 0.0;
    line(3, "lattice identity", pass,
         "exp-side err " + fmt(worst_exp) + " (<= 1e-10), poly-side within tail (excess " +
             fmt(worst_poly_excess) + "), accelerated err " + fmt(accel));
}

void criterion_4() {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> Ud(2.0, 20.0), Uh(0.5, 1.0), U01(0.0, 1.0);
    double worst_ode = 0, worst_jump = 0, worst_sym = 0, worst_bnd = 0;
    for (int t = 0; t < 100; ++t) {
        KernelContext ctx;
        ctx.d_tilde = Ud(rng);
        ctx.h_tilde = Uh(rng);
        ctx.x_tilde = 0.5 * ctx.d_tilde;
        int n = 1 + int(U01(rng) * 12);
        double x = ctx.d_tilde * (0.1 + 0.8 * U01(rng));
        double xp = ctx.d_tilde * (0.1 + 0.8 * U01(rng));
        if (std::abs(x - xp) < 0.05) xp = std::min(ctx.d_tilde * 0.95, xp + 0.07);
        const double s = 1e-4;
        double f0 = f_n(ctx, n, x, xp);
        double d2 = (f_n(ctx, n, x + s, xp) - 2 * f0 + f_n(ctx, n, x - s, xp)) / (s * s);
        double k2 = (n * kPi / ctx.h_tilde) * (n * kPi / ctx.h_tilde);
        if (std::abs(f0) > 1e-280)
            worst_ode = std::max(worst_ode, std::abs(d2 - k2 * f0) / std::abs(k2 * f0));
        double jump = f_n_dx(ctx, n, xp, xp, +1) - f_n_dx(ctx, n, xp, xp, -1);
        worst_jump = std::max(worst_jump, std::abs(jump * ctx.h_tilde / 2.0 - 1.0));
        worst_sym = std::max(worst_sym, std::abs(f_n(ctx, n, x, xp) - f_n(ctx, n, xp, x)));
        worst_bnd = std::max(
            worst_bnd,
            std::max(std::abs(f_n(ctx, n, 0.0, xp)), std::abs(f_n(ctx, n, ctx.d_tilde, xp))));
    }
    // symmetry of the assembled kernel on a wide slab
    ConvexDomain dom = ConvexDomain::rectangle(20);
    KernelContext ctx = KernelContext::at(dom, 0.0);
    std::uniform_real_distribution<double> Ux(-4.0, 4.0), Uy(0.1, 0.9);
    double worst_gsym = 0;
    for (int t = 0; t < 100; ++t) {
        Point p{Ux(rng), Uy(rng)}, q{Ux(rng), Uy(rng)};
        if (std::abs(p.x - q.x) < 1e-3) continue;
        worst_gsym = std::max(worst_gsym, std::abs(approx_green(dom, ctx, p, q) -
                                                   approx_green(dom, ctx, q, p)));
    }
    bool pass = worst_ode <= 1e-5 && worst_jump <= 1e-6 && worst_sym <= 1e-10 &&
                worst_gsym <= 1e-10 && worst_bnd <= 1e-12;
    line(4, "slice kernel structure", pass,
         "ode " + fmt(worst_ode) + " (<=1e-5), jump " + fmt(worst_jump) + " (<=1e-6), sym " +
             fmt(std::max(worst_sym, worst_gsym)) + " (<=1e-10), boundary " + fmt(worst_bnd));
}

void criterion_5(const Calibration& cal) {
    ExperimentReport rep = exp_reconstruction(cal, true);
    double rect_worst = rep.metrics.at("rect_worst");
    double excess = rep.metrics.at("omega2_worst_excess");
    bool pass = rep.passed();
    line(5, "kernel reconstruction", pass,
         "rectangle worst " + fmt(rect_worst) + ", cap-family budget excess " + fmt(excess) +
             " (<= 0)");
}

int worker_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw >= 2 ? 2 : 1;
}

void criterion_6(const Calibration& cal) {
    ExperimentReport rep =
        exp_approx_convergence(DomainKind::Omega2, {16, 32, 64}, cal, 1.0 / 64, worker_cap());
    double s1 = rep.metrics.at("slope_err"), s2 = rep.metrics.at("slope_dxv");
    double secs = tock();
    line(6, "approximation scaling", rep.passed() && secs <= 600.0,
         "sup|v-v1| slope " + fmt(s1) + ", dxv slope " + fmt(s2) +
             " (-2 +- 0.5), runtime <= 600s");
}

void criterion_7(const Calibration& cal) {
    ExperimentReport rep = exp_maxima_separation({16, 32, 64}, cal, 1.0 / 64, worker_cap());
    line(7, "maxima separation", rep.passed(),
         "r_min " + fmt(rep.metrics.at("r_min")) + " (>= 0.03), spread " +
             fmt(rep.metrics.at("r_spread")) + " (<= 2), u(vmax) <= 0.9");
}

void criterion_8(const Calibration& cal) {
    ExperimentReport rep = exp_hessian_scaling({32, 64, 128}, cal, 1.0 / 128, worker_cap());
    line(8, "hessian scaling", rep.passed(),
         "slope " + fmt(rep.metrics.at("slope_dxx")) + " (-2 +- 0.3), diameter@128 " +
             fmt(rep.metrics.at("diameter@128")) + " (<= " + fmt(std::sqrt(128.0) + 2.0 / 128) +
             ")");
}

void criterion_9(const Calibration& cal) {
    ExperimentReport rep = exp_max_value_sandwich(64, cal);
    bool ceiling = true;
    double worst_ceiling = 0;
    for (auto& [key, f] : cache.torsion) {
        double vmax = 0;
        for (int32_t node : f.grid.node_of_unknown)
            vmax = std::max(vmax, f.values[static_cast<size_t>(node)]);
        worst_ceiling = std::max(worst_ceiling, vmax);
        ceiling = ceiling && vmax <= 0.125 + 1e-3;
    }
    line(9, "max value sandwich", rep.passed() && ceiling,
         "v* " + fmt(rep.metrics.at("v_star")) + " with delta " + fmt(rep.metrics.at("delta")) +
             "; ceiling over all solved fields " + fmt(worst_ceiling) + " (<= 0.126)");
}

void criterion_10() {
    // make sure every family appears among the audited fields
    cache.get_torsion(DomainKind::Omega1, 16, 1.0 / 64);
    cache.get_torsion(DomainKind::Omega2, 32, 1.0 / 64);
    cache.get_torsion(DomainKind::Omega2, 64, 1.0 / 64);
    double worst = 0;
    int fields = 0, probes = 0;
    for (auto& [key, f] : cache.torsion) {
        ++fields;
        MaxReport m = locate_max(f);
        worst = std::max(worst, std::abs(m.hessian.trace() + 1.0));
        const Grid& g = f.grid;
        int taken = 0;
        for (int a = 1; a <= 8 && taken < 20; ++a)
            for (int b = 1; b <= 4 && taken < 20; ++b) {
                int i = a * (g.nx - 1) / 9, j = b * (g.ny - 1) / 5;
                bool ok = true;
                for (int dj = -2; dj <= 2 && ok; ++dj)
                    for (int di = -2; di <= 2 && ok; ++di)
                        if (!g.is_interior(i + di, j + dj)) ok = false;
                if (!ok) continue;
                SymMat2 H = hessian_at_node(f, i, j);
                worst = std::max(worst, std::abs(H.trace() + 1.0));
                ++taken;
                ++probes;
            }
    }
    line(10, "hessian trace identity", worst <= 5e-2,
         "worst |trace+1| " + fmt(worst) + " over " + std::to_string(fields) + " fields, " +
             std::to_string(probes) + " probes (<= 5e-2)");
}

void criterion_11() {
    double worst_fm = -1e300, worst_floor = 1e300;
    for (auto [kind, N] : std::vector<std::pair<DomainKind, double>>{
             {DomainKind::Rectangle, 4}, {DomainKind::Omega1, 16}, {DomainKind::Omega2, 32}}) {
        ScalarField& v = cache.get_torsion(kind, N, 1.0 / 64);
        auto& [u, rep] = cache.get_eigen(kind, N, 1.0 / 64);
        worst_fm = std::max(worst_fm, check_fm_inequality(v, u, rep.lambda));
        MaxReport mu = locate_max(u);
        worst_floor = std::min(worst_floor,
                               v.eval(mu.x_star, mu.y_star) - (1.0 / rep.lambda - 1e-2));
    }
    bool pass = worst_fm <= 1e-2 && worst_floor >= 0;
    line(11, "landscape inequality", pass,
         "max(u - lambda v) " + fmt(worst_fm) + " (<= 1e-2), torsion floor margin " +
             fmt(worst_floor) + " (>= 0)");
}

void criterion_12(const Calibration& cal) {
    ExperimentReport rep = exp_directional_hessian(64, cal.directional_M, cal);
    line(12, "directional comparability", rep.passed(),
         "rho spread " + fmt(rep.metrics.at("rho_spread")) + " (<= 10), -dyy " +
             fmt(rep.metrics.at("neg_dyy")) + " (in [0.8,1.05]); delta " +
             fmt(rep.metrics.at("delta")));
}

}  // namespace

int main(int argc, char** argv) {
    std::string data_dir = "data";
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--data-dir") == 0) data_dir = argv[i + 1];
    Calibration cal;
    try {
        cal = load_calibration(data_dir + "/calibration.json");
    } catch (const std::exception&) {
        cal = default_calibration();
    }

    try {
        tick();
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5(cal);
        criterion_6(cal);
        criterion_7(cal);
        criterion_8(cal);
        criterion_9(cal);
        criterion_10();
        criterion_11();
        criterion_12(cal);
    } catch (const std::exception& e) {
        std::cout << "FAIL  acceptance aborted: " << e.what() << "\n";
        return 1;
    }
    std::cout << (g_fail == 0 ? "acceptance: all criteria passed\n"
                              : "acceptance: " + std::to_string(g_fail) + " criteria failed\n");
    return g_fail == 0 ? 0 : 1;
}
