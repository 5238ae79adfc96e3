#include "torsionlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "torsionlab/greens_kernel.hpp"
#include "torsionlab/io.hpp"

namespace torsionlab {

namespace {

// Runs fn(i, N_list[i]) for every index, at most `threads` at a time.  The
// callee writes into its own pre-sized slot; the first exception (by index)
// is rethrown after all workers drain.
template <typename Fn>
void for_each_N(const std::vector<double>& Ns, int threads, Fn fn) {
    const size_t count = Ns.size();
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i, Ns[i]);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i, Ns[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int np = std::min<int>(threads, static_cast<int>(count));
    for (int t = 0; t < np; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CriterionResult below(const std::string& name, double measured, double thr) {
    return {name, measured, "<=", thr, 0, measured <= thr};
}

CriterionResult above(const std::string& name, double measured, double thr) {
    return {name, measured, ">=", thr, 0, measured >= thr};
}

CriterionResult within(const std::string& name, double measured, double lo, double hi) {
    return {name, measured, "in", lo, hi, measured >= lo && measured <= hi};
}

std::string fmt_N(double N) {
    std::ostringstream s;
    s << N;
    return s.str();
}

int nearest_index(double v, double origin, double step, int count) {
    int i = static_cast<int>(std::lround((v - origin) / step));
    return std::clamp(i, 0, count - 1);
}

}  // namespace

ConvexDomain make_domain(DomainKind kind, double N) {
    switch (kind) {
        case DomainKind::Rectangle: return ConvexDomain::rectangle(N);
        case DomainKind::Ellipse: return ConvexDomain::ellipse(N);
        case DomainKind::Omega1: return ConvexDomain::omega1(N);
        case DomainKind::Omega2: return ConvexDomain::omega2(N);
        default: throw GeometryError("make_domain: family requires explicit construction");
    }
}

std::string report_to_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["name"] = rep.name;
    j["calibration_version"] = rep.calibration_version;
    j["params"] = rep.params;
    j["metrics"] = rep.metrics;
    j["criteria"] = nlohmann::json::array();
    for (const auto& c : rep.criteria) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["measured"] = c.measured;
        cj["relation"] = c.relation;
        cj["threshold"] = c.threshold;
        if (c.relation == "in") cj["threshold_hi"] = c.threshold2;
        cj["pass"] = c.pass;
        j["criteria"].push_back(cj);
    }
    j["passed"] = rep.passed();
    j["artifacts"] = rep.artifacts;
    return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
    // companion series: metrics keyed like "<series>@<N>" become .dat/.csv files
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& [key, val] : rep.metrics) {
        auto at = key.find('@');
        if (at == std::string::npos) continue;
        series[key.substr(0, at)].push_back({std::stod(key.substr(at + 1)), val});
    }
    ExperimentReport out = rep;
    for (auto& [base, pts] : series) {
        std::sort(pts.begin(), pts.end());
        std::vector<double> xs, ys;
        std::ostringstream csv;
        csv << "N," << base << "\n";
        for (auto& [x, y] : pts) {
            xs.push_back(x);
            ys.push_back(y);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g,%.17g\n", x, y);
            csv << buf;
        }
        std::string stem = rep.name + "_" + base;
        write_dat(dir / (stem + ".dat"), xs, ys, base + " vs N");
        atomic_write(dir / (stem + ".csv"), csv.str());
        out.artifacts.push_back(stem + ".dat");
        out.artifacts.push_back(stem + ".csv");
    }
    atomic_write(dir / (rep.name + ".json"), report_to_json(out));
}

// ---------------------------------------------------------------------------

ExperimentReport exp_approx_convergence(DomainKind family, const std::vector<double>& N_list,
                                        const Calibration& cal, double target_h, int threads) {
    ExperimentReport rep;
    rep.name = "approx_convergence_" + to_string(family);
    rep.calibration_version = cal.version;
    rep.params["target_h"] = target_h;

    struct Slot {
        double sup = 0, dsup = 0;
    };
    std::vector<Slot> slots(N_list.size());
    for_each_N(N_list, threads, [&](size_t idx, double N) {
        ConvexDomain dom = make_domain(family, N);
        ScalarField v = solve_torsion(dom, target_h);
        const Grid& g = v.grid;
        const double xb = dom.x_bar();
        const int ib = nearest_index(xb, g.x0, g.dx, g.nx);
        const double xcol = g.x(ib);

        double sup = 0;
        double y1 = dom.f1(xcol), y2 = dom.f2(xcol);
        for (int j = 0; j < g.ny; ++j) {
            double y = g.y(j);
            if (y < y1 + 0.25 || y > y2 - 0.25) continue;
            if (!g.is_interior(ib, j)) continue;
            sup = std::max(sup, std::abs(v.at_node(ib, j) - v1(dom, xcol, y)));
        }

        // x-derivative sup over |x - x_bar| <= 1 at the y = 1/2 row
        const int jmid = nearest_index(0.5, g.y0, g.dy, g.ny);
        double dsup = 0;
        for (int i = 1; i + 1 < g.nx; ++i) {
            if (std::abs(g.x(i) - xb) > 1.0) continue;
            if (!g.is_interior(i - 1, jmid) || !g.is_interior(i + 1, jmid)) continue;
            double d = (v.at_node(i + 1, jmid) - v.at_node(i - 1, jmid)) / (2 * g.dx);
            dsup = std::max(dsup, std::abs(d));
        }
        slots[idx] = {sup, dsup};
    });

    std::vector<double> logs_N, logs_err, logs_dxv;
    for (size_t i = 0; i < N_list.size(); ++i) {
        const double N = N_list[i];
        rep.metrics["sup_err@" + fmt_N(N)] = slots[i].sup;
        rep.metrics["sup_dxv@" + fmt_N(N)] = slots[i].dsup;
        logs_N.push_back(std::log(N));
        logs_err.push_back(std::log(std::max(slots[i].sup, 1e-300)));
        logs_dxv.push_back(std::log(std::max(slots[i].dsup, 1e-300)));
        if (family == DomainKind::Rectangle) {
            // series tail only: the deviation from v1 decays exponentially
            rep.criteria.push_back(below("sup_err_N" + fmt_N(N), slots[i].sup,
                                         std::exp(-kPi * N / 2.0) + 5e-4));
        }
    }
    if (N_list.size() >= 2) {
        LineFit f_err = fit_line(logs_N, logs_err);
        LineFit f_dxv = fit_line(logs_N, logs_dxv);
        rep.metrics["slope_err"] = f_err.slope;
        rep.metrics["slope_dxv"] = f_dxv.slope;
        rep.metrics["slope_err_rms"] = f_err.rms;
        if (family == DomainKind::Omega2 || family == DomainKind::Ellipse) {
            rep.criteria.push_back(within("slope_err", f_err.slope,
                                          cal.approx_slope - cal.approx_slope_tol,
                                          cal.approx_slope + cal.approx_slope_tol));
            rep.criteria.push_back(within("slope_dxv", f_dxv.slope,
                                          cal.approx_slope - cal.approx_slope_tol,
                                          cal.approx_slope + cal.approx_slope_tol));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_maxima_separation(const std::vector<double>& N_list, const Calibration& cal,
                                       double target_h, int threads) {
    ExperimentReport rep;
    rep.name = "maxima_separation";
    rep.calibration_version = cal.version;
    rep.params["target_h"] = target_h;

    struct Slot {
        double r = 0, x_star = 0, x_1 = 0, u_at_vmax = 0, lambda = 0;
    };
    std::vector<Slot> slots(N_list.size());
    for_each_N(N_list, threads, [&](size_t idx, double N) {
        ConvexDomain dom = ConvexDomain::omega1(N);
        ScalarField v = solve_torsion(dom, target_h);
        auto [u, eig] = solve_ground_state(dom, target_h);
        MaxReport mv = locate_max(v);
        MaxReport mu = locate_max(u);
        slots[idx] = {std::abs(mv.x_star - mu.x_star) / N, mv.x_star, mu.x_star,
                      u.eval(mv.x_star, mv.y_star), eig.lambda};
    });

    std::vector<double> ratios;
    double u_worst = 0;
    for (size_t i = 0; i < N_list.size(); ++i) {
        const double N = N_list[i];
        ratios.push_back(slots[i].r);
        u_worst = std::max(u_worst, slots[i].u_at_vmax);
        rep.metrics["r@" + fmt_N(N)] = slots[i].r;
        rep.metrics["x_star@" + fmt_N(N)] = slots[i].x_star;
        rep.metrics["x_1@" + fmt_N(N)] = slots[i].x_1;
        rep.metrics["u_at_vmax@" + fmt_N(N)] = slots[i].u_at_vmax;
        rep.metrics["lambda@" + fmt_N(N)] = slots[i].lambda;
    }
    double rmin = *std::min_element(ratios.begin(), ratios.end());
    double rmax = *std::max_element(ratios.begin(), ratios.end());
    rep.metrics["r_min"] = rmin;
    rep.metrics["r_spread"] = rmax / rmin;
    rep.criteria.push_back(above("r_min", rmin, cal.sep_r_min));
    rep.criteria.push_back(below("r_spread", rmax / rmin, cal.sep_ratio_max));
    rep.criteria.push_back(below("u_at_vmax", u_worst, cal.sep_u_at_vmax));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_torsion_near_eigenmax(DomainKind family, double N, const Calibration& cal,
                                           double target_h) {
    ExperimentReport rep;
    rep.name = "torsion_near_eigenmax_" + to_string(family);
    rep.calibration_version = cal.version;
    rep.params["N"] = N;
    rep.params["target_h"] = target_h;

    ConvexDomain dom = make_domain(family, N);
    ScalarField v = solve_torsion(dom, target_h);
    auto [u, eig] = solve_ground_state(dom, target_h);
    MaxReport mu = locate_max(u);
    LengthScaleReport ls = length_scale(dom);
    const double L = ls.L;

    // box around the eigenfunction maximum, shrunk by 2 target_h and
    // clipped to the domain box
    const Grid& g = v.grid;
    double bx0 = mu.x_star - L / 5.0 + 2 * target_h, bx1 = mu.x_star + L / 5.0 - 2 * target_h;
    double by0 = mu.y_star - 1.0 / L + 2 * target_h, by1 = mu.y_star + 1.0 / L - 2 * target_h;
    bool clipped = bx0 < dom.a() || bx1 > dom.b();
    bx0 = std::max(bx0, dom.a());
    bx1 = std::min(bx1, dom.b());
    rep.metrics["box_clipped"] = clipped ? 1.0 : 0.0;

    double vmax_grid = 0;
    for (int32_t node : g.node_of_unknown)
        vmax_grid = std::max(vmax_grid, v.values[static_cast<size_t>(node)]);

    double worst_gap = 0, most_negative = 0;
    for (int i = 0; i < g.nx; ++i) {
        double x = g.x(i);
        if (x < bx0 || x > bx1) continue;
        for (int j = 0; j < g.ny; ++j) {
            double y = g.y(j);
            if (y < by0 || y > by1) continue;
            if (!g.is_interior(i, j)) continue;
            double gap = vmax_grid - v.at_node(i, j);
            worst_gap = std::max(worst_gap, gap);
            most_negative = std::min(most_negative, gap);
        }
    }
    double K = worst_gap * L * L;
    rep.metrics["K"] = K;
    rep.metrics["L"] = L;
    rep.metrics["lambda"] = eig.lambda;
    rep.metrics["min_gap"] = most_negative;
    if (family == DomainKind::Rectangle)
        rep.criteria.push_back(below("K", K, cal.near_K_rectangle));
    if (family == DomainKind::Omega2)
        rep.criteria.push_back(below("K", K, cal.near_K_omega2));
    rep.criteria.push_back(above("min_gap", most_negative, -1e-10));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_hessian_scaling(const std::vector<double>& N_list, const Calibration& cal,
                                     double target_h, int threads) {
    ExperimentReport rep;
    rep.name = "hessian_scaling";
    rep.calibration_version = cal.version;
    rep.params["target_h"] = target_h;

    struct Slot {
        double neg_dxx = 0, neg_dyy = 0, diameter = 0;
    };
    std::vector<Slot> slots(N_list.size());
    for_each_N(N_list, threads, [&](size_t idx, double N) {
        ConvexDomain dom = ConvexDomain::omega2(N);
        ScalarField v = solve_torsion(dom, target_h);
        MaxReport m = locate_max(v);
        double level = m.v_star - cal.diameter_level_coeff / std::sqrt(N);
        SuperlevelReport sl = superlevel_projection(v, level);
        slots[idx] = {-m.directional.front().second,   // angle 0
                      -m.directional[8].second,        // angle pi/2
                      sl.diameter};
    });

    std::vector<double> logs_N, logs_dxx;
    double Nmax = *std::max_element(N_list.begin(), N_list.end());
    for (size_t i = 0; i < N_list.size(); ++i) {
        const double N = N_list[i];
        rep.metrics["neg_dxx@" + fmt_N(N)] = slots[i].neg_dxx;
        rep.metrics["neg_dyy@" + fmt_N(N)] = slots[i].neg_dyy;
        logs_N.push_back(std::log(N));
        logs_dxx.push_back(std::log(std::max(slots[i].neg_dxx, 1e-300)));
        rep.criteria.push_back(
            within("neg_dyy_N" + fmt_N(N), slots[i].neg_dyy, cal.yy_band_lo, cal.yy_band_hi));
        rep.metrics["diameter@" + fmt_N(N)] = slots[i].diameter;
        rep.metrics["diam_over_sqrtN@" + fmt_N(N)] = slots[i].diameter / std::sqrt(N);
        if (N == Nmax)
            rep.criteria.push_back(
                below("diameter_Nmax", slots[i].diameter, std::sqrt(N) + 2 * target_h));
    }
    LineFit f = fit_line(logs_N, logs_dxx);
    rep.metrics["slope_dxx"] = f.slope;
    rep.criteria.push_back(within("slope_dxx", f.slope,
                                  cal.hessian_slope - cal.hessian_slope_tol,
                                  cal.hessian_slope + cal.hessian_slope_tol));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_directional_hessian(double N, double M, const Calibration& cal,
                                         double target_h) {
    ExperimentReport rep;
    rep.name = "directional_hessian";
    rep.calibration_version = cal.version;
    rep.params["N"] = N;
    rep.params["M"] = M;
    rep.params["target_h"] = target_h;

    ConvexDomain dom = ConvexDomain::omega2(N);
    KernelConstants kc = cal.for_kind(DomainKind::Omega2);
    auto cert = find_property_max(dom, M, kc.c1, kc.C1, CertificateSelection::Smallest);
    if (!cert)
        throw HypothesisError("exp_directional_hessian: no flatness certificate for this N, M");
    const double delta = cert->delta;
    rep.metrics["delta"] = delta;
    rep.metrics["x_plus"] = cert->x_plus;
    rep.metrics["error_at_worst"] = cert->error_at_worst;

    ScalarField v = solve_torsion(dom, target_h);
    MaxReport m = locate_max(v);
    double rho_min = 1e300, rho_max = -1e300;
    for (const auto& d : m.directional) {
        double b = std::sin(d.angle);
        double alpha = std::max(b * b, delta);
        double rho = -d.second / alpha;
        std::ostringstream key;
        key << "rho@" << d.angle;
        rep.metrics[key.str()] = rho;
        rho_min = std::min(rho_min, rho);
        rho_max = std::max(rho_max, rho);
    }
    rep.metrics["rho_spread"] = rho_max / rho_min;
    rep.metrics["neg_dyy"] = -m.directional[8].second;
    rep.criteria.push_back(below("rho_spread", rho_max / rho_min, cal.directional_spread_max));
    rep.criteria.push_back(
        within("neg_dyy", -m.directional[8].second, cal.yy_band_lo, cal.yy_band_hi));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_max_value_sandwich(double N, const Calibration& cal, double target_h) {
    ExperimentReport rep;
    rep.name = "max_value_sandwich";
    rep.calibration_version = cal.version;
    rep.params["N"] = N;
    rep.params["target_h"] = target_h;

    ConvexDomain dom = ConvexDomain::omega2(N);
    KernelConstants kc = cal.for_kind(DomainKind::Omega2);
    auto cert = find_property_max(dom, cal.directional_M, kc.c1, kc.C1,
                                  CertificateSelection::Smallest);
    if (!cert) throw HypothesisError("exp_max_value_sandwich: no flatness certificate");
    const double delta = cert->delta;
    rep.metrics["delta"] = delta;

    ScalarField v = solve_torsion(dom, target_h);
    MaxReport m = locate_max(v);
    double vmax_all = 0;
    for (int32_t node : v.grid.node_of_unknown)
        vmax_all = std::max(vmax_all, v.values[static_cast<size_t>(node)]);

    const double slack = 1e-3;
    rep.metrics["v_star"] = m.v_star;
    rep.metrics["v_grid_max"] = vmax_all;
    rep.criteria.push_back(above("v_star_lower", m.v_star, 0.125 - delta / 100.0 - slack));
    rep.criteria.push_back(below("v_star_upper", vmax_all, 0.125 + slack));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_kernel_checks(const Calibration& cal) {
    ExperimentReport rep;
    rep.name = "kernel_checks";
    rep.calibration_version = cal.version;

    // lattice identity against the closed form at xi = 0
    double worst_rhs = 0, worst_lhs_gap = 0;
    for (double a : {0.5, 1.0, 5.0}) {
        double closed = std::cosh(a / 2) / std::sinh(a / 2) / (2 * a);
        worst_rhs = std::max(worst_rhs, std::abs(poisson_rhs(a, 0.0, 64) - closed));
        long M = 1000000;
        double gap = std::abs(poisson_lhs(a, 0.0, M) - closed);
        worst_lhs_gap = std::max(worst_lhs_gap, gap - poisson_lhs_tail_bound(M));
        rep.metrics["poisson_rhs_err@" + fmt_N(a)] = std::abs(poisson_rhs(a, 0.0, 64) - closed);
        rep.metrics["poisson_lhs_err@" + fmt_N(a)] = gap;
        rep.metrics["poisson_lhs_accel_err@" + fmt_N(a)] =
            std::abs(poisson_lhs(a, 0.0, M, true) - closed);
    }
    rep.criteria.push_back(below("poisson_exp_side", worst_rhs, 1e-10));
    rep.criteria.push_back(below("poisson_poly_side_within_tail", worst_lhs_gap, 0.0));

    // slice-kernel structure over 100 seeded random configurations
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> Ud(2.0, 20.0), Uh(0.5, 1.0), U01(0.0, 1.0);
    double worst_ode = 0, worst_jump = 0, worst_sym = 0, worst_bnd = 0;
    for (int trial = 0; trial < 100; ++trial) {
        KernelContext ctx;
        ctx.d_tilde = Ud(rng);
        ctx.h_tilde = Uh(rng);
        ctx.x_tilde = 0.5 * ctx.d_tilde;
        int n = 1 + int(U01(rng) * 12);
        double x = ctx.d_tilde * (0.1 + 0.8 * U01(rng));
        double xp = ctx.d_tilde * (0.1 + 0.8 * U01(rng));
        if (std::abs(x - xp) < 0.05) xp = std::min(ctx.d_tilde * 0.95, xp + 0.07);

        // ODE residual (relative), centered FD in x
        const double s = 1e-4;
        double fm = f_n(ctx, n, x - s, xp), f0 = f_n(ctx, n, x, xp), fp = f_n(ctx, n, x + s, xp);
        double d2 = (fp - 2 * f0 + fm) / (s * s);
        double k2 = (n * kPi / ctx.h_tilde) * (n * kPi / ctx.h_tilde);
        if (std::abs(f0) > 1e-280)
            worst_ode = std::max(worst_ode, std::abs(d2 - k2 * f0) / std::abs(k2 * f0));

        // unit jump of the normalized slice Green's function derivative
        double jump = f_n_dx(ctx, n, xp, xp, +1) - f_n_dx(ctx, n, xp, xp, -1);
        worst_jump = std::max(worst_jump, std::abs(jump * ctx.h_tilde / 2.0 - 1.0));

        worst_sym = std::max(worst_sym, std::abs(f_n(ctx, n, x, xp) - f_n(ctx, n, xp, x)));
        worst_bnd = std::max(worst_bnd,
                             std::max(std::abs(f_n(ctx, n, 0.0, xp)),
                                      std::abs(f_n(ctx, n, ctx.d_tilde, xp))));
    }
    rep.metrics["fn_ode_rel"] = worst_ode;
    rep.metrics["fn_jump_err"] = worst_jump;
    rep.metrics["fn_sym"] = worst_sym;
    rep.metrics["fn_boundary"] = worst_bnd;
    rep.criteria.push_back(below("fn_ode_rel", worst_ode, 1e-5));
    rep.criteria.push_back(below("fn_jump_err", worst_jump, 1e-6));
    rep.criteria.push_back(below("fn_sym", worst_sym, 1e-10));
    rep.criteria.push_back(below("fn_boundary", worst_bnd, 1e-12));

    // warped-kernel symmetry and exponential decay on a wide rectangle
    ConvexDomain dom = ConvexDomain::rectangle(20);
    KernelContext ctx = KernelContext::at(dom, 0.0);
    std::uniform_real_distribution<double> Ux(-4.0, 4.0), Uy(0.1, 0.9);
    double worst_gsym = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Point p{Ux(rng), Uy(rng)}, q{Ux(rng), Uy(rng)};
        if (std::abs(p.x - q.x) < 1e-3) continue;
        double gpq = approx_green(dom, ctx, p, q);
        double gqp = approx_green(dom, ctx, q, p);
        worst_gsym = std::max(worst_gsym, std::abs(gpq - gqp));
    }
    rep.metrics["green_sym"] = worst_gsym;
    rep.criteria.push_back(below("green_sym", worst_gsym, 1e-10));

    std::vector<double> seps, logG;
    for (double sep = 1.0; sep <= 5.0; sep += 0.5) {
        double gval = std::abs(approx_green(dom, ctx, {-0.5 * sep, 0.4}, {0.5 * sep, 0.6}));
        seps.push_back(sep);
        logG.push_back(std::log(std::max(gval, 1e-300)));
    }
    LineFit decay = fit_line(seps, logG);
    rep.metrics["decay_rate"] = decay.slope;
    rep.criteria.push_back(below("decay_rate", decay.slope, -1.0));

    // log-singularity growth of the near-diagonal kernel
    KernelContext ctx_exact = ctx;
    std::vector<double> lg, gv;
    for (double sep = 1e-4; sep <= 1e-1 + 1e-12; sep *= std::pow(1000.0, 1.0 / 12)) {
        ctx_exact.n_cutoff = static_cast<int>(std::ceil(40.0 * ctx.h_tilde / sep));
        double gval =
            std::abs(approx_green(dom, ctx_exact, {-0.5 * sep, 0.5}, {0.5 * sep, 0.5}));
        lg.push_back(std::log(1.0 / sep));
        gv.push_back(gval);
    }
    LineFit logfit = fit_line(lg, gv);
    rep.metrics["log_singularity_B"] = logfit.slope;
    rep.metrics["log_singularity_A"] = logfit.intercept;
    rep.criteria.push_back(below("log_singularity_B", logfit.slope, 1.0));
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_reconstruction(const Calibration& cal, bool include_omega2) {
    ExperimentReport rep;
    rep.name = "reconstruction";
    rep.calibration_version = cal.version;

    // wide rectangle.  Ten probes near the working abscissa must hit v1
    // within the quadrature budget alone; at probes out to |x' - x~| = 1
    // the finite-window image term enters, so the bound gains the
    // exponential error term of the kernel construction (c1 = 1).
    {
        ConvexDomain dom = ConvexDomain::rectangle(10);
        KernelContext ctx = KernelContext::at(dom, 0.0);
        double worst_center = 0;
        int idx = 0;
        for (double xq : {-0.25, 0.0, 0.25})
            for (double yq : {0.25, 0.5, 0.75}) {
                double got = reconstruct_v1(dom, ctx, {xq, yq});
                double want = v1(dom, xq, yq);
                worst_center = std::max(worst_center, std::abs(got - want));
                rep.metrics["rect_err@" + std::to_string(idx++)] = std::abs(got - want);
            }
        {
            double got = reconstruct_v1(dom, ctx, {0.0, 0.4});
            worst_center = std::max(worst_center, std::abs(got - v1(dom, 0.0, 0.4)));
            rep.metrics["rect_err@" + std::to_string(idx++)] = std::abs(got - v1(dom, 0.0, 0.4));
        }
        double worst_wide = 0;
        for (double xq : {-1.0, -0.5, 0.5, 1.0})
            for (double yq : {0.25, 0.5}) {
                double got = reconstruct_v1(dom, ctx, {xq, yq});
                worst_wide = std::max(worst_wide, std::abs(got - v1(dom, xq, yq)));
            }
        rep.metrics["rect_worst"] = worst_center;
        rep.metrics["rect_worst_wide"] = worst_wide;
        rep.criteria.push_back(below("rect_worst", worst_center, 1e-3));
        rep.criteria.push_back(
            below("rect_worst_wide", worst_wide, 1e-3 + std::exp(-ctx.d_tilde)));
    }

    if (include_omega2) {
        ConvexDomain dom = ConvexDomain::omega2(64);
        KernelContext ctx = KernelContext::at(dom, 0.0);
        int idx = 0;
        double worst_excess = -1e300;
        for (double xq : {-1.0, 0.0, 1.0})
            for (double yq : {0.35, 0.5, 0.65}) {
                double got = reconstruct_v1(dom, ctx, {xq, yq});
                double want = v1(dom, xq, yq);
                double err = std::abs(got - want);
                ErrorBudget eb = error_budget(dom, xq, cal.recon_c1, cal.recon_C1_envelope);
                rep.metrics["omega2_err@" + std::to_string(idx)] = err;
                rep.metrics["omega2_budget@" + std::to_string(idx)] = eb.total;
                worst_excess = std::max(worst_excess, err - eb.total);
                ++idx;
            }
        rep.metrics["omega2_worst_excess"] = worst_excess;
        rep.criteria.push_back(below("omega2_within_budget", worst_excess, 0.0));
    }
    return rep;
}

}  // namespace torsionlab
