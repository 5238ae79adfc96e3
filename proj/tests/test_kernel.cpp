#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "torsionlab/greens_kernel.hpp"

using namespace torsionlab;

TEST_CASE("double sine series basics") {
    // boundary point: every summand carries sin(0)
    CHECK(rect_green_double_series(1, 1, {0.25, 0.25}, {0.5, 0.0}, 200) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // symmetry is exact term by term
    double a = rect_green_double_series(1, 2, {0.3, 0.4}, {1.2, 0.7}, 300);
    double b = rect_green_double_series(1, 2, {1.2, 0.7}, {0.3, 0.4}, 300);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    CHECK_THROWS_AS(rect_green_double_series(1, 1, {0.25, 0.25}, {0.25, 0.25}, 10),
                    SingularityError);
}

TEST_CASE("poisson-summed kernel matches the double series on the unit square") {
    ConvexDomain square = ConvexDomain::custom_height(
        0.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; });
    KernelContext ctx;
    ctx.x_tilde = 0.5;
    ctx.h_tilde = 1.0;
    ctx.d_tilde = 1.0;
    double dbl = rect_green_double_series(1, 1, {0.25, 0.25}, {0.75, 0.75}, 2000);
    double poisson = approx_green(square, ctx, {0.25, 0.25}, {0.75, 0.75});
    CHECK(poisson == doctest::Approx(dbl).epsilon(1e-8));
}

TEST_CASE("f_n values and structure") {
    KernelContext ctx;
    ctx.d_tilde = 10.0;
    ctx.h_tilde = 1.0;
    ctx.x_tilde = 5.0;

    // direct low-order lattice oracle at n = 1, x = 4, x' = 6
    double direct = 0;
    for (int m = -2; m <= 2; ++m) {
        double A = 2.0 * kPi * 10.0;
        direct += std::exp(-A * std::abs(0.5 + m)) - std::exp(-A * std::abs(-0.1 + m));
    }
    direct /= kPi;
    CHECK(f_n(ctx, 1, 4.0, 6.0) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(f_n(ctx, 1, 4.0, 6.0) == doctest::Approx(-std::exp(-2.0 * kPi) / kPi).epsilon(1e-4));

    // vanishing at the slice ends, symmetry in the arguments
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.5, 9.5);
    for (int t = 0; t < 50; ++t) {
        double x = U(rng), xp = U(rng);
        int n = 1 + t % 6;
        CHECK(std::abs(f_n(ctx, n, 0.0, xp)) <= 1e-13);
        CHECK(std::abs(f_n(ctx, n, 10.0, xp)) <= 1e-13);
        CHECK(f_n(ctx, n, x, xp) == doctest::Approx(f_n(ctx, n, xp, x)).epsilon(1e-13));
    }

    // interval equation away from the source: d2 f = (n pi / h)^2 f
    double x = 4.3, xp = 6.1, s = 1e-4;
    for (int n : {1, 2, 5, 9}) {
        double d2 = (f_n(ctx, n, x + s, xp) - 2 * f_n(ctx, n, x, xp) + f_n(ctx, n, x - s, xp)) /
                    (s * s);
        double k2 = n * kPi / ctx.h_tilde * (n * kPi / ctx.h_tilde);
        CHECK(d2 / (k2 * f_n(ctx, n, x, xp)) == doctest::Approx(1.0).epsilon(1e-5));
    }

    // unit jump of the normalized derivative across the source
    for (int n : {1, 3, 7}) {
        double jump = f_n_dx(ctx, n, 6.1, 6.1, +1) - f_n_dx(ctx, n, 6.1, 6.1, -1);
        CHECK(jump * ctx.h_tilde / 2.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("warp map pins the slice ends") {
    ConvexDomain o2 = ConvexDomain::omega2(16);
    WarpMap w{&o2, o2.height(1.0)};
    for (double x : {0.0, 0.7, 1.9}) {
        CHECK(w(x, o2.f1(x)) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(w(x, o2.f2(x)) == doctest::Approx(w.h_tilde).epsilon(1e-13));
    }
}

TEST_CASE("g_n warped mode") {
    ConvexDomain o2 = ConvexDomain::omega2(16);
    CHECK(g_n(o2, 1, 1.0, o2.f1(1.0)) == doctest::Approx(0.0).epsilon(1e-14));
    double mid = 0.5 * (o2.f1(1.0) + o2.f2(1.0));
    CHECK(g_n(o2, 1, 1.0, mid) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g_n(o2, 2, 1.0, mid)) <= 1e-14);
    ConvexDomain tri = ConvexDomain::custom_height(
        0.0, 8.0, [](double) { return 0.0; }, [](double x) { return x / 8.0; });
    CHECK_THROWS_AS(g_n(tri, 1, 0.0, 0.0), GeometryError);
}

TEST_CASE("approx_green: boundary vanishing, symmetry, decay, refusal") {
    ConvexDomain dom = ConvexDomain::rectangle(12);
    KernelContext ctx = KernelContext::at(dom, 0.0);
    CHECK(approx_green(dom, ctx, {1.0, 0.4}, {2.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-13));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> Ux(-2.5, 2.5), Uy(0.1, 0.9);
    for (int t = 0; t < 100; ++t) {
        Point p{Ux(rng), Uy(rng)}, q{Ux(rng), Uy(rng)};
        if (std::abs(p.x - q.x) < 1e-3) continue;
        CHECK(approx_green(dom, ctx, p, q) ==
              doctest::Approx(approx_green(dom, ctx, q, p)).epsilon(1e-10));
    }

    std::vector<double> xs, ys;
    for (double sep = 1.0; sep <= 5.0; sep += 1.0) {
        xs.push_back(sep);
        ys.push_back(std::log(std::abs(approx_green(dom, ctx, {-sep / 2, 0.4}, {sep / 2, 0.6}))));
    }
    CHECK(fit_line(xs, ys).slope <= -1.0);

    CHECK_THROWS_AS(approx_green(dom, ctx, {1.0, 0.4}, {1.0 + 1e-9, 0.6}), SingularityError);
}

TEST_CASE("lattice identity") {
    for (double a : {0.5, 1.0, 5.0}) {
        double closed = std::cosh(a / 2) / std::sinh(a / 2) / (2 * a);
        CHECK(poisson_rhs(a, 0.0, 64) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(std::abs(poisson_rhs(a, 0.0, 64) - closed) <=
              poisson_rhs_tail_bound(a, 0.0, 64) + 1e-13);
        double lhs = poisson_lhs(a, 0.0, 200000);
        CHECK(std::abs(lhs - closed) <= poisson_lhs_tail_bound(200000));
        CHECK(std::abs(poisson_lhs(a, 0.0, 200000, true) - closed) <= 1e-11);
    }
    // alternating-sign configuration, both sides at a large matched cutoff
    CHECK(poisson_identity_residual(1.0, 0.5, 500000) <= 1e-6);
    CHECK(poisson_identity_residual(5.0, 0.3, 100000) <= 1e-5);
}

TEST_CASE("reconstruction hits v1 on a wide rectangle") {
    ConvexDomain dom = ConvexDomain::rectangle(10);
    KernelContext ctx = KernelContext::at(dom, 0.0);
    for (double y : {0.25, 0.5, 0.75}) {
        double got = reconstruct_v1(dom, ctx, {0.0, y});
        CHECK(got == doctest::Approx(0.5 * y * (1 - y)).epsilon(2e-3));
    }
    CHECK_THROWS_AS(reconstruct_v1(dom, ctx, {3.0, 0.5}), DomainRangeError);
}
