#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "torsionlab/closed_forms.hpp"

using namespace torsionlab;

namespace {

// Independent reference for the rectangle series: naive summation with a
// fixed large cutoff, no tail bookkeeping.
double rect_series_oracle(double N, double x, double y, int n_max) {
    double s = 0;
    for (int n = 1; n <= n_max; n += 2) {
        double ratio = std::exp(n * kPi * (std::abs(x) - 0.5 * N)) *
                       (1.0 + std::exp(-2.0 * n * kPi * std::abs(x))) /
                       (1.0 + std::exp(-n * kPi * N));
        s += 2.0 / (double(n) * n * n) * ratio * std::sin(n * kPi * y);
    }
    return 0.5 * y * (1.0 - y) - 2.0 / (kPi * kPi * kPi) * s;
}

}  // namespace

TEST_CASE("rectangle torsion values") {
    CHECK(torsion_rectangle(4, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));

    // unit-square centre value, frozen from the n_max = 501 oracle
    double oracle = rect_series_oracle(1.0, 0.0, 0.5, 501);
    CHECK(oracle == doctest::Approx(0.0736713).epsilon(1e-5));
    CHECK(torsion_rectangle(1, 0.0, 0.5, 1e-12) == doctest::Approx(oracle).epsilon(1e-12));

    // far from the walls the cross-sectional parabola is the whole story
    CHECK(torsion_rectangle(40, 0.0, 0.5, 1e-13) == doctest::Approx(0.125).epsilon(1e-12));

    CHECK_THROWS_AS(torsion_rectangle(4, 3.0, 0.5), DomainRangeError);
    CHECK_THROWS_AS(torsion_rectangle(4, 0.0, 1.5), DomainRangeError);
}

TEST_CASE("rectangle torsion: wall values and tail bound bookkeeping") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double y = U(rng);
        CHECK(std::abs(torsion_rectangle(4, 2.0, y, 1e-10)) <= 2e-10);
    }
    SeriesTruncation tr;
    double v = torsion_rectangle_ex(4, 0.7, 0.3, 1e-12, tr);
    CHECK(tr.tail_bound <= 1e-12);
    CHECK(v == doctest::Approx(rect_series_oracle(4, 0.7, 0.3, 1001)).epsilon(1e-12));
}

TEST_CASE("rectangle torsion satisfies the equation (discrete probe)") {
    // five-point Laplacian at interior probes, step 1e-3
    const double s = 1e-3;
    for (auto [x, y] : {std::pair{0.0, 0.5}, {0.9, 0.3}, {-1.2, 0.7}}) {
        auto f = [&](double a, double b) { return torsion_rectangle(4, a, b, 1e-13); };
        double lap = (f(x + s, y) + f(x - s, y) + f(x, y + s) + f(x, y - s) - 4 * f(x, y)) /
                     (s * s);
        CHECK(lap == doctest::Approx(-1.0).epsilon(1e-4));
    }
}

TEST_CASE("ellipse torsion closed form") {
    CHECK(torsion_ellipse(2, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(torsion_ellipse(1, 0.0, 0.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(torsion_ellipse(8, 0.0, 0.0) == doctest::Approx(0.125 * 64.0 / 65.0).epsilon(1e-14));
    CHECK_THROWS_AS(torsion_ellipse(8, 4.1, 0.0), DomainRangeError);

    // the quadratic solves the equation identically
    double N = 8;
    double lap = -8.0 / (N * N) * 0.125 / (1.0 / (N * N) + 1.0) -
                 8.0 * 0.125 / (1.0 / (N * N) + 1.0);
    CHECK(lap == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("v1 parabola") {
    ConvexDomain o2 = ConvexDomain::omega2(16);
    double x = 1.3;
    CHECK(v1(o2, x, o2.f1(x)) == doctest::Approx(0.0).epsilon(1e-14));
    double mid = 0.5 * (o2.f1(x) + o2.f2(x));
    double h = o2.height(x);
    CHECK(v1(o2, x, mid) == doctest::Approx(h * h / 8.0).epsilon(1e-13));

    ConvexDomain r = ConvexDomain::rectangle(6);
    CHECK(v1(r, 1.0, 0.25) == doctest::Approx(3.0 / 32.0).epsilon(1e-14));
    CHECK_THROWS_AS(v1(r, 1.0, 1.5), DomainRangeError);
}

TEST_CASE("v1 hessian entries") {
    ConvexDomain r = ConvexDomain::rectangle(6);
    SymMat2 H = v1_hessian(r, 0.5, 0.3);
    CHECK(H.yy == doctest::Approx(-1.0));
    CHECK(H.xx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(H.xy == doctest::Approx(0.0).epsilon(1e-12));

    // ellipse centre: xx entry is -1/N^2 exactly; cross-check the analytic
    // derivatives against central differences of v1 itself
    double N = 8;
    ConvexDomain e = ConvexDomain::ellipse(N);
    SymMat2 He = v1_hessian(e, 0.0, 0.5);
    CHECK(He.xx == doctest::Approx(-1.0 / (N * N)).epsilon(1e-10));
    const double s = 1e-4;
    double fd = (v1(e, s, 0.5) - 2 * v1(e, 0.0, 0.5) + v1(e, -s, 0.5)) / (s * s);
    CHECK(He.xx == doctest::Approx(fd).epsilon(1e-5));

    // one-sided stencil next to the parabolic/linear junction still returns
    // the yy entry exactly
    ConvexDomain o2 = ConvexDomain::omega2(16);
    SymMat2 Hk = v1_hessian(o2, 2.0, 0.4);
    CHECK(Hk.yy == doctest::Approx(-1.0));
}

TEST_CASE("error budget: constant height leaves only the exponential term") {
    ConvexDomain r = ConvexDomain::rectangle(20);
    ErrorBudget eb = error_budget(r, 0.0, 1.0, 1.0);
    CHECK(eb.term_osc == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eb.total == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
    CHECK_THROWS_AS(error_budget(ConvexDomain::omega1(16), 0.5, 1.0, 1.0), HypothesisError);
}

TEST_CASE("error budget against a dense grid-search oracle") {
    // oracle: brute-force maximization of the weighted oscillation at very
    // fine resolution
    auto oracle = [](const ConvexDomain& dom, double xt, double c1) {
        double d = dom.dist_to_ends(xt);
        double ht = dom.height(xt);
        double best = 0;
        const int K = 400000;
        for (int k = -K; k <= K; ++k) {
            double x = xt + 0.75 * d * k / K;
            double w = std::exp(-c1 * std::abs(x - xt)) * std::abs(dom.height(x) - ht);
            best = std::max(best, w);
        }
        return std::exp(-c1 * d) + best;
    };

    ConvexDomain o2 = ConvexDomain::omega2(64);
    ErrorBudget eb = error_budget(o2, 0.0, 1.0, 1.0);
    CHECK(eb.total == doctest::Approx(oracle(o2, 0.0, 1.0)).epsilon(1e-6));
    // the linear tail dominates the parabolic cap's own oscillation
    double cap_only = 4.0 * std::exp(-2.0) / (64.0 * 64.0);
    CHECK(eb.term_osc > cap_only);

    ConvexDomain o1 = ConvexDomain::omega1(16);
    ErrorBudget e1 = error_budget(o1, 4.0, 1.0, 1.0);
    CHECK(e1.total == doctest::Approx(oracle(o1, 4.0, 1.0)).epsilon(1e-6));
    // dominated by the steep ramp on the left of the junction
    CHECK(e1.term_osc > 0.05);
}

TEST_CASE("error budget is monotone along the rectangle") {
    ConvexDomain r = ConvexDomain::rectangle(30);
    double prev = 1e300;
    for (double xt : {-10.0, -5.0, 0.0}) {
        double tot = error_budget(r, xt, 1.0, 1.0).total;
        CHECK(tot <= prev);
        prev = tot;
    }
}
