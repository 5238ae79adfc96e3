#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "torsionlab/closed_forms.hpp"
#include "torsionlab/domain.hpp"

using namespace torsionlab;

TEST_CASE("height of the built-in families") {
    CHECK(ConvexDomain::rectangle(4).height(1.0) == doctest::Approx(1.0));

    // ramp family peaks exactly at x = sqrt(N)
    ConvexDomain o1 = ConvexDomain::omega1(16);
    CHECK(o1.height(4.0) == doctest::Approx(1.0));
    CHECK(o1.height(2.0) == doctest::Approx(0.5));
    CHECK(o1.height(16.0) == doctest::Approx(1.0 - 12.0 / 4096.0));

    // parabolic cap meets the linear tail at |x| = N^(1/4)
    ConvexDomain o2 = ConvexDomain::omega2(16);
    CHECK(o2.height(2.0) == doctest::Approx(1.0 - 1.0 / 64.0).epsilon(1e-12));
    CHECK(o2.height(0.0) == doctest::Approx(1.0));
    CHECK(o2.height(8.0) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(o1.height(17.0), DomainRangeError);
    CHECK_THROWS_AS(o1.height(-0.5), DomainRangeError);
}

TEST_CASE("dist_to_ends") {
    ConvexDomain r = ConvexDomain::rectangle(10);
    CHECK(r.dist_to_ends(0.0) == doctest::Approx(5.0));
    CHECK(r.dist_to_ends(r.a()) == doctest::Approx(0.0));
    CHECK(ConvexDomain::omega1(16).dist_to_ends(4.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(r.dist_to_ends(5.5), DomainRangeError);
}

TEST_CASE("ordering and height range on random abscissae") {
    std::mt19937 rng(7);
    for (auto make : {+[] { return ConvexDomain::rectangle(8); },
                      +[] { return ConvexDomain::ellipse(8); },
                      +[] { return ConvexDomain::omega1(16); },
                      +[] { return ConvexDomain::omega2(16); }}) {
        ConvexDomain d = make();
        std::uniform_real_distribution<double> U(d.a(), d.b());
        for (int i = 0; i < 1000; ++i) {
            double x = U(rng);
            CHECK(d.f1(x) <= d.f2(x) + 1e-12);
            double h = d.height(x);
            CHECK(h >= -1e-12);
            CHECK(h <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("length scale: rectangle, right triangle, ellipse") {
    CHECK(length_scale(ConvexDomain::rectangle(8)).L == doctest::Approx(8.0).epsilon(1e-9));

    // right triangle h(x) = x/N: solve 1 - L/N = 1 - L^-2, i.e. L^3 = N
    ConvexDomain tri = ConvexDomain::custom_height(
        0.0, 64.0, [](double) { return 0.0; }, [](double x) { return x / 64.0; });
    double oracle = bisect([](double L) { return L * L * L - 64.0; }, 1.0, 64.0, 1e-12);
    CHECK(length_scale(tri).L == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(oracle == doctest::Approx(4.0).epsilon(1e-9));

    // superlevel of h = sqrt(1 - 4x^2/N^2) at level t has length N sqrt(1 - t^2);
    // oracle solves |superlevel| = L by bisection
    double N = 100.0;
    double L_oracle = bisect(
        [N](double L) {
            double t = 1.0 - 1.0 / (L * L);
            return N * std::sqrt(1.0 - t * t) - L;
        },
        1.0, N, 1e-12);
    CHECK(L_oracle == doctest::Approx(std::pow(2.0, 0.25) * 10.0).epsilon(1e-3));
    CHECK(length_scale(ConvexDomain::ellipse(100)).L == doctest::Approx(L_oracle).epsilon(1e-6));
}

TEST_CASE("length scale monotonicity in N") {
    double L1 = length_scale(ConvexDomain::rectangle(8)).L;
    double L2 = length_scale(ConvexDomain::rectangle(16)).L;
    CHECK(L2 == doctest::Approx(2.0 * L1).epsilon(1e-9));

    auto tri = [](double N) {
        return ConvexDomain::custom_height(
            0.0, N, [](double) { return 0.0; }, [N](double x) { return x / N; });
    };
    double T1 = length_scale(tri(64)).L;
    double T2 = length_scale(tri(128)).L;
    CHECK(T2 / T1 == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-3));
}

TEST_CASE("window of the length-scale report contains only tall slices") {
    for (auto dom : {ConvexDomain::omega1(16), ConvexDomain::omega2(64)}) {
        LengthScaleReport rep = length_scale(dom);
        CHECK(rep.L >= std::pow(dom.span(), 1.0 / 3.0) - 1e-6);
        CHECK(rep.L <= dom.span() + 1e-6);
        double level = 1.0 - 1.0 / (rep.L * rep.L);
        for (int i = 0; i <= 200; ++i) {
            double x = rep.I_lo + (rep.I_hi - rep.I_lo) * i / 200.0;
            CHECK(dom.height(x) >= level - 1e-7);
        }
    }
}

TEST_CASE("validate flags broken inputs and passes the families") {
    CHECK(validate(ConvexDomain::rectangle(4)).valid);
    CHECK(validate(ConvexDomain::ellipse(8)).valid);
    CHECK(validate(ConvexDomain::omega1(16)).valid);
    CHECK(validate(ConvexDomain::omega2(64)).valid);

    ConvexDomain bad = ConvexDomain::custom_height(
        0.0, 10.0, [](double) { return 0.0; },
        [](double x) { return 1.0 + 0.1 * std::sin(x); });
    ValidationReport rep = validate(bad);
    CHECK_FALSE(rep.valid);

    // upper chain with increasing slope: not concave
    ConvexDomain bad2 = ConvexDomain::custom_height(
        0.0, 4.0, [](double) { return 0.0; },
        [](double x) { return x < 2.0 ? 0.1 * x : 0.2 + 0.4 * (x - 2.0); });
    CHECK_FALSE(validate(bad2).valid);
}

TEST_CASE("piecewise linear input is reoriented and normalized") {
    // a thin slab tilted by 30 degrees; minimal width 0.5 across the slab
    std::vector<std::pair<double, double>> verts;
    double th = kPi / 6, c = std::cos(th), s = std::sin(th);
    auto rot = [&](double x, double y) {
        return std::make_pair(c * x - s * y, s * x + c * y);
    };
    verts.push_back(rot(0, 0));
    verts.push_back(rot(6, 0));
    verts.push_back(rot(6, 0.5));
    verts.push_back(rot(3, 1.0));
    verts.push_back(rot(0, 0.5));
    ConvexDomain d = ConvexDomain::piecewise_linear(verts);
    CHECK(validate(d).valid);
    CHECK(d.height(d.x_bar()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("concavity consequence used by the kernel module") {
    for (auto dom : {ConvexDomain::omega1(16), ConvexDomain::omega2(64),
                     ConvexDomain::ellipse(32)}) {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> U(dom.a(), dom.b());
        for (int i = 0; i < 400; ++i) {
            double xt = U(rng);
            if (dom.height(xt) < 0.5) continue;
            double d = dom.dist_to_ends(xt);
            std::uniform_real_distribution<double> V(xt - d / 2, xt + d / 2);
            double xp = std::clamp(V(rng), dom.a(), dom.b());
            CHECK(dom.height(xp) >= 0.25 - 1e-9);
        }
    }
}

TEST_CASE("property-max certificates") {
    // constant height: only the exponential term remains, any grid delta
    // above 100 C1 e^{-c1 d} qualifies and the search returns the largest
    ConvexDomain rect = ConvexDomain::rectangle(64);
    auto cert = find_property_max(rect, 8.0, 1.0, 1.0);
    REQUIRE(cert.has_value());
    CHECK(cert->delta == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(cert->clamped_minus);
    CHECK(cert->clamped_plus);
    CHECK(cert->error_at_worst <= cert->delta / 100.0);

    // steep ramp: no certificate for small delta
    ConvexDomain o1 = ConvexDomain::omega1(16);
    auto none = find_property_max(o1, 4.0, 1.0, 1.0);
    CHECK_FALSE(none.has_value());

    // parabolic cap with family-calibrated constants: the smallest
    // admissible delta is of the order M^2/(2 N^2)
    ConvexDomain o2 = ConvexDomain::omega2(64);
    auto small = find_property_max(o2, 2.5, 1.0, 7e-4, CertificateSelection::Smallest);
    REQUIRE(small.has_value());
    CHECK(small->delta <= 2e-3);
    CHECK(small->delta >= 1e-5);
    CHECK(small->error_at_worst <= small->delta / 100.0);

    CHECK_THROWS_AS(find_property_max(o1, 100.0, 1.0, 1.0), GeometryError);
}

TEST_CASE("certificate invariants re-verified at 10x denser sampling") {
    ConvexDomain o2 = ConvexDomain::omega2(64);
    auto cert = find_property_max(o2, 2.5, 1.0, 7e-4, CertificateSelection::Smallest);
    REQUIRE(cert.has_value());
    // crossing equations (or clamping) hold
    if (!cert->clamped_minus)
        CHECK(o2.height(cert->x_minus) == doctest::Approx(1.0 - 2 * cert->delta).epsilon(1e-8));
    if (!cert->clamped_plus)
        CHECK(o2.height(cert->x_plus) == doctest::Approx(1.0 - 2 * cert->delta).epsilon(1e-8));
    double worst = 0;
    for (int k = 0; k <= 2560; ++k) {
        double xt = cert->x_minus + (cert->x_plus - cert->x_minus) * k / 2560.0;
        worst = std::max(worst, error_budget(o2, xt, cert->c1, cert->C1).total);
    }
    CHECK(worst <= cert->delta / 100.0 + 1e-12);
}
