#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "symconn/connection.hpp"
#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/metricsurf.hpp"
#include "symconn/operators.hpp"

using symconn::ChartConnection;
using symconn::MetricChart;
using symconn::SymCov;

namespace {

double max_abs(const SymCov& t) {
    double m = 0.0;
    for (int j = 0; j <= t.degree(); ++j) {
        m = std::max(m, std::abs(t[j]));
    }
    return m;
}

std::vector<std::array<double, 2>> trimmed_samples(const ChartConnection& conn,
                                                   int count, unsigned seed,
                                                   double max_abs_x) {
    std::vector<std::array<double, 2>> kept;
    for (const auto& p : conn.sample_points(count, seed)) {
        if (std::abs(p[0]) <= max_abs_x) {
            kept.push_back(p);
        }
    }
    return kept;
}

}  // namespace

TEST_CASE("strip family: moment map, criticality, and the measured tau") {
    const double a = 0.4;
    const double p = -0.3;
    const double tau = -1.0;

    SUBCASE("general q keeps K = x + a and H(K) = 0") {
        const double q = -2.0;
        const ChartConnection conn =
            symconn::bourgeois_cahen_family(a, p, q, tau);
        for (const auto& pt : conn.sample_points(25, 61)) {
            CHECK(symconn::moment_k(conn, pt[0], pt[1]) ==
                  doctest::Approx(pt[0] + a).epsilon(1e-12));
            CHECK(max_abs(symconn::hop_k_closed_form(conn, pt[0], pt[1])) <
                  1e-9);

            // Only the xyy slot of the symmetrized Ricci derivative
            // survives, with value (tau - q) / 9.
            const SymCov s = symconn::sdast_ricci(conn, pt[0], pt[1]);
            CHECK(9.0 * s[2] == doctest::Approx(tau - q).epsilon(1e-9));
            CHECK(std::abs(s[0]) < 1e-10);
            CHECK(std::abs(s[1]) < 1e-10);
            CHECK(std::abs(s[3]) < 1e-10);

            // The scalar invariant K^2 + rho(H_K) measures (2 tau + q) / 3,
            // not the tau parameter, away from q = tau.
            CHECK(symconn::tau(conn, pt[0], pt[1]) ==
                  doctest::Approx((2.0 * tau + q) / 3.0).epsilon(1e-9));
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            const double sx = pt[0] + a;
            CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-10));
            CHECK(r[1] == doctest::Approx((2.0 * tau + q) / 3.0 - sx * sx)
                              .epsilon(1e-9));
        }
    }

    SUBCASE("q = tau is the preferred member") {
        const ChartConnection conn =
            symconn::bourgeois_cahen_family(a, p, tau, tau);
        for (const auto& pt : conn.sample_points(25, 62)) {
            const double sx = pt[0] + a;
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-11));
            CHECK(r[1] == doctest::Approx(tau - sx * sx).epsilon(1e-10));
            CHECK(symconn::tau(conn, pt[0], pt[1]) ==
                  doctest::Approx(tau).epsilon(1e-10));
            CHECK(max_abs(symconn::sdast_rho(conn, pt[0], pt[1])) < 1e-9);
            CHECK(max_abs(symconn::sdast_ricci(conn, pt[0], pt[1])) < 1e-9);
        }
    }

    SUBCASE("positive tau restricts the domain to the central strip") {
        const ChartConnection conn =
            symconn::bourgeois_cahen_family(0.0, 0.0, 1.0, 1.0);
        CHECK_NOTHROW(conn.jets_at(0.0, 5.0, 2));
        CHECK_THROWS_AS(conn.jets_at(1.0, 0.0, 2), std::domain_error);
        CHECK_THROWS_AS(conn.jets_at(-1.0, 0.0, 2), std::domain_error);
        CHECK(symconn::moment_k(conn, 0.5, -2.0) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("quartic family: K = x + a, critical, tau = a^2 - 2b") {
    const double params[][4] = {{0.3, -0.2, 0.1, 0.05}, {-0.5, 0.4, 0.0, 1.0}};
    for (const auto& pr : params) {
        const ChartConnection conn =
            symconn::quartic_family(pr[0], pr[1], pr[2], pr[3]);
        for (const auto& pt : conn.sample_points(20, 63)) {
            CHECK(symconn::moment_k(conn, pt[0], pt[1]) ==
                  doctest::Approx(pt[0] + pr[0]).epsilon(1e-12));
            CHECK(max_abs(symconn::hop_k_closed_form(conn, pt[0], pt[1])) <
                  1e-10);
            CHECK(symconn::tau(conn, pt[0], pt[1]) ==
                  doctest::Approx(pr[0] * pr[0] - 2.0 * pr[1]).epsilon(1e-10));
        }
    }
}

TEST_CASE("sphere family: linear moment map and quadratic invariants") {
    const double ts[] = {0.0, 0.7, 1.0, -1.3};
    for (double t : ts) {
        const ChartConnection conn = symconn::sphere_family(t);
        const auto pts = trimmed_samples(conn, 40, 64, 0.9);
        REQUIRE(pts.size() > 10);
        for (const auto& pt : pts) {
            CHECK(symconn::moment_k(conn, pt[0], pt[1]) ==
                  doctest::Approx(1.5 * t * pt[0]).epsilon(1e-11));
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-10));
            CHECK(r[1] == doctest::Approx(0.5 * t * (1.0 - 3.0 * pt[0] * pt[0]))
                              .epsilon(1e-10));
            CHECK(symconn::tau(conn, pt[0], pt[1]) ==
                  doctest::Approx(0.75 * t * t).epsilon(1e-9));
            // The criticality residual is exactly zero but its evaluation
            // cancels (1 - x^2)-power terms, so the attainable bound
            // degrades toward the chart edge.
            const double hop_tol = std::abs(pt[0]) <= 0.7 ? 1e-9 : 2e-7;
            CHECK(max_abs(symconn::hop_k_closed_form(conn, pt[0], pt[1])) <
                  hop_tol);
        }
    }
}

TEST_CASE("cube of an exact differential is moment flat") {
    SUBCASE("fields are the cubed gradient components") {
        // f = x y + x^3: f_x = y + 3x^2, f_y = x.
        const ChartConnection conn =
            symconn::cube_of_exact(symconn::parse_or_throw("x * y + x ^ 3"));
        const double x0 = 0.7;
        const double y0 = -0.4;
        const auto cj = conn.jets_at(x0, y0, 0);
        const double fx = y0 + 3.0 * x0 * x0;
        const double fy = x0;
        CHECK(cj.a.value() == doctest::Approx(fx * fx * fy).epsilon(1e-14));
        CHECK(cj.b.value() == doctest::Approx(-fx * fx * fx).epsilon(1e-14));
        CHECK(cj.c.value() == doctest::Approx(fy * fy * fy).epsilon(1e-14));
        CHECK(cj.d.value() == doctest::Approx(-fx * fy * fy).epsilon(1e-14));
    }

    SUBCASE("cubic graph function") {
        const ChartConnection conn =
            symconn::cube_of_exact(symconn::parse_or_throw("x * y + x ^ 3"));
        for (const auto& pt : conn.sample_points(20, 65)) {
            CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-10);
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            const double want_x = -8.0 * (pt[1] + 3.0 * pt[0] * pt[0]) -
                                  12.0 * pt[0] * pt[0];
            CHECK(r[0] == doctest::Approx(want_x).epsilon(1e-9));
            CHECK(r[1] == doctest::Approx(-8.0 * pt[0]).epsilon(1e-9));
        }
    }

    SUBCASE("transcendental graph function") {
        // f = x y + sin(x): u' = cos x, u''' = -cos x, so
        // rho_x = -8 (y + cos x) + 2 x^2 cos x and rho_y = -8 x.
        const ChartConnection conn =
            symconn::cube_of_exact(symconn::parse_or_throw("x * y + sin(x)"));
        for (const auto& pt : conn.sample_points(20, 66)) {
            CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-10);
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            const double want_x = -8.0 * (pt[1] + std::cos(pt[0])) +
                                  2.0 * pt[0] * pt[0] * std::cos(pt[0]);
            CHECK(r[0] == doctest::Approx(want_x).epsilon(1e-9));
            CHECK(r[1] == doctest::Approx(-8.0 * pt[0]).epsilon(1e-9));
        }
    }
}

TEST_CASE("Busemann deformation is moment flat with rho = -12 y^2 dy") {
    const ChartConnection conn = symconn::busemann_example();
    for (const auto& pt : conn.sample_points(20, 67)) {
        CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-9);
        const SymCov r = symconn::rho(conn, pt[0], pt[1]);
        CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r[1] ==
              doctest::Approx(-12.0 * pt[1] * pt[1]).epsilon(1e-9));
    }
}

TEST_CASE("harmonic deformation validates its one-form and is moment flat") {
    SUBCASE("du on the hyperbolic chart gives rho = 12 dx") {
        const ChartConnection conn = symconn::harmonic_deformation(
            MetricChart::hyperbolic_chart(), symconn::parse_or_throw("1"),
            symconn::parse_or_throw("0"));
        for (const auto& pt : conn.sample_points(15, 68)) {
            CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-9);
            const SymCov r = symconn::rho(conn, pt[0], pt[1]);
            CHECK(r[0] == doctest::Approx(12.0).epsilon(1e-9));
            CHECK(r[1] == doctest::Approx(0.0).epsilon(1e-9));
        }
    }

    SUBCASE("constant one-form on the flat chart is moment flat") {
        const ChartConnection conn = symconn::harmonic_deformation(
            MetricChart::flat(), symconn::parse_or_throw("1"),
            symconn::parse_or_throw("0"));
        const auto cj = conn.jets_at(0.3, 0.5, 0);
        CHECK(cj.b.value() == doctest::Approx(-3.0).epsilon(1e-14));
        CHECK(cj.d.value() == doctest::Approx(-1.0).epsilon(1e-14));
        for (const auto& pt : conn.sample_points(15, 69)) {
            CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-10);
        }
    }

    SUBCASE("a non-closed one-form is rejected") {
        CHECK_THROWS_WITH_AS(
            symconn::harmonic_deformation(MetricChart::flat(),
                                          symconn::parse_or_throw("y"),
                                          symconn::parse_or_throw("0")),
            doctest::Contains("not harmonic"), std::invalid_argument);
    }
}

TEST_CASE("cubic differential deformation checks holomorphy and the chart") {
    SUBCASE("constant differential on the flat chart") {
        const ChartConnection conn = symconn::cubic_diff_deformation(
            MetricChart::flat(), symconn::parse_or_throw("1"),
            symconn::parse_or_throw("0"));
        const auto cj = conn.jets_at(0.2, -0.6, 0);
        CHECK(cj.a.value() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(cj.b.value() == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(cj.c.value() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(cj.d.value() == doctest::Approx(1.0).epsilon(1e-14));
        for (const auto& pt : conn.sample_points(15, 70)) {
            CHECK(std::abs(symconn::moment_k(conn, pt[0], pt[1])) < 1e-10);
        }
    }

    SUBCASE("phi = z lowers to (x, -y, -x, y)") {
        const ChartConnection conn = symconn::cubic_diff_deformation(
            MetricChart::flat(), symconn::parse_or_throw("x"),
            symconn::parse_or_throw("y"));
        const double x0 = 0.8;
        const double y0 = -0.3;
        const auto cj = conn.jets_at(x0, y0, 0);
        CHECK(cj.a.value() == doctest::Approx(-y0).epsilon(1e-14));
        CHECK(cj.b.value() == doctest::Approx(-x0).epsilon(1e-14));
        CHECK(cj.c.value() == doctest::Approx(y0).epsilon(1e-14));
        CHECK(cj.d.value() == doctest::Approx(x0).epsilon(1e-14));
    }

    SUBCASE("hyperbolic chart carries the star-derivative curvature") {
        // For phi = 1 the lowered components are (1, 0, -1/y^4, 0), so
        // |Pi|^2_g = 4 / y^6 and the star identity
        // rho = star d(|Pi|^2_g - R_g) gives rho = (24 / y^5) dx; the
        // moment map follows as K = -60 / y^6.
        const ChartConnection conn = symconn::cubic_diff_deformation(
            MetricChart::hyperbolic_chart(), symconn::parse_or_throw("1"),
            symconn::parse_or_throw("0"));
        const auto cj = conn.jets_at(0.5, -0.8, 0);
        CHECK(cj.b.value() == doctest::Approx(-std::pow(-0.8, 3) - 1.0)
                                  .epsilon(1e-13));
        CHECK(cj.d.value() ==
              doctest::Approx(-1.0 / -0.8 + 1.0 / std::pow(-0.8, 4))
                  .epsilon(1e-13));
        for (const auto& pt : conn.sample_points(15, 71)) {
            const double y = pt[1];
            const SymCov r = symconn::rho(conn, pt[0], y);
            CHECK(r[0] ==
                  doctest::Approx(24.0 / std::pow(y, 5)).epsilon(1e-8));
            CHECK(r[1] == doctest::Approx(0.0).epsilon(1e-8));
            CHECK(symconn::moment_k(conn, pt[0], y) ==
                  doctest::Approx(-60.0 / std::pow(y, 6)).epsilon(1e-8));
        }
    }

    SUBCASE("Cauchy-Riemann violations are rejected") {
        CHECK_THROWS_WITH_AS(
            symconn::cubic_diff_deformation(MetricChart::flat(),
                                            symconn::parse_or_throw("x"),
                                            symconn::parse_or_throw("0")),
            doctest::Contains("not holomorphic"), std::invalid_argument);
    }

    SUBCASE("custom metrics are rejected") {
        const MetricChart custom(symconn::parse_or_throw("exp(x)"),
                                 symconn::expr_number(0.0),
                                 symconn::parse_or_throw("exp(-x)"),
                                 symconn::Domain::rectangle(-1, 1, -1, 1));
        CHECK_THROWS_AS(
            symconn::cubic_diff_deformation(custom, symconn::parse_or_throw("1"),
                                            symconn::parse_or_throw("0")),
            std::invalid_argument);
    }
}
