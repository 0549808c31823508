#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "symconn/connection.hpp"
#include "symconn/expr.hpp"
#include "symconn/metricsurf.hpp"
#include "symconn/operators.hpp"

using symconn::ChartConnection;
using symconn::Domain;
using symconn::ExprAst;
using symconn::Mat2;
using symconn::MetricChart;
using symconn::OneFormVal;
using symconn::SymCov;
using symconn::SymCovField;

namespace {

// Unit-determinant perturbed metric: g11 = e^phi, g12 = s e^phi,
// g22 = e^{-phi} + s^2 e^phi keeps g11 g22 - g12^2 = 1 identically.
MetricChart bumpy_metric() {
    return MetricChart(
        symconn::parse_or_throw("exp(0.3 * sin(x) * cos(y))"),
        symconn::parse_or_throw("0.2 * exp(0.3 * sin(x) * cos(y))"),
        symconn::parse_or_throw(
            "exp(-(0.3 * sin(x) * cos(y))) + 0.04 * exp(0.3 * sin(x) * cos(y))"),
        Domain::all_plane());
}

}  // namespace

TEST_CASE("builtin charts have the advertised scalar curvature") {
    const MetricChart flat = MetricChart::flat();
    const MetricChart sphere = MetricChart::sphere_chart();
    const MetricChart hyper = MetricChart::hyperbolic_chart();

    CHECK(symconn::scalar_curvature(flat, 0.4, -2.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    for (double x : {0.0, 0.5, -0.8}) {
        CHECK(symconn::scalar_curvature(sphere, x, 1.0) ==
              doctest::Approx(2.0).epsilon(1e-10));
    }
    for (double y : {-0.3, -1.5, -3.0}) {
        CHECK(symconn::scalar_curvature(hyper, 0.7, y) ==
              doctest::Approx(-2.0).epsilon(1e-10));
    }
}

TEST_CASE("levi_civita reproduces hand-computed Christoffel fields") {
    SUBCASE("sphere chart: A = x/(1-x^2), B = 0, C = x(1-x^2), D = 0") {
        const ChartConnection lc = symconn::levi_civita(MetricChart::sphere_chart());
        for (double x : {0.0, 0.3, -0.6}) {
            const auto cj = lc.jets_at(x, 0.5, 1);
            CHECK(cj.a.value() ==
                  doctest::Approx(x / (1.0 - x * x)).epsilon(1e-12));
            CHECK(cj.b.value() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(cj.c.value() ==
                  doctest::Approx(x * (1.0 - x * x)).epsilon(1e-12));
            CHECK(cj.d.value() == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("hyperbolic chart: A = 0, B = -y^3, C = 0, D = -1/y") {
        const ChartConnection lc =
            symconn::levi_civita(MetricChart::hyperbolic_chart());
        for (double y : {-0.4, -1.0, -2.5}) {
            const auto cj = lc.jets_at(0.3, y, 1);
            CHECK(cj.a.value() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(cj.b.value() == doctest::Approx(-y * y * y).epsilon(1e-12));
            CHECK(cj.c.value() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(cj.d.value() == doctest::Approx(-1.0 / y).epsilon(1e-12));
        }
    }

    SUBCASE("flat chart gives the zero connection") {
        const ChartConnection lc = symconn::levi_civita(MetricChart::flat());
        const auto cj = lc.jets_at(1.2, -0.7, 2);
        CHECK(cj.a.value() == 0.0);
        CHECK(cj.b.value() == 0.0);
        CHECK(cj.c.value() == 0.0);
        CHECK(cj.d.value() == 0.0);
    }
}

TEST_CASE("levi_civita rejects metrics that do not preserve the volume") {
    const MetricChart stretched(symconn::parse_or_throw("1 + 0.1 * x ^ 2"),
                                symconn::expr_number(0.0),
                                symconn::expr_number(1.0),
                                Domain::rectangle(-1.0, 1.0, -1.0, 1.0));
    CHECK_THROWS_WITH_AS(symconn::levi_civita(stretched),
                         doctest::Contains("volume not parallel"),
                         std::invalid_argument);
}

TEST_CASE("metric evaluation guards positivity and domain") {
    const MetricChart hyper = MetricChart::hyperbolic_chart();
    CHECK_THROWS_AS(hyper.jets_at(0.0, 1.0, 1), std::domain_error);

    const MetricChart indefinite(symconn::parse_or_throw("x"),
                                 symconn::expr_number(0.0),
                                 symconn::parse_or_throw("1"),
                                 Domain::rectangle(-2.0, 2.0, -1.0, 1.0));
    CHECK_THROWS_AS(indefinite.jets_at(-1.0, 0.0, 1), std::domain_error);
}

TEST_CASE("laplacian reduces to the flat Laplace operator on the flat chart") {
    const MetricChart flat = MetricChart::flat();
    const ExprAst f = symconn::parse_or_throw("x ^ 3 * y + sin(y)");
    for (double x : {0.2, -0.9}) {
        const double y = 0.5 * x + 0.1;
        const double want = 6.0 * x * y - std::sin(y);
        CHECK(symconn::laplacian(flat, f, x, y) ==
              doctest::Approx(want).epsilon(1e-12));
    }

    // On the sphere chart the y-harmonics pick up the inverse conformal
    // factor: Lap (sin y) = -sin(y) / (1 - x^2).
    const MetricChart sphere = MetricChart::sphere_chart();
    const ExprAst g = symconn::parse_or_throw("sin(y)");
    for (double x : {0.0, 0.4}) {
        CHECK(symconn::laplacian(sphere, g, x, 1.2) ==
              doctest::Approx(-std::sin(1.2) / (1.0 - x * x)).epsilon(1e-11));
    }
}

TEST_CASE("moment map of a Levi-Civita connection is half the curvature laplacian") {
    const MetricChart bumpy = bumpy_metric();
    const double pts[][2] = {{0.3, 0.8}, {-1.1, 0.2}, {2.0, -0.6}, {0.0, 0.0}};
    for (const auto& p : pts) {
        CHECK(symconn::kahler_moment_residual(bumpy, p[0], p[1]) < 1e-8);
    }
}

TEST_CASE("complex structure squares to minus one and is g-orthogonal") {
    const MetricChart charts[] = {MetricChart::flat(), bumpy_metric(),
                                  MetricChart::sphere_chart()};
    const double pts[][2] = {{0.2, 0.7}, {-0.5, 1.3}};
    for (const auto& m : charts) {
        for (const auto& p : pts) {
            const Mat2 j = symconn::complex_structure(m, p[0], p[1]);
            // J^2 = -I with entries J_i^j.
            CHECK(j.xx * j.xx + j.xy * j.yx ==
                  doctest::Approx(-1.0).epsilon(1e-12));
            CHECK(j.xx * j.xy + j.xy * j.yy ==
                  doctest::Approx(0.0).epsilon(1e-12));
            CHECK(j.yx * j.xx + j.yy * j.yx ==
                  doctest::Approx(0.0).epsilon(1e-12));
            CHECK(j.yx * j.xy + j.yy * j.yy ==
                  doctest::Approx(-1.0).epsilon(1e-12));

            // g(JX, JY) = g(X, Y) on the coordinate frame.
            const auto g = m.jets_at(p[0], p[1], 0);
            const double g11 = g[0].value();
            const double g12 = g[1].value();
            const double g22 = g[2].value();
            const double jxjx = g11 * j.xx * j.xx + 2.0 * g12 * j.xx * j.xy +
                                g22 * j.xy * j.xy;
            const double jxjy = g11 * j.xx * j.yx +
                                g12 * (j.xx * j.yy + j.xy * j.yx) +
                                g22 * j.xy * j.yy;
            CHECK(jxjx == doctest::Approx(g11).epsilon(1e-12));
            CHECK(jxjy == doctest::Approx(g12).epsilon(1e-12));
        }
    }
}

TEST_CASE("hodge star on one-forms: flat rotation and double application") {
    const MetricChart flat = MetricChart::flat();
    const OneFormVal dx(1, {1.0, 0.0});
    const OneFormVal dy(1, {0.0, 1.0});
    const OneFormVal sdx = symconn::hodge_star_oneform(flat, dx, 0.3, 0.4);
    CHECK(sdx[0] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(sdx[1] == doctest::Approx(1.0).epsilon(1e-13));
    const OneFormVal sdy = symconn::hodge_star_oneform(flat, dy, 0.3, 0.4);
    CHECK(sdy[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(sdy[1] == doctest::Approx(0.0).epsilon(1e-13));

    const MetricChart bumpy = bumpy_metric();
    const OneFormVal alpha(1, {0.7, -1.2});
    const OneFormVal twice = symconn::hodge_star_oneform(
        bumpy, symconn::hodge_star_oneform(bumpy, alpha, 0.5, -0.3), 0.5, -0.3);
    CHECK(twice[0] == doctest::Approx(-alpha[0]).epsilon(1e-12));
    CHECK(twice[1] == doctest::Approx(-alpha[1]).epsilon(1e-12));
}

TEST_CASE("star-derivative calibration: rho of Levi-Civita is -star dR") {
    const MetricChart bumpy = bumpy_metric();
    const ChartConnection lc = symconn::levi_civita(bumpy);
    const double pts[][2] = {{0.4, 0.9}, {-0.8, 0.3}};
    for (const auto& p : pts) {
        const double h = 1e-4;
        const OneFormVal dr(
            1, {symconn::testing::fd_partial(
                    [&](double x, double y) {
                        return symconn::scalar_curvature(bumpy, x, y);
                    },
                    p[0], p[1], 1, 0, h),
                symconn::testing::fd_partial(
                    [&](double x, double y) {
                        return symconn::scalar_curvature(bumpy, x, y);
                    },
                    p[0], p[1], 0, 1, h)});
        const OneFormVal want =
            symconn::hodge_star_oneform(bumpy, dr, p[0], p[1]);
        const SymCov r = symconn::rho(lc, p[0], p[1]);
        CHECK(r[0] == doctest::Approx(-want[0]).epsilon(1e-7).scale(1.0));
        CHECK(r[1] == doctest::Approx(-want[1]).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("cubic norm has the advertised flat closed form") {
    const SymCovField pi(
        3, {symconn::parse_or_throw("1 + x"), symconn::parse_or_throw("0.5 * y"),
            symconn::parse_or_throw("x * y"), symconn::parse_or_throw("2")});
    const double x0 = 0.6;
    const double y0 = -0.9;
    const SymCov v = pi.value_at(x0, y0);
    const double want =
        v[0] * v[0] + 3.0 * v[1] * v[1] + 3.0 * v[2] * v[2] + v[3] * v[3];
    CHECK(symconn::cubic_norm(MetricChart::flat(), pi, x0, y0) ==
          doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("holomorphicity residual separates holomorphic from generic cubics") {
    const MetricChart flat = MetricChart::flat();
    // Re(z^2 dz^3) lowers to (x^2 - y^2, -2xy, -(x^2 - y^2), 2xy).
    const SymCovField holo(3, {symconn::parse_or_throw("x ^ 2 - y ^ 2"),
                               symconn::parse_or_throw("-2 * x * y"),
                               symconn::parse_or_throw("-(x ^ 2 - y ^ 2)"),
                               symconn::parse_or_throw("2 * x * y")});
    const SymCovField generic(3, {symconn::parse_or_throw("x ^ 2"),
                                  symconn::parse_or_throw("0"),
                                  symconn::parse_or_throw("0"),
                                  symconn::parse_or_throw("y")});
    const double pts[][2] = {{0.5, 0.7}, {-0.9, 0.4}};
    for (const auto& p : pts) {
        CHECK(symconn::holomorphicity_residual(flat, holo, p[0], p[1]) < 1e-10);
        CHECK(symconn::holomorphicity_residual(flat, generic, p[0], p[1]) >
              1e-2);
    }
}

TEST_CASE("hessdet and u_of_f match hand expansions") {
    const ExprAst f = symconn::parse_or_throw("x * y + x ^ 3");
    const double x0 = 0.8;
    const double y0 = -0.5;
    // f_x = y + 3x^2, f_y = x, f_xx = 6x, f_xy = 1, f_yy = 0.
    const double fx = y0 + 3.0 * x0 * x0;
    const double fy = x0;
    CHECK(symconn::hessdet(f, x0, y0) == doctest::Approx(-1.0).epsilon(1e-14));
    const double want_u = -2.0 * fx * fy + fy * fy * 6.0 * x0;
    CHECK(symconn::u_of_f(f, x0, y0) == doctest::Approx(want_u).epsilon(1e-13));

    // For graph functions f = x y + u(x) this collapses to
    // U(f) = x^2 u'' - 2 x (y + u').
    const double via_u = x0 * x0 * 6.0 * x0 - 2.0 * x0 * (y0 + 3.0 * x0 * x0);
    CHECK(symconn::u_of_f(f, x0, y0) == doctest::Approx(via_u).epsilon(1e-13));
}
