#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "symconn/connection.hpp"
#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/operators.hpp"
#include "symconn/quadrature.hpp"

using symconn::ChartConnection;
using symconn::Region;
using symconn::Rule;
using symconn::SymCovField;

namespace {

const double kPi = std::acos(-1.0);

}  // namespace

TEST_CASE("integrate handles constants, polynomials, and trig exactly") {
    const Region box = Region::rectangle(-1.0, 2.0, 0.0, 0.5);

    CHECK(symconn::integrate(box, Rule::gauss_legendre(8),
                             [](double, double) { return 1.0; }) ==
          doctest::Approx(1.5).epsilon(1e-14));

    // Gauss-Legendre with n nodes is exact through degree 2n - 1.
    CHECK(symconn::integrate(box, Rule::gauss_legendre(8),
                             [](double x, double y) {
                                 return x * x * x * y + 0.5 * y * y;
                             }) ==
          doctest::Approx(15.0 / 32.0 + 1.0 / 16.0).epsilon(1e-13));

    // The closed trapezoid rule is spectrally exact on trigonometric
    // polynomials over a full period: integral of sin^2 y = pi.
    const Region period = Region::rectangle(0.0, 1.0, 0.0, 2.0 * kPi);
    CHECK(symconn::integrate(period,
                             Rule::mixed(Rule::Kind::kGaussLegendre, 4,
                                         Rule::Kind::kTrapezoid, 64),
                             [](double, double y) {
                                 const double s = std::sin(y);
                                 return s * s;
                             }) ==
          doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("annulus region trims the x extent") {
    const Region trimmed = Region::annulus_x(-1.0, 1.0, 0.0, 1.0, 0.25, 0.5);
    CHECK(symconn::integrate(trimmed, Rule::gauss_legendre(4),
                             [](double, double) { return 1.0; }) ==
          doctest::Approx(1.25).epsilon(1e-13));
}

TEST_CASE("x^2 over the sphere rectangle matches the smooth closed form") {
    // integral of x^2 over [-1,1] x [0,2pi) = (2/3) * 2pi = 4pi/3.
    const Region sphere = Region::periodic_rectangle(-1.0, 1.0, 0.0, 2.0 * kPi);
    CHECK(symconn::integrate(sphere, Rule::default_periodic(),
                             [](double x, double) { return x * x; }) ==
          doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("energy integrals reproduce closed forms") {
    SUBCASE("flat connection has zero energy") {
        const ChartConnection flat(
            symconn::parse_or_throw("0"), symconn::parse_or_throw("0"),
            symconn::parse_or_throw("0"), symconn::parse_or_throw("0"),
            symconn::Domain::all_plane());
        CHECK(symconn::energy(flat, Region::rectangle(-1, 1, -1, 1),
                              Rule::gauss_legendre(16)) ==
              doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("strip family over the unit box integrates K^2 = x^2") {
        const ChartConnection conn =
            symconn::bourgeois_cahen_family(0.0, 0.0, -1.0, -1.0);
        CHECK(symconn::energy(conn, Region::rectangle(-1, 1, -1, 1),
                              Rule::gauss_legendre(16)) ==
              doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    }

    SUBCASE("sphere family energy is 3 pi t^2") {
        const Region region =
            Region::periodic_rectangle(-1.0, 1.0, 0.0, 2.0 * kPi);
        for (double t : {0.5, 1.0}) {
            const ChartConnection conn = symconn::sphere_family(t);
            CHECK(symconn::energy(conn, region, Rule::default_periodic()) ==
                  doctest::Approx(3.0 * kPi * t * t).epsilon(1e-9));
        }
    }

    SUBCASE("doubling Gauss nodes collapses a non-polynomial error") {
        // The sphere energy integrand is polynomial in x and already exact
        // at low order, so probe convergence on an exponential instead.
        const Region region = Region::rectangle(0.0, 1.0, 0.0, 1.0);
        const auto f = [](double x, double y) { return std::exp(x + y); };
        const double exact = (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0);
        const double coarse =
            std::abs(symconn::integrate(region, Rule::gauss_legendre(2), f) -
                     exact);
        const double fine =
            std::abs(symconn::integrate(region, Rule::gauss_legendre(4), f) -
                     exact);
        CHECK(coarse > 1e-6);
        CHECK(fine < coarse / 100.0);
    }
}

TEST_CASE("boundary flux of K rho converges to the sphere defect") {
    const ChartConnection conn = symconn::sphere_family(1.0);
    // Richardson in the margin: flux(eps) = 6 pi - 24 pi eps + O(eps^2),
    // so 2 flux(eps) - flux(2 eps) cancels the linear term.
    const double f1 = symconn::boundary_flux_k_rho(conn, 2e-3, 2e-3, 512);
    const double f2 = symconn::boundary_flux_k_rho(conn, 1e-3, 1e-3, 512);
    const double extrapolated = 2.0 * f2 - f1;
    CHECK(extrapolated == doctest::Approx(6.0 * kPi).epsilon(1e-4));
    // The raw margin values drop linearly toward the limit.
    CHECK(f2 > f1);
    CHECK(f1 < 6.0 * kPi);
}

TEST_CASE("pairing integral matches a hand-computed product") {
    // <dx, dy> pairs to dx_x dy_y - dx_y dy_x = 1, so the integral is the
    // region area.
    const SymCovField dx(1, {symconn::parse_or_throw("1"),
                             symconn::parse_or_throw("0")});
    const SymCovField dy(1, {symconn::parse_or_throw("0"),
                             symconn::parse_or_throw("1")});
    const Region box = Region::rectangle(0.0, 2.0, 0.0, 3.0);
    CHECK(symconn::pairing(dx, dy, box, Rule::gauss_legendre(4)) ==
          doctest::Approx(6.0).epsilon(1e-13));
    CHECK(symconn::pairing(dy, dx, box, Rule::gauss_legendre(4)) ==
          doctest::Approx(-6.0).epsilon(1e-13));

    const SymCovField quad(3, {symconn::parse_or_throw("x"),
                               symconn::parse_or_throw("0"),
                               symconn::parse_or_throw("0"),
                               symconn::parse_or_throw("y")});
    const SymCovField mixed(2, {symconn::parse_or_throw("1"),
                                symconn::parse_or_throw("0"),
                                symconn::parse_or_throw("0")});
    CHECK_THROWS_AS(symconn::pairing(quad, mixed, box, Rule::gauss_legendre(4)),
                    std::invalid_argument);
}

TEST_CASE("invalid rules and non-finite samples are rejected") {
    CHECK_THROWS_AS(Rule::gauss_legendre(1), std::invalid_argument);
    CHECK_THROWS_AS(Rule::trapezoid(5000), std::invalid_argument);

    const Region box = Region::rectangle(0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_WITH_AS(
        symconn::integrate(box, Rule::gauss_legendre(4),
                           [](double x, double) { return std::log(x - 2.0); }),
        doctest::Contains("non-finite sample"), std::runtime_error);
}
