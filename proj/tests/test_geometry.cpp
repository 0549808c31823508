#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "support/oracles.hpp"
#include "symconn/connection.hpp"
#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/geometry.hpp"
#include "symconn/metricsurf.hpp"

using symconn::ChartConnection;
using symconn::Domain;
using symconn::GeodesicState;
using symconn::MetricChart;
using symconn::StopReason;
using symconn::StructureProbe;
using symconn::Trajectory;

namespace {

ChartConnection make_connection(const char* a, const char* b, const char* c,
                                const char* d,
                                Domain dom = Domain::all_plane()) {
    return ChartConnection(symconn::parse_or_throw(a), symconn::parse_or_throw(b),
                           symconn::parse_or_throw(c), symconn::parse_or_throw(d),
                           dom);
}

}  // namespace

TEST_CASE("flat geodesics are exact straight lines") {
    const ChartConnection flat = make_connection("0", "0", "0", "0");
    GeodesicState init;
    init.x = 0.25;
    init.y = -1.0;
    init.xdot = 0.7;
    init.ydot = -0.4;
    const Trajectory traj = symconn::geodesic_integrate(flat, init, 5.0, 50);
    REQUIRE(traj.samples.size() == 51);
    CHECK(traj.stop == StopReason::kCompleted);
    CHECK(traj.t_end == doctest::Approx(5.0).epsilon(1e-14));
    for (const auto& s : traj.samples) {
        CHECK(s.x == doctest::Approx(0.25 + 0.7 * s.t).epsilon(1e-12));
        CHECK(s.y == doctest::Approx(-1.0 - 0.4 * s.t).epsilon(1e-12));
        CHECK(s.xdot == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(s.ydot == doctest::Approx(-0.4).epsilon(1e-12));
    }
    CHECK(symconn::conserved_rho_along(traj) == 0.0);
}

TEST_CASE("the equator of the round-sphere chart is a geodesic") {
    const ChartConnection lc = symconn::levi_civita(MetricChart::sphere_chart());
    GeodesicState init;
    init.x = 0.0;
    init.y = 1.0;
    init.ydot = 0.8;
    const Trajectory traj = symconn::geodesic_integrate(lc, init, 4.0, 40);
    CHECK(traj.stop == StopReason::kCompleted);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(s.x) < 1e-10);
        CHECK(s.y == doctest::Approx(1.0 + 0.8 * s.t).epsilon(1e-9));
    }
}

TEST_CASE("affine reparametrization scales geodesic time") {
    const ChartConnection conn =
        symconn::bourgeois_cahen_family(0.4, -0.3, -1.0, -1.0);
    GeodesicState slow;
    slow.x = 0.1;
    slow.y = 0.2;
    slow.xdot = 0.3;
    slow.ydot = 0.5;
    GeodesicState fast = slow;
    fast.xdot *= 2.0;
    fast.ydot *= 2.0;
    const Trajectory a = symconn::geodesic_integrate(conn, slow, 2.0, 10);
    const Trajectory b = symconn::geodesic_integrate(conn, fast, 1.0, 10);
    REQUIRE(a.stop == StopReason::kCompleted);
    REQUIRE(b.stop == StopReason::kCompleted);
    const auto& end_a = a.samples.back();
    const auto& end_b = b.samples.back();
    CHECK(end_a.x == doctest::Approx(end_b.x).epsilon(1e-9));
    CHECK(end_a.y == doctest::Approx(end_b.y).epsilon(1e-9));
    CHECK(2.0 * end_a.xdot == doctest::Approx(end_b.xdot).epsilon(1e-9));
}

TEST_CASE("rho along geodesics of the preferred strip member is conserved") {
    const ChartConnection conn =
        symconn::bourgeois_cahen_family(0.4, -0.3, -1.0, -1.0);
    GeodesicState init;
    init.x = -0.2;
    init.y = 0.0;
    init.xdot = 0.4;
    init.ydot = 0.7;
    const Trajectory traj = symconn::geodesic_integrate(conn, init, 20.0, 200);
    CHECK(traj.stop == StopReason::kCompleted);
    // The drift tracks the integrator tolerances (rtol 1e-10 over t = 20),
    // not the identity itself.
    CHECK(symconn::conserved_rho_along(traj) < 5e-8);

    // The reduced first integral is constant along the same trajectory.
    const double e0 =
        symconn::reduced_energy_strip(0.4, -0.3, -1.0, -1.0, traj.samples[0]);
    double drift = 0.0;
    for (const auto& s : traj.samples) {
        drift = std::max(drift,
                         std::abs(symconn::reduced_energy_strip(0.4, -0.3, -1.0,
                                                                -1.0, s) -
                                  e0));
    }
    CHECK(drift < 1e-8);
}

TEST_CASE("reduced energy rejects nonnegative tau") {
    GeodesicState s;
    s.x = 0.1;
    s.ydot = 1.0;
    CHECK_THROWS_AS(symconn::reduced_energy_strip(0.0, 0.0, 1.0, 1.0, s),
                    std::invalid_argument);
}

TEST_CASE("integration stops at the domain boundary with a tagged reason") {
    const ChartConnection lc = symconn::levi_civita(MetricChart::sphere_chart());
    GeodesicState init;
    init.x = 0.5;
    init.y = 1.0;
    init.xdot = 0.6;
    const Trajectory traj = symconn::geodesic_integrate(lc, init, 10.0, 100);
    CHECK(traj.stop == StopReason::kDomainExit);
    CHECK(traj.t_end < 10.0);
    REQUIRE(!traj.samples.empty());
    CHECK(traj.samples.back().t <= traj.t_end + 1e-12);
}

TEST_CASE("velocity blow-up collapses the step instead of hanging") {
    // A = -1 turns the x equation into xddot = xdot^2, which blows up at
    // t = 1 from xdot(0) = 1.
    const ChartConnection conn = make_connection("-1", "0", "0", "0");
    GeodesicState init;
    init.xdot = 1.0;
    const Trajectory traj = symconn::geodesic_integrate(conn, init, 2.0, 50);
    CHECK(traj.stop == StopReason::kStepCollapse);
    CHECK(traj.t_end > 0.9);
    CHECK(traj.t_end < 1.05);
}

TEST_CASE("geodesic input validation") {
    const ChartConnection flat = make_connection("0", "0", "0", "0");
    GeodesicState bad;
    bad.x = std::nan("");
    CHECK_THROWS_AS(symconn::geodesic_integrate(flat, bad, 1.0, 10),
                    std::invalid_argument);

    GeodesicState ok;
    CHECK_THROWS_AS(symconn::geodesic_integrate(flat, ok, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(symconn::geodesic_integrate(flat, ok, 0.0, 10),
                    std::invalid_argument);

    const ChartConnection boxed =
        make_connection("0", "0", "0", "0", Domain::rectangle(0, 1, 0, 1));
    GeodesicState outside;
    outside.x = 2.0;
    CHECK_THROWS_AS(symconn::geodesic_integrate(boxed, outside, 1.0, 10),
                    std::invalid_argument);
}

TEST_CASE("structure probe of the preferred strip member") {
    const double a = 0.4;
    const ChartConnection conn =
        symconn::bourgeois_cahen_family(a, -0.3, -1.0, -1.0);
    const double pts[][2] = {{0.1, 0.5}, {-0.6, -2.0}, {0.9, 3.0}};
    for (const auto& p : pts) {
        const StructureProbe probe = symconn::structure_probe(conn, p[0], p[1]);
        const double s = p[0] + a;
        CHECK(probe.moment == doctest::Approx(s).epsilon(1e-10));
        CHECK(probe.tau == doctest::Approx(-1.0).epsilon(1e-9));

        // sigma = rho / (tau - K^2) collapses to dy on this family.
        CHECK(probe.sigma[0] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(probe.sigma[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(probe.dsigma_residual) < 1e-8);
        CHECK(std::abs(probe.dk_wedge_sigma_minus_omega) < 1e-8);

        // k = dT^2 + sigma^2 with dT = dK/(tau - K^2) = -dx/(1 + s^2).
        const double tx = -1.0 / (1.0 + s * s);
        CHECK(probe.k_metric[0] ==
              doctest::Approx(tx * tx).epsilon(1e-8).scale(1.0));
        CHECK(probe.k_metric[1] == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(probe.k_metric[2] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(probe.gauss_curvature_of_k) < 1e-5);

        // T = pi/2 - atan(s) for tau = -1.
        CHECK(probe.t_value ==
              doctest::Approx(0.5 * M_PI - std::atan(s)).epsilon(1e-9));
    }
}

TEST_CASE("structure probe rejects non-critical and degenerate inputs") {
    const ChartConnection generic =
        make_connection("0.3 * x * y", "0.2 - x ^ 2", "0.1 * y ^ 2", "0.4 * x");
    CHECK_THROWS_WITH_AS(symconn::structure_probe(generic, 0.3, 0.4),
                         doctest::Contains("not critical"),
                         std::invalid_argument);

    const ChartConnection degenerate = symconn::quartic_family(0.0, 0.0, 0.1, 0.05);
    CHECK_THROWS_WITH_AS(symconn::structure_probe(degenerate, 0.0, 0.5),
                         doctest::Contains("degenerate"), std::domain_error);
}

TEST_CASE("structure_t_value differentiates to 1/(tau - K^2) on every branch") {
    struct Probe {
        double tau;
        double k;
    };
    const Probe probes[] = {
        {-1.0, 0.3},  {-1.0, -2.0}, {0.0, 0.5},  {0.0, -1.5},
        {2.0, 0.4},   {2.0, 1.0},   {2.0, 2.0},  {2.0, -3.0},
    };
    for (const auto& pr : probes) {
        const double h = 1e-5;
        const double fd = symconn::testing::fd_first(
            [&](double k) { return symconn::structure_t_value(pr.tau, k); },
            pr.k, h);
        const double want = 1.0 / (pr.tau - pr.k * pr.k);
        CHECK(fd == doctest::Approx(want).epsilon(1e-7));
    }
}

TEST_CASE("trajectory_csv prints a header and one row per sample") {
    const ChartConnection flat = make_connection("0", "0", "0", "0");
    GeodesicState init;
    init.xdot = 1.0;
    const Trajectory traj = symconn::geodesic_integrate(flat, init, 1.0, 4);
    const std::string csv = symconn::trajectory_csv(traj);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,x,y,xdot,ydot,rho_gammadot");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 5);

    // Re-parse the last row and compare against the stored sample.
    const std::size_t last_break = csv.find_last_not_of("\n");
    const std::size_t start = csv.rfind('\n', last_break);
    double t, x, y, xd, yd, rg;
    REQUIRE(std::sscanf(csv.c_str() + start + 1, "%lf,%lf,%lf,%lf,%lf,%lf", &t,
                        &x, &y, &xd, &yd, &rg) == 6);
    CHECK(t == doctest::Approx(traj.samples.back().t).epsilon(1e-15));
    CHECK(x == doctest::Approx(traj.samples.back().x).epsilon(1e-15));
}
