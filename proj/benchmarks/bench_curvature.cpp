// Microbenchmarks for the hot paths: jet arithmetic, the pointwise
// curvature report, the two moment-map routes, geodesic integration, and
// the energy quadrature.

#include <benchmark/benchmark.h>

#include <cmath>

#include "symconn/connection.hpp"
#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/geometry.hpp"
#include "symconn/jet.hpp"
#include "symconn/operators.hpp"
#include "symconn/quadrature.hpp"

namespace {

symconn::ChartConnection trig_connection() {
    return symconn::ChartConnection(
        symconn::parse_or_throw("0.2 * sin(x) * cos(y)"),
        symconn::parse_or_throw("0.15 * cos(x)"),
        symconn::parse_or_throw("0.25 * sin(y)"),
        symconn::parse_or_throw("0.1 * sin(x) * sin(y)"),
        symconn::Domain::all_plane());
}

void BM_JetMul(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    symconn::Jet2 a = symconn::jet_exp(
        symconn::Jet2::variable_x(order, 0.3) * 0.7 +
        symconn::Jet2::variable_y(order, -0.2) * 0.4);
    symconn::Jet2 b = symconn::jet_sin(
        symconn::Jet2::variable_x(order, 0.3) +
        symconn::Jet2::variable_y(order, -0.2) * 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(symconn::jet_mul(a, b));
    }
}
BENCHMARK(BM_JetMul)->Arg(4)->Arg(8)->Arg(12);

void BM_CurvatureReport(benchmark::State& state) {
    const symconn::ChartConnection conn = trig_connection();
    for (auto _ : state) {
        benchmark::DoNotOptimize(symconn::curvature_report(conn, 0.4, -0.7));
    }
}
BENCHMARK(BM_CurvatureReport);

void BM_MomentClosedForm(benchmark::State& state) {
    const symconn::ChartConnection conn = trig_connection();
    for (auto _ : state) {
        benchmark::DoNotOptimize(symconn::moment_k(conn, 0.4, -0.7));
    }
}
BENCHMARK(BM_MomentClosedForm);

void BM_MomentOperatorPipeline(benchmark::State& state) {
    const symconn::ChartConnection conn = trig_connection();
    for (auto _ : state) {
        const symconn::ConnJets cj = conn.jets_at(0.4, -0.7, 4);
        const auto rho = symconn::rho_jets(cj);
        const symconn::TensorJets rho_t{1, {rho[0], rho[1]}};
        const symconn::TensorJets div = symconn::delta_jets(cj, rho_t);
        benchmark::DoNotOptimize(-0.5 * div.comps[0].value());
    }
}
BENCHMARK(BM_MomentOperatorPipeline);

void BM_GeodesicIntegrate(benchmark::State& state) {
    const symconn::ChartConnection conn =
        symconn::bourgeois_cahen_family(0.4, -0.3, -1.0, -1.0);
    symconn::GeodesicState init;
    init.x = 0.1;
    init.y = 0.2;
    init.xdot = 0.5;
    init.ydot = -0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            symconn::geodesic_integrate(conn, init, 1.0, 10));
    }
}
BENCHMARK(BM_GeodesicIntegrate);

void BM_EnergySphere(benchmark::State& state) {
    const symconn::ChartConnection conn = symconn::sphere_family(1.0);
    const symconn::Region region = symconn::Region::periodic_rectangle(
        -1.0, 1.0, 0.0, 2.0 * std::acos(-1.0));
    const symconn::Rule rule = symconn::Rule::mixed(
        symconn::Rule::Kind::kGaussLegendre, 32,
        symconn::Rule::Kind::kTrapezoid, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(symconn::energy(conn, region, rule));
    }
}
BENCHMARK(BM_EnergySphere);

}  // namespace

BENCHMARK_MAIN();
