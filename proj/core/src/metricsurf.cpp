#include "symconn/metricsurf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace symconn {

namespace {

// Sign of the Hodge star relative to J, fixed once by the calibration
// check rho(D) = -star d R_g on a non-constant-curvature metric (the
// metric verification suite asserts it and rejects the flipped sign).
constexpr double kStarSign = -1.0;

constexpr double kConsistencyTol = 1e-10;

std::string point_text(double x, double y) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", x, y);
    return buf;
}

Jet2 tr(const Jet2& j, int order) {
    return j.order() == order ? j : jet_truncate(j, order);
}

Jet2 det3(const std::array<std::array<Jet2, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Brioschi formula for the Gauss curvature of E dx^2 + 2F dx dy + G dy^2
// on jets; the result loses two orders.
Jet2 gauss_jet(const std::array<Jet2, 3>& g) {
    const int ord = g[0].order() - 2;
    if (ord < 0) {
        throw std::invalid_argument("Gauss curvature needs metric jet order >= 2");
    }
    const Jet2 e = tr(g[0], ord);
    const Jet2 f = tr(g[1], ord);
    const Jet2 gg = tr(g[2], ord);
    const Jet2 ex = tr(jet_shift(g[0], 1, 0), ord);
    const Jet2 ey = tr(jet_shift(g[0], 0, 1), ord);
    const Jet2 eyy = tr(jet_shift(g[0], 0, 2), ord);
    const Jet2 fx = tr(jet_shift(g[1], 1, 0), ord);
    const Jet2 fy = tr(jet_shift(g[1], 0, 1), ord);
    const Jet2 fxy = tr(jet_shift(g[1], 1, 1), ord);
    const Jet2 gx = tr(jet_shift(g[2], 1, 0), ord);
    const Jet2 gy = tr(jet_shift(g[2], 0, 1), ord);
    const Jet2 gxx = tr(jet_shift(g[2], 2, 0), ord);
    const std::array<std::array<Jet2, 3>, 3> m1{
        {{-0.5 * eyy + fxy - 0.5 * gxx, 0.5 * ex, fx - 0.5 * ey},
         {fy - 0.5 * gx, e, f},
         {0.5 * gy, f, gg}}};
    const std::array<std::array<Jet2, 3>, 3> m2{{{Jet2::constant(ord, 0.0),
                                                  0.5 * ey, 0.5 * gx},
                                                 {0.5 * ey, e, f},
                                                 {0.5 * gx, f, gg}}};
    const Jet2 den = e * gg - f * f;
    return (det3(m1) - det3(m2)) / (den * den);
}

// Laplace-Beltrami value of a scalar jet r (order >= 2) against metric
// jets (order >= 1), using the unit-determinant inverse (g22, -g12, g11):
//   Lap r = d_x(G r_x - F r_y) + d_y(-F r_x + E r_y).
double laplacian_value(const std::array<Jet2, 3>& g, const Jet2& r) {
    const double e = g[0].value();
    const double f = g[1].value();
    const double gg = g[2].value();
    const double ey = g[0].partial(0, 1);
    const double fx = g[1].partial(1, 0);
    const double fy = g[1].partial(0, 1);
    const double gx = g[2].partial(1, 0);
    return gx * r.partial(1, 0) + gg * r.partial(2, 0) - fx * r.partial(0, 1) -
           2.0 * f * r.partial(1, 1) - fy * r.partial(1, 0) +
           ey * r.partial(0, 1) + e * r.partial(0, 2);
}

}  // namespace

MetricChart::MetricChart(ExprAst g11, ExprAst g12, ExprAst g22, Domain domain)
    : MetricChart(std::move(g11), std::move(g12), std::move(g22), domain,
                  Builtin::kNone) {}

MetricChart::MetricChart(ExprAst g11, ExprAst g12, ExprAst g22, Domain domain,
                         Builtin builtin)
    : g11_(std::move(g11)), g12_(std::move(g12)), g22_(std::move(g22)),
      dom_(domain), builtin_(builtin) {
    if (!g11_.root || !g12_.root || !g22_.root) {
        throw std::invalid_argument("metric component expression is empty");
    }
    if (!(dom_.x_min < dom_.x_max) || !(dom_.y_min < dom_.y_max)) {
        throw std::invalid_argument("metric domain has empty interior");
    }
}

MetricChart MetricChart::flat() {
    return MetricChart(expr_number(1.0), expr_number(0.0), expr_number(1.0),
                       Domain::all_plane(), Builtin::kFlat);
}

MetricChart MetricChart::sphere_chart() {
    Domain dom = Domain::rectangle(-1.0, 1.0, 0.0, 2.0 * std::acos(-1.0));
    dom.periodic_y = true;
    dom.exclude_abs_x = 1.0 - 1e-6;
    return MetricChart(parse_or_throw("1/(1 - x^2)"), expr_number(0.0),
                       parse_or_throw("1 - x^2"), dom, Builtin::kSphere);
}

MetricChart MetricChart::hyperbolic_chart() {
    return MetricChart(parse_or_throw("y^2"), expr_number(0.0),
                       parse_or_throw("1/y^2"), Domain::rectangle(-4.0, 4.0, -4.0, -0.05),
                       Builtin::kHyperbolic);
}

std::array<Jet2, 3> MetricChart::jets_at(double x, double y, int order) const {
    if (!dom_.contains(x, y)) {
        throw std::domain_error("point " + point_text(x, y) +
                                " outside metric domain");
    }
    std::array<Jet2, 3> g{eval_jet(g11_, x, y, order), eval_jet(g12_, x, y, order),
                          eval_jet(g22_, x, y, order)};
    const double det = g[0].value() * g[2].value() - g[1].value() * g[1].value();
    if (!(g[0].value() > 0.0) || !(det > 0.0)) {
        throw std::domain_error("metric not positive definite at " +
                                point_text(x, y));
    }
    return g;
}

std::vector<std::array<double, 2>> MetricChart::sample_points(
        int count, unsigned seed) const {
    if (count < 0) {
        throw std::invalid_argument("negative sample count");
    }
    const double x0 = std::isfinite(dom_.x_min) ? dom_.x_min : -1.0;
    const double x1 = std::isfinite(dom_.x_max) ? dom_.x_max : 1.0;
    const double y0 = std::isfinite(dom_.y_min) ? dom_.y_min : -1.0;
    const double y1 = std::isfinite(dom_.y_max) ? dom_.y_max : 1.0;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1);
    std::uniform_real_distribution<double> uy(y0, y1);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    int guard = 0;
    while (static_cast<int>(pts.size()) < count) {
        const double x = ux(rng);
        const double y = uy(rng);
        if (dom_.contains(x, y)) {
            pts.push_back({x, y});
        } else if (++guard > 1000 * (count + 1)) {
            throw std::runtime_error("domain sampling rejection limit reached");
        }
    }
    return pts;
}

ChartConnection levi_civita(const MetricChart& m) {
    const ExprAst& e = m.g11();
    const ExprAst& f = m.g12();
    const ExprAst& g = m.g22();
    const ExprAst ex = differentiate(e, 'x');
    const ExprAst ey = differentiate(e, 'y');
    const ExprAst fx = differentiate(f, 'x');
    const ExprAst fy = differentiate(f, 'y');
    const ExprAst gx = differentiate(g, 'x');
    const ExprAst gy = differentiate(g, 'y');
    const ExprAst half = expr_number(0.5);
    const ExprAst two = expr_number(2.0);
    // With det g = 1 the inverse is (g22, -g12, g11); the Christoffel
    // symbols reduce to the four chart fields plus the two consistency
    // combinations checked below.
    const ExprAst wx = expr_sub(expr_mul(two, fx), ey);  // 2 F_x - E_y
    const ExprAst wy = expr_sub(expr_mul(two, fy), gx);  // 2 F_y - G_x
    const ExprAst a = expr_mul(half, expr_sub(expr_mul(g, ex), expr_mul(f, wx)));
    const ExprAst b = expr_mul(half, expr_sub(expr_mul(e, wx), expr_mul(f, ex)));
    const ExprAst c = expr_mul(half, expr_sub(expr_mul(g, wy), expr_mul(f, gy)));
    const ExprAst d = expr_mul(half, expr_sub(expr_mul(e, gy), expr_mul(f, wy)));
    const ExprAst gamma_x_xy =
        expr_mul(half, expr_sub(expr_mul(g, ey), expr_mul(f, gx)));
    const ExprAst gamma_y_xy =
        expr_mul(half, expr_sub(expr_mul(e, gx), expr_mul(f, ey)));
    ChartConnection conn(a, b, c, d, m.domain());
    for (const auto& pt : m.sample_points(25, 12345u)) {
        const double x = pt[0];
        const double y = pt[1];
        const auto gj = m.jets_at(x, y, 0);
        const double det =
            gj[0].value() * gj[2].value() - gj[1].value() * gj[1].value();
        if (std::abs(det - 1.0) > kConsistencyTol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "volume not parallel: metric determinant deviates "
                          "from one by %.3g at %s",
                          det - 1.0, point_text(x, y).c_str());
            throw std::invalid_argument(buf);
        }
        const double rx = eval_jet(gamma_x_xy, x, y, 0).value() +
                          eval_jet(d, x, y, 0).value();
        const double ry = eval_jet(gamma_y_xy, x, y, 0).value() +
                          eval_jet(a, x, y, 0).value();
        const double res = std::max(std::abs(rx), std::abs(ry));
        if (res > kConsistencyTol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "volume not parallel: Christoffel consistency "
                          "residual %.3g at %s",
                          res, point_text(x, y).c_str());
            throw std::invalid_argument(buf);
        }
    }
    return conn;
}

double scalar_curvature(const MetricChart& m, double x, double y) {
    return 2.0 * gauss_jet(m.jets_at(x, y, 2)).value();
}

double laplacian(const MetricChart& m, const ExprAst& f, double x, double y) {
    return laplacian_value(m.jets_at(x, y, 1), eval_jet(f, x, y, 2));
}

double kahler_moment_residual(const MetricChart& m, double x, double y) {
    const ChartConnection conn = levi_civita(m);
    const double lhs = 2.0 * moment_k(conn, x, y);
    const auto g = m.jets_at(x, y, 6);
    const Jet2 r = 2.0 * gauss_jet(g);
    return std::abs(lhs - laplacian_value(g, r));
}

Mat2 complex_structure(const MetricChart& m, double x, double y) {
    const auto g = m.jets_at(x, y, 0);
    // g_ij = -J_i^p Om_pj solves to J_i^x = -g_iy, J_i^y = g_ix.
    return Mat2{-g[1].value(), g[0].value(), -g[2].value(), g[1].value()};
}

OneFormVal hodge_star_oneform(const MetricChart& m, const OneFormVal& alpha,
                              double x, double y) {
    if (alpha.degree() != 1) {
        throw std::invalid_argument("Hodge star operand must be a one-form");
    }
    const Mat2 j = complex_structure(m, x, y);
    return SymCov(1, {kStarSign * (j.xx * alpha[0] + j.xy * alpha[1]),
                      kStarSign * (j.yx * alpha[0] + j.yy * alpha[1])});
}

double cubic_norm(const MetricChart& m, const SymCovField& pi, double x, double y) {
    if (pi.degree() != 3) {
        throw std::invalid_argument("cubic norm operand must have degree 3");
    }
    const auto g = m.jets_at(x, y, 0);
    const double h[2][2] = {{g[2].value(), -g[1].value()},
                            {-g[1].value(), g[0].value()}};
    const SymCov v = pi.value_at(x, y);
    double norm = 0.0;
    for (int i1 = 0; i1 < 2; ++i1) {
        for (int i2 = 0; i2 < 2; ++i2) {
            for (int i3 = 0; i3 < 2; ++i3) {
                double raised = 0.0;
                for (int p1 = 0; p1 < 2; ++p1) {
                    for (int p2 = 0; p2 < 2; ++p2) {
                        for (int p3 = 0; p3 < 2; ++p3) {
                            raised += h[i1][p1] * h[i2][p2] * h[i3][p3] *
                                      v[p1 + p2 + p3];
                        }
                    }
                }
                norm += raised * v[i1 + i2 + i3];
            }
        }
    }
    return norm;
}

double holomorphicity_residual(const MetricChart& m, const SymCovField& pi,
                               double x, double y) {
    if (pi.degree() != 3) {
        throw std::invalid_argument("holomorphicity operand must have degree 3");
    }
    const auto g = m.jets_at(x, y, 0);
    const double h00 = g[2].value();
    const double h01 = -g[1].value();
    const double h11 = g[0].value();
    const SymCov v = pi.value_at(x, y);
    const double tx = h00 * v[0] + 2.0 * h01 * v[1] + h11 * v[2];
    const double ty = h00 * v[1] + 2.0 * h01 * v[2] + h11 * v[3];
    const ChartConnection conn = levi_civita(m);
    const ConnJets cj = conn.jets_at(x, y, 1);
    const TensorJets pj = pi.jets_at(x, y, 1);
    const SymCov dx = tensor_value(covd_x_jets(cj, pj));
    const SymCov dy = tensor_value(covd_y_jets(cj, pj));
    double div_res = 0.0;
    for (int l = 0; l <= 2; ++l) {
        const double div = h00 * dx[l] + h01 * dy[l] + h01 * dx[l + 1] +
                           h11 * dy[l + 1];
        div_res = std::max(div_res, std::abs(div));
    }
    return std::max(std::abs(tx), std::abs(ty)) + div_res;
}

double hessdet(const ExprAst& f, double x, double y) {
    const Jet2 j = eval_jet(f, x, y, 2);
    return j.partial(2, 0) * j.partial(0, 2) - j.partial(1, 1) * j.partial(1, 1);
}

double u_of_f(const ExprAst& f, double x, double y) {
    const Jet2 j = eval_jet(f, x, y, 2);
    const double fx = j.partial(1, 0);
    const double fy = j.partial(0, 1);
    return fx * fx * j.partial(0, 2) - 2.0 * fx * fy * j.partial(1, 1) +
           fy * fy * j.partial(2, 0);
}

}  // namespace symconn
