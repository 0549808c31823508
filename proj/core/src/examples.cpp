#include "symconn/examples.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "symconn/operators.hpp"

namespace symconn {

namespace {

constexpr double kHarmonicTol = 1e-8;
constexpr double kHolomorphicTol = 1e-8;

std::string point_text(double x, double y) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", x, y);
    return buf;
}

}  // namespace

ChartConnection bourgeois_cahen_family(double a, double p, double q, double tau) {
    const ExprAst s = expr_add(expr_x(), expr_number(a));
    const ExprAst w = expr_sub(expr_number(tau), expr_mul(s, s));
    const ExprAst fa = expr_div(s, w);
    const ExprAst poly =
        expr_add(expr_mul(s, s), expr_add(expr_mul(expr_number(p), s),
                                          expr_number(q)));
    const ExprAst fc =
        expr_mul(expr_number(-1.0 / 6.0), expr_mul(w, poly));
    Domain dom = Domain::all_plane();
    if (tau > 0.0) {
        // Keep to the central strip between the zeros of tau - (x+a)^2.
        const double r = std::sqrt(tau);
        const double margin = 1e-6 * (1.0 + r);
        dom = Domain::rectangle(-r - a + margin, r - a - margin,
                                -std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity());
    }
    return ChartConnection(fa, expr_number(0.0), fc, expr_number(0.0), dom);
}

ChartConnection quartic_family(double a, double b, double c, double d) {
    const ExprAst x = expr_x();
    const ExprAst fc = expr_add(
        expr_add(expr_div(expr_pow(x, expr_number(4.0)), expr_number(24.0)),
                 expr_mul(expr_number(a / 6.0), expr_pow(x, expr_number(3.0)))),
        expr_add(expr_mul(expr_number(b / 2.0), expr_mul(x, x)),
                 expr_add(expr_mul(expr_number(c), x), expr_number(d))));
    return ChartConnection(expr_number(0.0), expr_number(0.0), fc,
                           expr_number(0.0), Domain::all_plane());
}

ChartConnection sphere_family(double t) {
    const MetricChart m = MetricChart::sphere_chart();
    const ChartConnection base = levi_civita(m);
    const SymCovField gamma(
        3, {expr_number(0.0), expr_number(0.0), expr_number(0.0),
            expr_mul(expr_number(0.25), parse_or_throw("(1 - x^2)^2"))});
    return deform(base, gamma, t);
}

ChartConnection cube_of_exact(const ExprAst& f) {
    const ExprAst fx = differentiate(f, 'x');
    const ExprAst fy = differentiate(f, 'y');
    const ExprAst a = expr_mul(expr_mul(fx, fx), fy);
    const ExprAst b = expr_neg(expr_mul(expr_mul(fx, fx), fx));
    const ExprAst c = expr_mul(expr_mul(fy, fy), fy);
    const ExprAst d = expr_neg(expr_mul(fx, expr_mul(fy, fy)));
    return ChartConnection(a, b, c, d, Domain::all_plane());
}

ChartConnection busemann_example() {
    const ChartConnection base = levi_civita(MetricChart::hyperbolic_chart());
    const SymCovField pi(3, {expr_number(0.0), expr_number(0.0),
                             expr_number(0.0), expr_number(-1.0)});
    return deform(base, pi, 1.0);
}

ChartConnection harmonic_deformation(const MetricChart& m, const ExprAst& xu,
                                     const ExprAst& xw) {
    if (!xu.root || !xw.root) {
        throw std::invalid_argument("deformation one-form component is empty");
    }
    const ChartConnection base = levi_civita(m);
    const ExprAst closed_res =
        expr_sub(differentiate(xw, 'x'), differentiate(xu, 'y'));
    const SymCovField xfield(1, {xu, xw});
    for (const auto& pt : m.sample_points(25, 23456u)) {
        const double x = pt[0];
        const double y = pt[1];
        const double dres = std::abs(eval_jet(closed_res, x, y, 0).value());
        const auto g = m.jets_at(x, y, 0);
        const double h00 = g[2].value();
        const double h01 = -g[1].value();
        const double h11 = g[0].value();
        const ConnJets cj = base.jets_at(x, y, 1);
        const TensorJets xj = xfield.jets_at(x, y, 1);
        const SymCov dx = tensor_value(covd_x_jets(cj, xj));
        const SymCov dy = tensor_value(covd_y_jets(cj, xj));
        const double div = h00 * dx[0] + h01 * (dx[1] + dy[0]) + h11 * dy[1];
        const double res = std::max(dres, std::abs(div));
        if (res > kHarmonicTol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "deformation one-form is not harmonic: residual "
                          "%.3g at %s",
                          res, point_text(x, y).c_str());
            throw std::invalid_argument(buf);
        }
    }
    // Pi_ijk = X_i g_jk + X_j g_ik + X_k g_ij componentwise.
    const ExprAst p0 = expr_mul(expr_number(3.0), expr_mul(xu, m.g11()));
    const ExprAst p1 =
        expr_add(expr_mul(expr_number(2.0), expr_mul(xu, m.g12())),
                 expr_mul(xw, m.g11()));
    const ExprAst p2 =
        expr_add(expr_mul(xu, m.g22()),
                 expr_mul(expr_number(2.0), expr_mul(xw, m.g12())));
    const ExprAst p3 = expr_mul(expr_number(3.0), expr_mul(xw, m.g22()));
    return deform(base, SymCovField(3, {p0, p1, p2, p3}), 1.0);
}

ChartConnection cubic_diff_deformation(const MetricChart& m, const ExprAst& phi_re,
                                       const ExprAst& phi_im) {
    if (!phi_re.root || !phi_im.root) {
        throw std::invalid_argument("cubic differential component is empty");
    }
    const bool flat = m.builtin() == MetricChart::Builtin::kFlat;
    const bool hyperbolic = m.builtin() == MetricChart::Builtin::kHyperbolic;
    if (!flat && !hyperbolic) {
        throw std::invalid_argument(
            "cubic differential deformation supports only the flat and "
            "hyperbolic built-in charts");
    }
    const ExprAst cr1 =
        expr_sub(differentiate(phi_re, 'x'), differentiate(phi_im, 'y'));
    const ExprAst cr2 =
        expr_add(differentiate(phi_re, 'y'), differentiate(phi_im, 'x'));
    for (const auto& pt : m.sample_points(25, 34567u)) {
        // phi lives in the holomorphic coordinate; on the hyperbolic chart
        // that is z = x - i/y, so test phi there.
        const double zx = pt[0];
        const double zy = hyperbolic ? -1.0 / pt[1] : pt[1];
        const double res = std::max(std::abs(eval_jet(cr1, zx, zy, 0).value()),
                                    std::abs(eval_jet(cr2, zx, zy, 0).value()));
        if (res > kHolomorphicTol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "cubic differential is not holomorphic: "
                          "Cauchy-Riemann residual %.3g at %s",
                          res, point_text(zx, zy).c_str());
            throw std::invalid_argument(buf);
        }
    }
    const ChartConnection base = levi_civita(m);
    if (flat) {
        const SymCovField pi(3, {phi_re, expr_neg(phi_im), expr_neg(phi_re),
                                 phi_im});
        return deform(base, pi, 1.0);
    }
    // Real part of phi dz^3 for z = x - i/y: dz = dx + (i/y^2) dy, so the
    // lowered components pick up inverse powers of y.
    const ExprAst y = expr_y();
    const ExprAst minus_inv_y = expr_neg(expr_div(expr_number(1.0), y));
    const ExprAst pr = substitute(phi_re, expr_x(), minus_inv_y);
    const ExprAst pim = substitute(phi_im, expr_x(), minus_inv_y);
    const ExprAst y2 = expr_pow(y, expr_number(2.0));
    const ExprAst y4 = expr_pow(y, expr_number(4.0));
    const ExprAst y6 = expr_pow(y, expr_number(6.0));
    const SymCovField pi(3, {pr, expr_neg(expr_div(pim, y2)),
                             expr_neg(expr_div(pr, y4)), expr_div(pim, y6)});
    return deform(base, pi, 1.0);
}

}  // namespace symconn
