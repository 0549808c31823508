#include "symconn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symconn/quadrature.hpp"

namespace symconn {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

Jet2 tr(const Jet2& j, int order) {
    return j.order() == order ? j : jet_truncate(j, order);
}

ConnJets conn_tr(const ConnJets& cj, int order) {
    return ConnJets{tr(cj.a, order), tr(cj.b, order), tr(cj.c, order),
                    tr(cj.d, order)};
}

TensorJets tensor_tr(const TensorJets& t, int order) {
    std::vector<Jet2> comps;
    comps.reserve(t.comps.size());
    for (const Jet2& c : t.comps) {
        comps.push_back(tr(c, order));
    }
    return TensorJets{t.degree, std::move(comps)};
}

TensorJets tensor_add(const TensorJets& a, const TensorJets& b) {
    if (a.degree != b.degree) {
        throw std::invalid_argument("tensor sum degree mismatch");
    }
    const int ord = std::min(a.order(), b.order());
    std::vector<Jet2> comps;
    comps.reserve(a.comps.size());
    for (std::size_t j = 0; j < a.comps.size(); ++j) {
        comps.push_back(tr(a.comps[j], ord) + tr(b.comps[j], ord));
    }
    return TensorJets{a.degree, std::move(comps)};
}

TensorJets tensor_sub(const TensorJets& a, const TensorJets& b) {
    if (a.degree != b.degree) {
        throw std::invalid_argument("tensor difference degree mismatch");
    }
    const int ord = std::min(a.order(), b.order());
    std::vector<Jet2> comps;
    comps.reserve(a.comps.size());
    for (std::size_t j = 0; j < a.comps.size(); ++j) {
        comps.push_back(tr(a.comps[j], ord) - tr(b.comps[j], ord));
    }
    return TensorJets{a.degree, std::move(comps)};
}

TensorJets tensor_scale(double s, const TensorJets& a) {
    std::vector<Jet2> comps;
    comps.reserve(a.comps.size());
    for (const Jet2& c : a.comps) {
        comps.push_back(s * c);
    }
    return TensorJets{a.degree, std::move(comps)};
}

double max_abs_diff(const SymCov& a, const SymCov& b) {
    double m = 0.0;
    for (int j = 0; j <= a.degree(); ++j) {
        m = std::max(m, std::abs(a[j] - b[j]));
    }
    return m;
}

}  // namespace

SymCov tensor_value(const TensorJets& t) {
    SymCov v(t.degree);
    for (int j = 0; j <= t.degree; ++j) {
        v[j] = t.comps[j].value();
    }
    return v;
}

SymCovField::SymCovField(int degree, std::vector<ExprAst> comps)
    : degree_(degree), comps_(std::move(comps)) {
    if (degree_ < 0) {
        throw std::invalid_argument("tensor field degree must be nonnegative");
    }
    if (comps_.size() != static_cast<std::size_t>(degree_) + 1) {
        throw std::invalid_argument("tensor field needs degree + 1 components");
    }
}

SymCovField SymCovField::scalar(ExprAst f) {
    std::vector<ExprAst> comps;
    comps.push_back(std::move(f));
    return SymCovField(0, std::move(comps));
}

TensorJets SymCovField::jets_at(double x, double y, int order) const {
    std::vector<Jet2> comps;
    comps.reserve(comps_.size());
    for (const ExprAst& c : comps_) {
        comps.push_back(eval_jet(c, x, y, order));
    }
    return TensorJets{degree_, std::move(comps)};
}

SymCov SymCovField::value_at(double x, double y) const {
    return tensor_value(jets_at(x, y, 0));
}

TensorJets ricci_tensor_jets(const ConnJets& cj) {
    auto r = ricci_jets(cj);
    return TensorJets{2, {r[0], r[1], r[2]}};
}

// Component form of the covariant derivative with j the y-index count:
//   (grad_i T)[j] = d_i T[j]
//                   - (k-j) (Gamma^x_ix T[j] + Gamma^y_ix T[j+1])
//                   - j (Gamma^x_iy T[j-1] + Gamma^y_iy T[j])
// with the Christoffel table Gamma^x_xx = A, Gamma^y_xx = B,
// Gamma^x_xy = -D, Gamma^y_xy = -A, Gamma^x_yy = C, Gamma^y_yy = D.

TensorJets covd_x_jets(const ConnJets& cj, const TensorJets& t) {
    const int k = t.degree;
    const int ord = std::min(t.order() - 1, cj.order());
    if (ord < 0) {
        throw std::invalid_argument("covariant derivative needs jet order >= 1");
    }
    const ConnJets g = conn_tr(cj, ord);
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        Jet2 r = tr(jet_shift(t.comps[j], 1, 0), ord);
        if (k - j > 0) {
            r -= static_cast<double>(k - j) *
                 (g.a * tr(t.comps[j], ord) + g.b * tr(t.comps[j + 1], ord));
        }
        if (j > 0) {
            r += static_cast<double>(j) *
                 (g.d * tr(t.comps[j - 1], ord) + g.a * tr(t.comps[j], ord));
        }
        comps.push_back(r);
    }
    return TensorJets{k, std::move(comps)};
}

TensorJets covd_y_jets(const ConnJets& cj, const TensorJets& t) {
    const int k = t.degree;
    const int ord = std::min(t.order() - 1, cj.order());
    if (ord < 0) {
        throw std::invalid_argument("covariant derivative needs jet order >= 1");
    }
    const ConnJets g = conn_tr(cj, ord);
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        Jet2 r = tr(jet_shift(t.comps[j], 0, 1), ord);
        if (k - j > 0) {
            r += static_cast<double>(k - j) *
                 (g.d * tr(t.comps[j], ord) + g.a * tr(t.comps[j + 1], ord));
        }
        if (j > 0) {
            r -= static_cast<double>(j) *
                 (g.c * tr(t.comps[j - 1], ord) + g.d * tr(t.comps[j], ord));
        }
        comps.push_back(r);
    }
    return TensorJets{k, std::move(comps)};
}

TensorJets delta_jets(const ConnJets& cj, const TensorJets& t) {
    const int k = t.degree;
    if (k < 1) {
        throw std::invalid_argument("delta needs tensor degree >= 1");
    }
    const TensorJets dx = covd_x_jets(cj, t);
    const TensorJets dy = covd_y_jets(cj, t);
    const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        comps.push_back(sign * (dx.comps[j + 1] - dy.comps[j]));
    }
    return TensorJets{k - 1, std::move(comps)};
}

TensorJets delta_star_jets(const ConnJets& cj, const TensorJets& t) {
    const int k = t.degree;
    const TensorJets dx = covd_x_jets(cj, t);
    const TensorJets dy = covd_y_jets(cj, t);
    const int ord = dx.order();
    const int k1 = k + 1;
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(k1) + 1);
    for (int j = 0; j <= k1; ++j) {
        Jet2 acc(ord);
        if (k1 - j > 0) {
            acc += static_cast<double>(k1 - j) * dx.comps[j];
        }
        if (j > 0) {
            acc += static_cast<double>(j) * dy.comps[j - 1];
        }
        comps.push_back((-1.0 / static_cast<double>(k1)) * acc);
    }
    return TensorJets{k1, std::move(comps)};
}

TensorJets sym_product_jets(const TensorJets& a, const TensorJets& b) {
    const int ka = a.degree;
    const int kb = b.degree;
    const int ord = std::min(a.order(), b.order());
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(ka + kb) + 1);
    for (int j = 0; j <= ka + kb; ++j) {
        Jet2 acc(ord);
        const int lo = std::max(0, j - kb);
        const int hi = std::min(ka, j);
        for (int j1 = lo; j1 <= hi; ++j1) {
            const double w =
                binom(ka, j1) * binom(kb, j - j1) / binom(ka + kb, j);
            acc += w * (tr(a.comps[j1], ord) * tr(b.comps[j - j1], ord));
        }
        comps.push_back(acc);
    }
    return TensorJets{ka + kb, std::move(comps)};
}

Jet2 pairing_density_jets(const TensorJets& a, const TensorJets& b) {
    if (a.degree != b.degree) {
        throw std::invalid_argument("pairing density degree mismatch");
    }
    const int k = a.degree;
    const int ord = std::min(a.order(), b.order());
    Jet2 acc(ord);
    for (int j = 0; j <= k; ++j) {
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        acc += sign * binom(k, j) * (tr(a.comps[j], ord) * tr(b.comps[k - j], ord));
    }
    return acc;
}

TensorJets lop_jets(const ConnJets& cj, const TensorJets& xflat) {
    if (xflat.degree != 1) {
        throw std::invalid_argument("lop operand must be a one-form");
    }
    const TensorJets dd = delta_star_jets(cj, delta_star_jets(cj, xflat));
    return tensor_add(dd, sym_product_jets(xflat, ricci_tensor_jets(cj)));
}

TensorJets hop_jets(const ConnJets& cj, const Jet2& f) {
    const TensorJets f0{0, {f}};
    const TensorJets ddd =
        delta_star_jets(cj, delta_star_jets(cj, delta_star_jets(cj, f0)));
    const TensorJets df{1, {jet_shift(f, 1, 0), jet_shift(f, 0, 1)}};
    return tensor_sub(ddd, sym_product_jets(df, ricci_tensor_jets(cj)));
}

TensorJets lop_adjoint_jets(const ConnJets& cj, const TensorJets& p) {
    if (p.degree != 3) {
        throw std::invalid_argument("lop adjoint operand must have degree 3");
    }
    const TensorJets dd = delta_jets(cj, delta_jets(cj, p));
    const auto r = ricci_jets(cj);
    const int ord = std::min(p.order(), r[0].order());
    // Contraction P_i^{ab} R_ab; the i = x slice of P is (p0, p1, p2) and
    // the i = y slice is (p1, p2, p3).
    const Jet2 p0 = tr(p.comps[0], ord);
    const Jet2 p1 = tr(p.comps[1], ord);
    const Jet2 p2 = tr(p.comps[2], ord);
    const Jet2 p3 = tr(p.comps[3], ord);
    const Jet2 r0 = tr(r[0], ord);
    const Jet2 r1 = tr(r[1], ord);
    const Jet2 r2 = tr(r[2], ord);
    const TensorJets contr{
        1, {p2 * r0 - 2.0 * (p1 * r1) + p0 * r2, p3 * r0 - 2.0 * (p2 * r1) + p1 * r2}};
    return tensor_add(tensor_scale(-1.0, dd), contr);
}

Jet2 hop_adjoint_jet(const ConnJets& cj, const TensorJets& p) {
    return delta_jets(cj, lop_adjoint_jets(cj, p)).comps[0];
}

TensorJets lie_deriv_jets(const ConnJets& cj, const Jet2& xx, const Jet2& xy,
                          const TensorJets& t) {
    const int k = t.degree;
    const int ord =
        std::min({t.order() - 1, xx.order() - 1, xy.order() - 1, cj.order()});
    if (ord < 0) {
        throw std::invalid_argument("Lie derivative needs jet order >= 1");
    }
    const ConnJets g = conn_tr(cj, ord);
    const Jet2 vx = tr(xx, ord);
    const Jet2 vy = tr(xy, ord);
    // grad_i X^p for the Christoffel table of (A, B, C, D).
    const Jet2 nxx = tr(jet_shift(xx, 1, 0), ord) + g.a * vx - g.d * vy;
    const Jet2 nxy = tr(jet_shift(xy, 1, 0), ord) + g.b * vx - g.a * vy;
    const Jet2 nyx = tr(jet_shift(xx, 0, 1), ord) - g.d * vx + g.c * vy;
    const Jet2 nyy = tr(jet_shift(xy, 0, 1), ord) - g.a * vx + g.d * vy;
    const TensorJets dxt = tensor_tr(covd_x_jets(cj, t), ord);
    const TensorJets dyt = tensor_tr(covd_y_jets(cj, t), ord);
    std::vector<Jet2> comps;
    comps.reserve(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        Jet2 r = vx * dxt.comps[j] + vy * dyt.comps[j];
        if (k - j > 0) {
            r += static_cast<double>(k - j) *
                 (nxx * tr(t.comps[j], ord) + nxy * tr(t.comps[j + 1], ord));
        }
        if (j > 0) {
            r += static_cast<double>(j) *
                 (nyx * tr(t.comps[j - 1], ord) + nyy * tr(t.comps[j], ord));
        }
        comps.push_back(r);
    }
    return TensorJets{k, std::move(comps)};
}

TensorJets b_of_pi_jets(const TensorJets& pi) {
    if (pi.degree != 3) {
        throw std::invalid_argument("B(Pi) operand must have degree 3");
    }
    const Jet2& p0 = pi.comps[0];
    const Jet2& p1 = pi.comps[1];
    const Jet2& p2 = pi.comps[2];
    const Jet2& p3 = pi.comps[3];
    return TensorJets{2,
                      {2.0 * (p1 * p1) - 2.0 * (p0 * p2),
                       p1 * p2 - p0 * p3,
                       2.0 * (p2 * p2) - 2.0 * (p1 * p3)}};
}

TensorJets t_of_pi_jets(const TensorJets& pi) {
    if (pi.degree != 3) {
        throw std::invalid_argument("T(Pi) operand must have degree 3");
    }
    const TensorJets b = b_of_pi_jets(pi);
    const Jet2& p0 = pi.comps[0];
    const Jet2& p1 = pi.comps[1];
    const Jet2& p2 = pi.comps[2];
    const Jet2& p3 = pi.comps[3];
    return TensorJets{1,
                      {2.0 * (p1 * b.comps[1]) - p0 * b.comps[2] - p2 * b.comps[0],
                       2.0 * (p2 * b.comps[1]) - p1 * b.comps[2] - p3 * b.comps[0]}};
}

SymCov covdiv(const ChartConnection& conn, const SymCovField& t, double x,
              double y) {
    if (t.degree() < 1) {
        throw std::invalid_argument("delta needs tensor degree >= 1");
    }
    return tensor_value(
        delta_jets(conn.jets_at(x, y, 1), t.jets_at(x, y, 1)));
}

SymCov covdiv_adjoint(const ChartConnection& conn, const SymCovField& t, double x,
                      double y) {
    return tensor_value(
        delta_star_jets(conn.jets_at(x, y, 1), t.jets_at(x, y, 1)));
}

SymCov lop(const ChartConnection& conn, const SymCovField& xflat, double x,
           double y) {
    return tensor_value(
        lop_jets(conn.jets_at(x, y, 3), xflat.jets_at(x, y, 2)));
}

SymCov hop(const ChartConnection& conn, const ExprAst& f, double x, double y) {
    return tensor_value(hop_jets(conn.jets_at(x, y, 3), eval_jet(f, x, y, 3)));
}

SymCov lop_adjoint(const ChartConnection& conn, const SymCovField& p, double x,
                   double y) {
    return tensor_value(
        lop_adjoint_jets(conn.jets_at(x, y, 3), p.jets_at(x, y, 2)));
}

double hop_adjoint(const ChartConnection& conn, const SymCovField& p, double x,
                   double y) {
    return hop_adjoint_jet(conn.jets_at(x, y, 4), p.jets_at(x, y, 3)).value();
}

namespace {

// Slotwise contraction Pi_jpq S^{pq} of a degree-2 value S against the
// degree-3 value Pi, per free slot j.
SymCov contract_pi_s(const SymCov& pi, const SymCov& s) {
    const double cx = s[2] * pi[0] - 2.0 * s[1] * pi[1] + s[0] * pi[2];
    const double cy = s[2] * pi[1] - 2.0 * s[1] * pi[2] + s[0] * pi[3];
    return SymCov(1, {cx, cy});
}

}  // namespace

VariationCoeffs variation_rho(const ChartConnection& conn, const SymCovField& pi,
                              double x, double y) {
    if (pi.degree() != 3) {
        throw std::invalid_argument("variation tensor must have degree 3");
    }
    const ConnJets cj = conn.jets_at(x, y, 4);
    const TensorJets pj = pi.jets_at(x, y, 3);
    const SymCov r0 = rho(conn, x, y);
    const SymCov r1 = -2.0 * tensor_value(lop_adjoint_jets(cj, pj));
    const SymCov db = tensor_value(delta_jets(cj, b_of_pi_jets(pj)));
    const SymCov dpi = tensor_value(delta_jets(cj, pj));
    const SymCov r2 = -2.0 * (db + contract_pi_s(tensor_value(pj), dpi));
    const SymCov r3 = -2.0 * tensor_value(t_of_pi_jets(pj));
    return VariationCoeffs{{r0, r1, r2, r3}};
}

VariationCoeffs variation_k(const ChartConnection& conn, const SymCovField& pi,
                            double x, double y) {
    if (pi.degree() != 3) {
        throw std::invalid_argument("variation tensor must have degree 3");
    }
    const ConnJets cj = conn.jets_at(x, y, 4);
    const TensorJets pj = pi.jets_at(x, y, 3);
    const double k0 = moment_k(conn, x, y);
    const double k1 = hop_adjoint_jet(cj, pj).value();
    // (Pi * Pi)_i = 3 delta B(Pi)_i - Pi^{abc} grad_i Pi_abc.
    const TensorJets db = delta_jets(cj, b_of_pi_jets(pj));
    const Jet2 cx = pairing_density_jets(covd_x_jets(cj, pj), pj);
    const Jet2 cy = pairing_density_jets(covd_y_jets(cj, pj), pj);
    const int ord = std::min(db.order(), cx.order());
    const TensorJets pp{1,
                        {3.0 * tr(db.comps[0], ord) - tr(cx, ord),
                         3.0 * tr(db.comps[1], ord) - tr(cy, ord)}};
    const double k2 = 0.5 * delta_jets(cj, pp).comps[0].value();
    const double k3 = delta_jets(cj, t_of_pi_jets(pj)).comps[0].value();
    return VariationCoeffs{{SymCov(0, {k0}), SymCov(0, {k1}), SymCov(0, {k2}),
                            SymCov(0, {k3})}};
}

SymCov jacobi(const ChartConnection& conn, const SymCovField& alpha, double x,
              double y) {
    if (alpha.degree() != 3) {
        throw std::invalid_argument("Jacobi operand must have degree 3");
    }
    const ConnJets cj = conn.jets_at(x, y, 8);
    const TensorJets aj = alpha.jets_at(x, y, 6);
    const Jet2 hstar = hop_adjoint_jet(cj, aj);
    const TensorJets hh = hop_jets(cj, hstar);
    const Jet2 k = moment_k_jet(cj);
    const Jet2 hx = -1.0 * jet_shift(k, 0, 1);
    const Jet2 hy = jet_shift(k, 1, 0);
    const TensorJets lie = lie_deriv_jets(cj, hx, hy, aj);
    return tensor_value(hh) + tensor_value(lie);
}

double second_variation(const ChartConnection& conn, const SymCovField& alpha,
                        const SymCovField& beta, const Region& region,
                        const Rule& rule) {
    if (alpha.degree() != 3 || beta.degree() != 3) {
        throw std::invalid_argument("second variation operands must have degree 3");
    }
    auto integrand = [&](double x, double y) {
        const ConnJets cj = conn.jets_at(x, y, 6);
        const TensorJets aj = alpha.jets_at(x, y, 3);
        const TensorJets bj = beta.jets_at(x, y, 3);
        const double ha = hop_adjoint_jet(cj, aj).value();
        const double hb = hop_adjoint_jet(cj, bj).value();
        const Jet2 k = moment_k_jet(cj);
        const Jet2 hx = -1.0 * jet_shift(k, 0, 1);
        const Jet2 hy = jet_shift(k, 1, 0);
        const SymCov lie = tensor_value(lie_deriv_jets(cj, hx, hy, aj));
        return 2.0 * ha * hb + 2.0 * pairing_density(lie, tensor_value(bj));
    };
    return integrate(region, rule, integrand);
}

ChartConnection deform(const ChartConnection& conn, const SymCovField& pi,
                       double t) {
    if (pi.degree() != 3) {
        throw std::invalid_argument("deformation tensor must have degree 3");
    }
    const auto& p = pi.components();
    const ExprAst ts = expr_number(t);
    // Lowered-cubic slots against the chart fields read
    // (Pi_xxx, Pi_xxy, Pi_xyy, Pi_yyy) = (-B, A, -D, C).
    const ExprAst a2 = expr_add(conn.field_a(), expr_mul(ts, p[1]));
    const ExprAst b2 = expr_sub(conn.field_b(), expr_mul(ts, p[0]));
    const ExprAst c2 = expr_add(conn.field_c(), expr_mul(ts, p[3]));
    const ExprAst d2 = expr_sub(conn.field_d(), expr_mul(ts, p[2]));
    return ChartConnection(a2, b2, c2, d2, conn.domain());
}

namespace {

// Fixed generic polynomial test fields for the identity suite. Low-degree
// coefficients keep jet magnitudes tame on the sample boxes while leaving
// no accidental symmetry for an identity to hide behind.
SymCovField suite_field_deg3() {
    return SymCovField(
        3, {parse_or_throw("0.7 - 0.3*x + 0.5*y + 0.2*x^2 - 0.4*x*y + 0.6*y^2"),
            parse_or_throw("-0.2 + 0.4*x + 0.1*y - 0.5*x^2 + 0.3*x*y - 0.6*y^2"),
            parse_or_throw("0.3 - 0.6*x + 0.2*y + 0.4*x^2 - 0.1*x*y + 0.5*y^2"),
            parse_or_throw("-0.4 + 0.2*x - 0.3*y + 0.6*x^2 + 0.5*x*y - 0.2*y^2")});
}

SymCovField suite_field_deg2() {
    return SymCovField(
        2, {parse_or_throw("0.5 + 0.3*x - 0.2*y - 0.4*x^2 + 0.6*x*y + 0.1*y^2"),
            parse_or_throw("-0.3 + 0.7*x + 0.4*y + 0.2*x^2 - 0.5*x*y - 0.1*y^2"),
            parse_or_throw("0.2 - 0.4*x + 0.6*y + 0.3*x^2 + 0.1*x*y - 0.7*y^2")});
}

ExprAst suite_scalar() {
    return parse_or_throw(
        "0.4*x^3 - 0.3*y^3 + x^2*y + 0.3*x*y^2 - 0.7*x + 0.2*y^2 + 0.1*x*y");
}

// Decomposition of grad alpha into its delta* and delta parts:
//   grad_i alpha[j] = -(delta* alpha)_{i,[j]}
//                     + s (Om-weighted delta term), s = (-1)^{k+1} k/(k+1).
double grad_decompose_residual(const ConnJets& cj, const TensorJets& aj) {
    const int k = aj.degree;
    const SymCov dx = tensor_value(covd_x_jets(cj, aj));
    const SymCov dy = tensor_value(covd_y_jets(cj, aj));
    const SymCov ds = tensor_value(delta_star_jets(cj, aj));
    const SymCov dd = tensor_value(delta_jets(cj, aj));
    const double s = ((k + 1) % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(k) /
                     static_cast<double>(k + 1);
    double m = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double om_x = j > 0 ? (static_cast<double>(j) / k) * dd[j - 1] : 0.0;
        const double om_y =
            k - j > 0 ? -(static_cast<double>(k - j) / k) * dd[j] : 0.0;
        m = std::max(m, std::abs(dx[j] - (-ds[j] + s * om_x)));
        m = std::max(m, std::abs(dy[j] - (-ds[j + 1] + s * om_y)));
    }
    return m;
}

// (k+1) delta delta* alpha + k delta* delta alpha
//   = (-1)^k k (k+1) sym(R_(i^p alpha_...)p).
double delta_commutator_residual(const ConnJets& cj, const TensorJets& aj) {
    const int k = aj.degree;
    const SymCov lhs1 = tensor_value(delta_jets(cj, delta_star_jets(cj, aj)));
    const SymCov lhs2 = tensor_value(delta_star_jets(cj, delta_jets(cj, aj)));
    const SymCov a = tensor_value(aj);
    const SymCov r = tensor_value(ricci_tensor_jets(cj));
    // gamma_i[l] = R_i^p alpha_{(l)p} with R_i^x = R_iy and R_i^y = -R_ix.
    std::vector<double> gx(k), gy(k);
    for (int l = 0; l < k; ++l) {
        gx[l] = r[1] * a[l] - r[0] * a[l + 1];
        gy[l] = r[2] * a[l] - r[1] * a[l + 1];
    }
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const double scale = sign * static_cast<double>(k) * (k + 1);
    double m = 0.0;
    for (int j = 0; j <= k; ++j) {
        double sym = 0.0;
        if (k - j > 0) {
            sym += (static_cast<double>(k - j) / k) * gx[j];
        }
        if (j > 0) {
            sym += (static_cast<double>(j) / k) * gy[j - 1];
        }
        const double lhs = (k + 1) * lhs1[j] + k * lhs2[j];
        m = std::max(m, std::abs(lhs - scale * sym));
    }
    return m;
}

}  // namespace

IdentityReport identity_suite(const ChartConnection& conn,
                              const std::vector<std::array<double, 2>>& points) {
    const SymCovField a3 = suite_field_deg3();
    const SymCovField a2 = suite_field_deg2();
    const ExprAst f = suite_scalar();
    IdentityReport rep{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (const auto& pt : points) {
        const double x = pt[0];
        const double y = pt[1];
        const ConnJets cj = conn.jets_at(x, y, 8);

        // (i) and (ii) on both test degrees.
        for (const SymCovField* fld : {&a2, &a3}) {
            const TensorJets aj = fld->jets_at(x, y, 2);
            rep.grad_decompose =
                std::max(rep.grad_decompose, grad_decompose_residual(cj, aj));
            rep.delta_commutator = std::max(rep.delta_commutator,
                                            delta_commutator_residual(cj, aj));
        }

        // (iii) H*(H(f)) = {f, K}.
        const Jet2 fj = eval_jet(f, x, y, 6);
        const Jet2 kj = moment_k_jet(cj);
        const double hsth = hop_adjoint_jet(cj, hop_jets(cj, fj)).value();
        const double bracket = fj.partial(1, 0) * kj.partial(0, 1) -
                               fj.partial(0, 1) * kj.partial(1, 0);
        rep.hsth_bracket = std::max(rep.hsth_bracket, std::abs(hsth - bracket));

        // (iv) delta* rho = 2 delta* delta Ric = -3 delta delta* Ric.
        const TensorJets ric_t = ricci_tensor_jets(cj);
        const auto rj = rho_jets(cj);
        const TensorJets rho_t{1, {rj[0], rj[1]}};
        const TensorJets ds_rho = delta_star_jets(cj, rho_t);
        const SymCov lhs4 = tensor_value(ds_rho);
        const SymCov chain1 =
            2.0 * tensor_value(delta_star_jets(cj, delta_jets(cj, ric_t)));
        const SymCov chain2 =
            -3.0 * tensor_value(delta_jets(cj, delta_star_jets(cj, ric_t)));
        rep.sdast_rho_chain =
            std::max({rep.sdast_rho_chain, max_abs_diff(lhs4, chain1),
                      max_abs_diff(lhs4, chain2)});

        // Shared pieces for (v) and (vi).
        const TensorJets dk{1, {jet_shift(kj, 1, 0), jet_shift(kj, 0, 1)}};
        const SymCov ndk_x = tensor_value(covd_x_jets(cj, dk));
        const SymCov ndk_y = tensor_value(covd_y_jets(cj, dk));
        const SymCov ndk(2, {ndk_x[0], ndk_x[1], ndk_y[1]});
        const SymCov rhov = tensor_value(rho_t);
        const SymCov ricv = tensor_value(ric_t);
        const double kv = kj.value();
        const SymCov pp(2, {rhov[0] * rhov[0], rhov[0] * rhov[1], rhov[1] * rhov[1]});

        // (v) grad dK = (1/6) rho rho - K Ric - rho^p (delta* Ric)_{..p}
        //              + 4 sym(R_(i^p (delta* rho)_{j)p}) - (3/2) delta delta*^2 rho.
        const SymCov sig = tensor_value(delta_star_jets(cj, ric_t));
        const SymCov rho_sig(2, {sig[0] * rhov[1] - sig[1] * rhov[0],
                                 sig[1] * rhov[1] - sig[2] * rhov[0],
                                 sig[2] * rhov[1] - sig[3] * rhov[0]});
        const SymCov s2 = lhs4;
        const double gxx = ricv[1] * s2[0] - ricv[0] * s2[1];
        const double gxy = ricv[1] * s2[1] - ricv[0] * s2[2];
        const double gyx = ricv[2] * s2[0] - ricv[1] * s2[1];
        const double gyy = ricv[2] * s2[1] - ricv[1] * s2[2];
        const SymCov sym_g(2, {gxx, 0.5 * (gxy + gyx), gyy});
        const SymCov dds2 = tensor_value(
            delta_jets(cj, delta_star_jets(cj, ds_rho)));
        const SymCov rhs5 = (1.0 / 6.0) * pp - kv * ricv - rho_sig +
                            4.0 * sym_g - 1.5 * dds2;
        rep.full_nabla_dk = std::max(rep.full_nabla_dk, max_abs_diff(ndk, rhs5));

        // (vi) the two-term form, exact only for preferred connections.
        const SymCov rhs6 = (1.0 / 6.0) * pp - kv * ricv;
        rep.preferred_nabla_dk =
            std::max(rep.preferred_nabla_dk, max_abs_diff(ndk, rhs6));
    }
    return rep;
}

}  // namespace symconn
