#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "symconn/connection.hpp"
#include "symconn/expr.hpp"
#include "symconn/jet.hpp"
#include "symconn/operators.hpp"
#include "symconn/tensor2d.hpp"

using symconn::ChartConnection;
using symconn::ConnJets;
using symconn::Domain;
using symconn::ExprAst;
using symconn::Jet2;
using symconn::SymCov;
using symconn::SymCovField;
using symconn::TensorJets;

namespace {

ChartConnection make_connection(const char* a, const char* b, const char* c,
                                const char* d) {
    return ChartConnection(symconn::parse_or_throw(a), symconn::parse_or_throw(b),
                           symconn::parse_or_throw(c), symconn::parse_or_throw(d),
                           Domain::all_plane());
}

ChartConnection flat_connection() { return make_connection("0", "0", "0", "0"); }

ChartConnection curved_connection() {
    return make_connection("0.3 * x * y", "0.2 - 0.5 * x ^ 2", "0.1 * y ^ 2",
                           "0.4 * x");
}

SymCovField gradient_field(const ExprAst& f) {
    return SymCovField(1, {symconn::differentiate(f, 'x'),
                           symconn::differentiate(f, 'y')});
}

// T(v, ..., v) from stored components, with binomial slot multiplicity.
double eval_on_vector(const SymCov& t, double vx, double vy) {
    double total = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= t.degree(); ++j) {
        if (j > 0) {
            binom = binom * (t.degree() - j + 1) / j;
        }
        total += binom * t[j] * std::pow(vx, t.degree() - j) * std::pow(vy, j);
    }
    return total;
}

TensorJets constant_tensor(int degree, const std::vector<double>& comps,
                           int order = 4) {
    TensorJets t{degree, {}};
    for (double v : comps) {
        t.comps.push_back(Jet2::constant(order, v));
    }
    return t;
}

}  // namespace

TEST_CASE("covariant derivative of a scalar is the plain gradient") {
    const ChartConnection conn = curved_connection();
    const ExprAst f = symconn::parse_or_throw("sin(x) * y + x ^ 2");
    const SymCovField sf = SymCovField::scalar(f);
    const ConnJets cj = conn.jets_at(0.6, -0.4, 3);
    const TensorJets fj = sf.jets_at(0.6, -0.4, 3);

    const TensorJets dx = symconn::covd_x_jets(cj, fj);
    const TensorJets dy = symconn::covd_y_jets(cj, fj);
    const Jet2 jet = symconn::eval_jet(f, 0.6, -0.4, 3);
    CHECK(dx.comps[0].value() ==
          doctest::Approx(jet.partial(1, 0)).epsilon(1e-14));
    CHECK(dy.comps[0].value() ==
          doctest::Approx(jet.partial(0, 1)).epsilon(1e-14));

    // delta* of a scalar is minus its differential, for any connection.
    const SymCov ds = symconn::covdiv_adjoint(conn, sf, 0.6, -0.4);
    CHECK(ds[0] == doctest::Approx(-jet.partial(1, 0)).epsilon(1e-14));
    CHECK(ds[1] == doctest::Approx(-jet.partial(0, 1)).epsilon(1e-14));
}

TEST_CASE("divergence annihilates exact one-forms for any connection") {
    const ChartConnection conns[] = {flat_connection(), curved_connection()};
    const ExprAst f = symconn::parse_or_throw("exp(0.3 * x) * cos(y) + x * y ^ 2");
    const SymCovField df = gradient_field(f);
    for (const auto& conn : conns) {
        for (const auto& p : conn.sample_points(6, 13)) {
            const SymCov d = symconn::covdiv(conn, df, p[0], p[1]);
            CHECK(std::abs(d[0]) < 1e-12);
        }
    }
}

TEST_CASE("flat-model closed forms for H and L on gradients") {
    const ChartConnection flat = flat_connection();
    const ExprAst f =
        symconn::parse_or_throw("x ^ 3 * y + 0.5 * y ^ 4 - x ^ 2 * y ^ 2");
    const ExprAst fx = symconn::differentiate(f, 'x');
    const ExprAst fy = symconn::differentiate(f, 'y');
    const SymCovField df(1, {fx, fy});

    const double x0 = 0.7;
    const double y0 = -0.5;
    const Jet2 jet = symconn::eval_jet(f, x0, y0, 3);

    // On the flat model H(f) has components -f_xxx, -f_xxy, -f_xyy, -f_yyy
    // and L(df) = +grad^3 f; both follow from delta* f = -df.
    const SymCov h = symconn::hop(flat, f, x0, y0);
    const SymCov l = symconn::lop(flat, df, x0, y0);
    const double third[] = {jet.partial(3, 0), jet.partial(2, 1),
                            jet.partial(1, 2), jet.partial(0, 3)};
    for (int j = 0; j <= 3; ++j) {
        CHECK(h[j] == doctest::Approx(-third[j]).epsilon(1e-12));
        CHECK(l[j] == doctest::Approx(third[j]).epsilon(1e-12));
    }
}

TEST_CASE("H(f) equals L(-df) on a curved connection") {
    const ChartConnection conn = curved_connection();
    const ExprAst f = symconn::parse_or_throw("sin(x) * cos(y) + 0.2 * x ^ 2 * y");
    const ExprAst fx = symconn::differentiate(f, 'x');
    const ExprAst fy = symconn::differentiate(f, 'y');
    const SymCovField minus_df(1, {symconn::expr_neg(fx), symconn::expr_neg(fy)});
    for (const auto& p : conn.sample_points(8, 29)) {
        const SymCov h = symconn::hop(conn, f, p[0], p[1]);
        const SymCov l = symconn::lop(conn, minus_df, p[0], p[1]);
        for (int j = 0; j <= 3; ++j) {
            CHECK(h[j] == doctest::Approx(l[j]).epsilon(1e-11));
        }
    }
}

TEST_CASE("sym_product_jets polarizes to the product of evaluations") {
    const TensorJets alpha = constant_tensor(1, {2.0, -1.0});
    const TensorJets beta = constant_tensor(1, {0.5, 3.0});
    const TensorJets quad = constant_tensor(2, {1.0, -2.0, 0.75});

    const double vectors[][2] = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, -3.0}};

    const SymCov ab = symconn::tensor_value(symconn::sym_product_jets(alpha, beta));
    const SymCov av = symconn::tensor_value(alpha);
    const SymCov bv = symconn::tensor_value(beta);
    const SymCov qv = symconn::tensor_value(quad);
    for (const auto& v : vectors) {
        CHECK(eval_on_vector(ab, v[0], v[1]) ==
              doctest::Approx(eval_on_vector(av, v[0], v[1]) *
                              eval_on_vector(bv, v[0], v[1]))
                  .epsilon(1e-13));
    }

    const SymCov aq = symconn::tensor_value(symconn::sym_product_jets(alpha, quad));
    CHECK(aq.degree() == 3);
    for (const auto& v : vectors) {
        CHECK(eval_on_vector(aq, v[0], v[1]) ==
              doctest::Approx(eval_on_vector(av, v[0], v[1]) *
                              eval_on_vector(qv, v[0], v[1]))
                  .epsilon(1e-13));
    }

    // Scalars multiply through.
    const TensorJets half = constant_tensor(0, {0.5});
    const SymCov scaled =
        symconn::tensor_value(symconn::sym_product_jets(half, quad));
    for (int j = 0; j <= 2; ++j) {
        CHECK(scaled[j] == doctest::Approx(0.5 * qv[j]).epsilon(1e-15));
    }
}

TEST_CASE("pairing_density_jets matches the pointwise pairing") {
    const TensorJets a = constant_tensor(2, {1.0, 2.0, 3.0});
    const TensorJets b = constant_tensor(2, {4.0, 5.0, 6.0});
    const Jet2 paired = symconn::pairing_density_jets(a, b);
    CHECK(paired.value() ==
          doctest::Approx(symconn::pairing_density(symconn::tensor_value(a),
                                                   symconn::tensor_value(b)))
              .epsilon(1e-15));
    CHECK(paired.value() == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("Lie derivative on scalars and on a constant quadratic form") {
    const ChartConnection flat = flat_connection();
    const ConnJets cj = flat.jets_at(0.4, 0.8, 4);

    SUBCASE("scalar transport is the directional derivative") {
        const ExprAst f = symconn::parse_or_throw("x ^ 2 * y + sin(y)");
        const Jet2 fj = symconn::eval_jet(f, 0.4, 0.8, 4);
        const TensorJets sf{0, {fj}};
        const Jet2 vx = symconn::eval_jet(symconn::parse_or_throw("-y"), 0.4, 0.8, 4);
        const Jet2 vy = symconn::eval_jet(symconn::parse_or_throw("x"), 0.4, 0.8, 4);
        const TensorJets lie = symconn::lie_deriv_jets(cj, vx, vy, sf);
        const double want = -0.8 * fj.partial(1, 0) + 0.4 * fj.partial(0, 1);
        CHECK(lie.comps[0].value() == doctest::Approx(want).epsilon(1e-13));
    }

    SUBCASE("rotation field shears dx.dx into the mixed slot") {
        const TensorJets t = constant_tensor(2, {1.0, 0.0, 0.0});
        const Jet2 vx = symconn::eval_jet(symconn::parse_or_throw("-y"), 0.4, 0.8, 4);
        const Jet2 vy = symconn::eval_jet(symconn::parse_or_throw("x"), 0.4, 0.8, 4);
        const SymCov lie =
            symconn::tensor_value(symconn::lie_deriv_jets(cj, vx, vy, t));
        CHECK(lie[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(lie[1] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(lie[2] == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("translation field differentiates components") {
        const SymCovField field(
            2, {symconn::parse_or_throw("x ^ 2"), symconn::parse_or_throw("x * y"),
                symconn::parse_or_throw("y ^ 3")});
        const TensorJets tj = field.jets_at(0.4, 0.8, 4);
        const Jet2 one = Jet2::constant(4, 1.0);
        const Jet2 zero = Jet2::constant(4, 0.0);
        const SymCov lie =
            symconn::tensor_value(symconn::lie_deriv_jets(cj, one, zero, tj));
        CHECK(lie[0] == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(lie[1] == doctest::Approx(0.8).epsilon(1e-14));
        CHECK(lie[2] == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("B(Pi) on the worked cubic with one y slot") {
    // Pi_xxy = 1, all other independent components zero. Raising the third
    // slot gives Pi_xx^x = 1 and Pi_xy^y = -1, so B_xx = 2 and the rest
    // vanish.
    const TensorJets pi = constant_tensor(3, {0.0, 1.0, 0.0, 0.0});
    const SymCov b = symconn::tensor_value(symconn::b_of_pi_jets(pi));
    CHECK(b[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b[2] == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(symconn::b_of_pi_jets(constant_tensor(2, {1.0, 0.0, 0.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(symconn::t_of_pi_jets(constant_tensor(2, {1.0, 0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("deform applies the slot map and inverts cleanly") {
    const ChartConnection base = curved_connection();
    const SymCovField pi(
        3, {symconn::parse_or_throw("0.3 + x"), symconn::parse_or_throw("0.2 * y"),
            symconn::parse_or_throw("0.05 - 0.1 * x"),
            symconn::parse_or_throw("0.4")});
    const double t = 0.37;
    const ChartConnection moved = symconn::deform(base, pi, t);
    const ChartConnection back = symconn::deform(moved, pi, -t);

    const double x0 = 0.5;
    const double y0 = -0.8;
    const ConnJets cb = base.jets_at(x0, y0, 2);
    const ConnJets cm = moved.jets_at(x0, y0, 2);
    const ConnJets cr = back.jets_at(x0, y0, 2);
    const SymCov pv = pi.value_at(x0, y0);

    // Lowered cubic slots (Pi_xxx, Pi_xxy, Pi_xyy, Pi_yyy) map to
    // (A, B, C, D) increments (+pi[1], -pi[0], +pi[3], -pi[2]).
    CHECK(cm.a.value() ==
          doctest::Approx(cb.a.value() + t * pv[1]).epsilon(1e-14));
    CHECK(cm.b.value() ==
          doctest::Approx(cb.b.value() - t * pv[0]).epsilon(1e-14));
    CHECK(cm.c.value() ==
          doctest::Approx(cb.c.value() + t * pv[3]).epsilon(1e-14));
    CHECK(cm.d.value() ==
          doctest::Approx(cb.d.value() - t * pv[2]).epsilon(1e-14));

    CHECK(cr.a.value() == doctest::Approx(cb.a.value()).epsilon(1e-14));
    CHECK(cr.b.value() == doctest::Approx(cb.b.value()).epsilon(1e-14));
    CHECK(cr.c.value() == doctest::Approx(cb.c.value()).epsilon(1e-14));
    CHECK(cr.d.value() == doctest::Approx(cb.d.value()).epsilon(1e-14));
}

TEST_CASE("variation coefficients match an exact cubic fit in t") {
    const ChartConnection base = curved_connection();
    const SymCovField pi(
        3, {symconn::parse_or_throw("0.3 + x"), symconn::parse_or_throw("0.2 * y"),
            symconn::parse_or_throw("0.05 - 0.1 * x"),
            symconn::parse_or_throw("0.4")});
    const std::vector<double> nodes = {-0.2, -0.1, 0.1, 0.2};
    const double pts[][2] = {{0.3, 0.6}, {-0.7, 0.1}, {0.2, -0.9}};

    for (const auto& p : pts) {
        const symconn::VariationCoeffs vr =
            symconn::variation_rho(base, pi, p[0], p[1]);
        const symconn::VariationCoeffs vk =
            symconn::variation_k(base, pi, p[0], p[1]);

        for (int comp = 0; comp < 2; ++comp) {
            std::vector<double> vals;
            for (double t : nodes) {
                vals.push_back(
                    symconn::rho(symconn::deform(base, pi, t), p[0], p[1])[comp]);
            }
            const auto fit = symconn::testing::poly_fit(nodes, vals);
            for (int i = 0; i < 4; ++i) {
                CHECK(vr.c[i][comp] ==
                      doctest::Approx(fit[i]).epsilon(1e-9).scale(1.0));
            }
        }

        std::vector<double> kvals;
        for (double t : nodes) {
            kvals.push_back(symconn::moment_k(symconn::deform(base, pi, t),
                                              p[0], p[1]));
        }
        const auto kfit = symconn::testing::poly_fit(nodes, kvals);
        for (int i = 0; i < 4; ++i) {
            CHECK(vk.c[i][0] ==
                  doctest::Approx(kfit[i]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("operator identities hold on a generic polynomial connection") {
    const ChartConnection conn = curved_connection();
    const auto report = symconn::identity_suite(conn, conn.sample_points(20, 41));
    CHECK(report.grad_decompose < 1e-9);
    CHECK(report.delta_commutator < 1e-9);
    CHECK(report.hsth_bracket < 1e-9);
    CHECK(report.sdast_rho_chain < 1e-8);
    CHECK(report.full_nabla_dk < 1e-8);
}

TEST_CASE("Jacobi operator vanishes on constant tensors over the flat model") {
    const ChartConnection flat = flat_connection();
    const SymCovField gamma(
        3, {symconn::parse_or_throw("1"), symconn::parse_or_throw("0.5"),
            symconn::parse_or_throw("-0.25"), symconn::parse_or_throw("2")});
    const SymCov j = symconn::jacobi(flat, gamma, 0.3, 0.4);
    for (int comp = 0; comp <= 3; ++comp) {
        CHECK(std::abs(j[comp]) < 1e-12);
    }
}

TEST_CASE("SymCovField validates its component count") {
    CHECK_THROWS_AS(SymCovField(2, {symconn::parse_or_throw("1")}),
                    std::invalid_argument);
    const SymCovField s = SymCovField::scalar(symconn::parse_or_throw("x + y"));
    CHECK(s.degree() == 0);
    CHECK(s.value_at(1.0, 2.0)[0] == 3.0);
}
