#pragma once

#include <array>
#include <vector>

#include "symconn/connection.hpp"
#include "symconn/expr.hpp"
#include "symconn/jet.hpp"
#include "symconn/tensor2d.hpp"

namespace symconn {

struct Region;
struct Rule;

/// Jets of the k+1 components of a symmetric covariant k-tensor field at
/// one point, all of one order. Degree 0 is a scalar.
struct TensorJets {
    int degree;
    std::vector<Jet2> comps;

    int order() const { return comps.front().order(); }
};

/// Component values of tensor jets at the base point.
SymCov tensor_value(const TensorJets& t);

/// A symmetric covariant k-tensor field on a chart, componentwise
/// expression trees; component j carries j y-indices.
class SymCovField {
public:
    SymCovField(int degree, std::vector<ExprAst> comps);

    static SymCovField scalar(ExprAst f);

    int degree() const { return degree_; }
    const std::vector<ExprAst>& components() const { return comps_; }

    TensorJets jets_at(double x, double y, int order) const;
    SymCov value_at(double x, double y) const;

private:
    int degree_;
    std::vector<ExprAst> comps_;
};

/// Coefficients of the (exactly cubic) expansion in t of rho or K along
/// the pencil conn + t Pi; c[i] multiplies t^i. Degree 1 entries for rho,
/// degree 0 for K.
struct VariationCoeffs {
    std::array<SymCov, 4> c;
};

/// Max residuals of the operator identities over a sample set. Entries
/// (i)-(v) are theorems for any connection; preferred_nabla_dk is the
/// two-term form valid exactly when the symmetrized Ricci derivative
/// vanishes, reported unconditionally for the caller to interpret.
struct IdentityReport {
    double grad_decompose;    // (i)  grad into delta* and delta parts
    double delta_commutator;  // (ii) (k+1) dd* + k d*d vs curvature term
    double hsth_bracket;      // (iii) H*H(f) = {f, K}
    double sdast_rho_chain;   // (iv) delta* rho = 2 delta* delta Ric = -3 delta delta* Ric
    double full_nabla_dk;     // (v)  five-term formula for grad dK
    double preferred_nabla_dk;// (vi) grad dK = (1/6) rho rho - K Ric
};

// Jet-level calculus. Every operation consumes one jet order per
// derivative taken; operand orders are reconciled by truncation.

/// Ricci tensor of the connection as degree-2 tensor jets (order - 1).
TensorJets ricci_tensor_jets(const ConnJets& cj);

/// Covariant derivative grad_x T and grad_y T (same degree, order - 1).
TensorJets covd_x_jets(const ConnJets& cj, const TensorJets& t);
TensorJets covd_y_jets(const ConnJets& cj, const TensorJets& t);

/// delta T, degree k-1: contraction of grad with the raised last index.
TensorJets delta_jets(const ConnJets& cj, const TensorJets& t);

/// delta* T = -sym(grad T), degree k+1.
TensorJets delta_star_jets(const ConnJets& cj, const TensorJets& t);

/// Normalized symmetric product, degree a+b.
TensorJets sym_product_jets(const TensorJets& a, const TensorJets& b);

/// Scalar jet of the degree-k pairing density of equal-degree operands.
Jet2 pairing_density_jets(const TensorJets& a, const TensorJets& b);

/// L(Xflat) = delta*^2 Xflat + Xflat sym Ric, degree 3 (order - 2).
TensorJets lop_jets(const ConnJets& cj, const TensorJets& xflat);

/// H(f) = delta*^3 f - df sym Ric, degree 3 (order of f - 3).
TensorJets hop_jets(const ConnJets& cj, const Jet2& f);

/// L*(P)_i = -delta^2 P_i + P_i^{ab} R_ab, degree 1 (order - 2).
TensorJets lop_adjoint_jets(const ConnJets& cj, const TensorJets& p);

/// H*(P) = delta L*(P), scalar (order - 3).
Jet2 hop_adjoint_jet(const ConnJets& cj, const TensorJets& p);

/// Lie derivative of a symmetric tensor field along the vector field with
/// component jets (xx, xy). Connection-independent for torsion-free
/// connections; the covariant form is used so jets line up.
TensorJets lie_deriv_jets(const ConnJets& cj, const Jet2& xx, const Jet2& xy,
                          const TensorJets& t);

/// B(Pi)_ij = Pi_ip^q Pi_jq^p from the lowered cubic, degree 2, algebraic.
TensorJets b_of_pi_jets(const TensorJets& pi);

/// T(Pi)_i = Pi_ia^b B(Pi)_b^a, degree 1, algebraic.
TensorJets t_of_pi_jets(const TensorJets& pi);

// Point evaluations (fields supply jets internally).

SymCov covdiv(const ChartConnection& conn, const SymCovField& t, double x, double y);
SymCov covdiv_adjoint(const ChartConnection& conn, const SymCovField& t, double x,
                      double y);
SymCov lop(const ChartConnection& conn, const SymCovField& xflat, double x, double y);
SymCov hop(const ChartConnection& conn, const ExprAst& f, double x, double y);
SymCov lop_adjoint(const ChartConnection& conn, const SymCovField& p, double x,
                   double y);
double hop_adjoint(const ChartConnection& conn, const SymCovField& p, double x,
                   double y);

/// rho(conn + t Pi) = c0 + t c1 + t^2 c2 + t^3 c3 with c1 = -2 L*(Pi),
/// c2 = -2 (delta B(Pi) + Pi_jpq (delta Pi)^pq), c3 = -2 T(Pi).
VariationCoeffs variation_rho(const ChartConnection& conn, const SymCovField& pi,
                              double x, double y);

/// K(conn + t Pi) = K + t H*(Pi) + (t^2/2) delta(Pi * Pi) + t^3 delta T(Pi)
/// with (Pi * Pi)_i = 3 delta B(Pi)_i - Pi^abc grad_i Pi_abc.
VariationCoeffs variation_k(const ChartConnection& conn, const SymCovField& pi,
                            double x, double y);

/// Jacobi operator J(alpha) = H(H*(alpha)) + Lie_{H_K} alpha, degree 3.
SymCov jacobi(const ChartConnection& conn, const SymCovField& alpha, double x,
              double y);

/// Hessian 2 <H* alpha, H* beta> + 2 <Lie_{H_K} alpha, beta> of the energy
/// by quadrature; fields should be periodic over the region.
double second_variation(const ChartConnection& conn, const SymCovField& alpha,
                        const SymCovField& beta, const Region& region,
                        const Rule& rule);

/// Max residuals of the six operator identities over the sample points,
/// with internally fixed generic polynomial test fields.
IdentityReport identity_suite(const ChartConnection& conn,
                              const std::vector<std::array<double, 2>>& points);

/// Connection obtained by adding t * Pi (lowered components) to conn via
/// the slot map (Pi_xxx, Pi_xxy, Pi_xyy, Pi_yyy) = (-B, A, -D, C).
ChartConnection deform(const ChartConnection& conn, const SymCovField& pi, double t);

}  // namespace symconn
