#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "symconn/expr.hpp"
#include "symconn/jet.hpp"
#include "symconn/tensor2d.hpp"

namespace symconn {

/// Closed rectangle with optional y-periodicity and an optional symmetric
/// x-exclusion |x| >= exclude_abs_x (used by charts that degenerate at
/// x = +-1). Infinite extents are allowed.
struct Domain {
    double x_min;
    double x_max;
    double y_min;
    double y_max;
    bool periodic_y = false;
    double exclude_abs_x = 0.0;  // 0 means no exclusion

    static Domain all_plane();
    static Domain rectangle(double x0, double x1, double y0, double y1);

    bool contains(double x, double y) const;
};

/// Jets of the four chart fields at one point, all of the same order.
struct ConnJets {
    Jet2 a;
    Jet2 b;
    Jet2 c;
    Jet2 d;

    int order() const { return a.order(); }
};

/// Per-point curvature summary. near_singular marks |tau - k^2| within
/// kSingularTol * (1 + |tau|) of zero; values are still reported.
struct CurvatureReport {
    double x = 0.0;
    double y = 0.0;
    SymCov ric{2};
    SymCov rho{1};
    double k = 0.0;
    double tau = 0.0;
    SymCov hop_k{3};
    SymCov sdast_ric{3};
    SymCov sdast_rho{2};
    bool near_singular = false;
};

/// Six independent components of the covariant derivative of the Ricci
/// tensor; the first letter names the derivative direction.
struct NablaRicci {
    double xxx;  // (grad_X Ric)(X,X)
    double xxy;  // (grad_X Ric)(X,Y)
    double xyy;  // (grad_X Ric)(Y,Y)
    double yxx;  // (grad_Y Ric)(X,X)
    double yxy;  // (grad_Y Ric)(X,Y)
    double yyy;  // (grad_Y Ric)(Y,Y)
};

inline constexpr double kSingularTol = 1e-8;

/// A symplectic connection on a Darboux chart, parametrized by four scalar
/// fields: the difference tensor from the flat connection acts as
/// Pi(X,X) = A X + B Y, Pi(X,Y) = -D X - A Y, Pi(Y,Y) = C X + D Y, which
/// keeps dx ^ dy parallel for any A, B, C, D. The lowered cubic form has
/// components (Pi_xxx, Pi_xxy, Pi_xyy, Pi_yyy) = (-B, A, -D, C).
class ChartConnection {
public:
    ChartConnection(ExprAst a, ExprAst b, ExprAst c, ExprAst d, Domain domain);

    const ExprAst& field_a() const { return a_; }
    const ExprAst& field_b() const { return b_; }
    const ExprAst& field_c() const { return c_; }
    const ExprAst& field_d() const { return d_; }
    const Domain& domain() const { return dom_; }

    /// Jets of A, B, C, D at an interior point. Throws std::domain_error
    /// on domain violation.
    ConnJets jets_at(double x, double y, int order) const;

    /// Uniform sample points inside the domain avoiding exclusions, drawn
    /// by rejection from a seeded generator. Unbounded domains sample the
    /// box [-1,1]^2.
    std::vector<std::array<double, 2>> sample_points(int count, unsigned seed) const;

private:
    ExprAst a_;
    ExprAst b_;
    ExprAst c_;
    ExprAst d_;
    Domain dom_;
};

// Jet-level closed forms. Each returns jets of lower order than the input,
// as noted; input order must be high enough for the result order to be
// nonnegative.

/// Ricci tensor components (R_xx, R_xy, R_yy) as jets of order - 1.
std::array<Jet2, 3> ricci_jets(const ConnJets& cj);

/// Curvature one-form components (rho_x, rho_y) as jets of order - 2.
std::array<Jet2, 2> rho_jets(const ConnJets& cj);

/// Moment map K as a jet of order - 3.
Jet2 moment_k_jet(const ConnJets& cj);

/// The six NablaRicci component fields as jets of order - 2, in the order
/// xxx, xxy, xyy, yxx, yxy, yyy.
std::array<Jet2, 6> nabla_ricci_jets(const ConnJets& cj);

/// tau = K^2 + rho(H_K) as a jet of order - 4.
Jet2 tau_jet(const ConnJets& cj);

// Point evaluations.

SymCov ricci(const ChartConnection& conn, double x, double y);
NablaRicci nabla_ricci(const ChartConnection& conn, double x, double y);
SymCov rho(const ChartConnection& conn, double x, double y);
double moment_k(const ChartConnection& conn, double x, double y);

/// H(K) with the sign convention H(f) = L(-df); the closed form in use
/// computes -H(K) and flips.
SymCov hop_k_closed_form(const ChartConnection& conn, double x, double y);

double tau(const ChartConnection& conn, double x, double y);

/// delta* Ric = -grad_(i R_jk), assembled from the six NablaRicci
/// components by normalized symmetrization.
SymCov sdast_ricci(const ChartConnection& conn, double x, double y);

/// delta* rho = -grad_(i rho_j).
SymCov sdast_rho(const ChartConnection& conn, double x, double y);

/// All quantities above at one point, plus the near-singular flag.
CurvatureReport curvature_report(const ChartConnection& conn, double x, double y);

}  // namespace symconn
