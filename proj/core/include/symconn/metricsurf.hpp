#pragma once

#include <array>
#include <vector>

#include "symconn/connection.hpp"
#include "symconn/expr.hpp"
#include "symconn/operators.hpp"
#include "symconn/tensor2d.hpp"

namespace symconn {

/// Value of a (1,1)-tensor; entry `ij` is T_i^j with i the lower index,
/// slots ordered (x, y).
struct Mat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yx = 0.0;
    double yy = 0.0;
};

/// Riemannian metric on a Darboux chart with unit symplectic volume:
/// components g11 dx^2 + 2 g12 dx dy + g22 dy^2 with g11 g22 - g12^2 = 1,
/// so the Levi-Civita connection preserves dx ^ dy. Positivity is checked
/// at every jet evaluation; the determinant condition is enforced by
/// levi_civita, where its failure has a geometric meaning.
class MetricChart {
public:
    enum class Builtin { kNone, kFlat, kSphere, kHyperbolic };

    MetricChart(ExprAst g11, ExprAst g12, ExprAst g22, Domain domain);

    static MetricChart flat();
    /// Round-sphere chart (1-x^2)^{-1} dx^2 + (1-x^2) dy^2 on
    /// (-1,1) x [0,2pi), y-periodic, poles excluded.
    static MetricChart sphere_chart();
    /// Hyperbolic chart y^2 dx^2 + y^{-2} dy^2 on a box in y < 0.
    static MetricChart hyperbolic_chart();

    const ExprAst& g11() const { return g11_; }
    const ExprAst& g12() const { return g12_; }
    const ExprAst& g22() const { return g22_; }
    const Domain& domain() const { return dom_; }
    Builtin builtin() const { return builtin_; }

    /// Jets of (g11, g12, g22). Throws std::domain_error outside the domain
    /// or where the metric is not positive definite.
    std::array<Jet2, 3> jets_at(double x, double y, int order) const;

    /// Seeded rejection sampling of domain points, as on connections.
    std::vector<std::array<double, 2>> sample_points(int count, unsigned seed) const;

private:
    MetricChart(ExprAst g11, ExprAst g12, ExprAst g22, Domain domain,
                Builtin builtin);

    ExprAst g11_;
    ExprAst g12_;
    ExprAst g22_;
    Domain dom_;
    Builtin builtin_;
};

/// Levi-Civita connection of a unit-determinant metric as chart fields,
/// A = Gamma^x_xx, B = Gamma^y_xx, C = Gamma^x_yy, D = Gamma^y_yy. The
/// unit determinant forces Gamma^x_xy = -D and Gamma^y_xy = -A; both are
/// verified at seeded samples and a violation throws "volume not parallel".
ChartConnection levi_civita(const MetricChart& m);

/// Scalar curvature R_g = 2 * Gauss curvature, via the Brioschi formula
/// evaluated on metric jets.
double scalar_curvature(const MetricChart& m, double x, double y);

/// Laplace-Beltrami operator of the unit-determinant metric applied to f.
double laplacian(const MetricChart& m, const ExprAst& f, double x, double y);

/// End-to-end consistency |2 K(levi_civita(m)) - Lap_g R_g| at a point,
/// the two sides computed through unrelated pipelines.
double kahler_moment_residual(const MetricChart& m, double x, double y);

/// Complex structure J_i^j determined by g_ij = -J_i^p Om_pj.
Mat2 complex_structure(const MetricChart& m, double x, double y);

/// Hodge star on one-forms, (star alpha)_i = s J_i^p alpha_p with the
/// global sign s fixed once by the rho(D) = -star d R_g calibration check.
OneFormVal hodge_star_oneform(const MetricChart& m, const OneFormVal& alpha,
                              double x, double y);

/// Full metric norm |Pi|^2_g of a symmetric cubic tensor field at a point;
/// equals Pi_xxx^2 + 3 Pi_xxy^2 + 3 Pi_xyy^2 + Pi_yyy^2 for the flat metric.
double cubic_norm(const MetricChart& m, const SymCovField& pi, double x, double y);

/// Max |g-trace of Pi| plus max |Levi-Civita divergence of Pi| at a point;
/// both vanish exactly when Pi is the real part of a holomorphic cubic
/// differential for the metric's conformal structure.
double holomorphicity_residual(const MetricChart& m, const SymCovField& pi,
                               double x, double y);

/// Hessian determinant of f on the flat chart, f_xx f_yy - f_xy^2.
double hessdet(const ExprAst& f, double x, double y);

/// U(f) = f_x^2 f_yy - 2 f_x f_y f_xy + f_y^2 f_xx, the adjugate-Hessian
/// contraction with df (x) df.
double u_of_f(const ExprAst& f, double x, double y);

}  // namespace symconn
