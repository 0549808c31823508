#pragma once

#include "symconn/connection.hpp"
#include "symconn/expr.hpp"
#include "symconn/metricsurf.hpp"

namespace symconn {

/// One-parameter-area family on the strip where tau - (x+a)^2 != 0:
///   A = (x+a) / (tau - (x+a)^2), B = D = 0,
///   C = -(1/6) (tau - (x+a)^2) ((x+a)^2 + p (x+a) + q).
/// Moment map K = x + a; critical with conserved constant tau; preferred
/// exactly at q = tau; geodesically complete for tau < 0.
ChartConnection bourgeois_cahen_family(double a, double p, double q, double tau);

/// Polynomial critical family A = B = D = 0,
///   C = x^4/24 + a x^3/6 + b x^2/2 + c x + d,
/// with moment map K = C_xxx = x + a.
ChartConnection quartic_family(double a, double b, double c, double d);

/// Round-sphere chart family: Levi-Civita connection of the sphere metric
/// plus t/4 (1-x^2)^2 dy^3; critical for every t with K = (3/2) t x.
ChartConnection sphere_family(double t);

/// Moment-flat connection built from a graph function f on the flat
/// chart: A = f_x^2 f_y, B = -f_x^3, C = f_y^3, D = -f_x f_y^2.
ChartConnection cube_of_exact(const ExprAst& f);

/// Hyperbolic chart (y < 0) deformation of the Levi-Civita connection by
/// the cube of the Busemann-level differential, -dy^3; moment flat with
/// rho = -12 y^2 dy.
ChartConnection busemann_example();

/// Deformation of the metric's Levi-Civita connection by
/// Pi_ijk = 3 X_(i g_jk) for a one-form X = xu dx + xw dy, which must be
/// harmonic (closed and divergence free) for the metric; validated at
/// seeded samples, throwing std::invalid_argument otherwise.
ChartConnection harmonic_deformation(const MetricChart& m, const ExprAst& xu,
                                     const ExprAst& xw);

/// Deformation of the metric's Levi-Civita connection by the real part of
/// the cubic differential phi(z) dz^3, phi = phi_re + i phi_im given as
/// functions of (Re z, Im z). Supported charts: flat (z = x + iy) and
/// hyperbolic (z = x - i/y on y < 0). phi must satisfy the Cauchy-Riemann
/// equations at seeded samples.
ChartConnection cubic_diff_deformation(const MetricChart& m, const ExprAst& phi_re,
                                       const ExprAst& phi_im);

}  // namespace symconn
