#pragma once

#include <functional>

#include "symconn/connection.hpp"
#include "symconn/operators.hpp"

namespace symconn {

/// Integration region on a chart. Periodic rectangles mark the y axis as a
/// full period (closed trapezoid sums then match the periodic rule exactly);
/// the annulus trims positive margins off the x extent, for integrands whose
/// x-boundary behavior is singular.
struct Region {
    enum class Kind { kRectangle, kPeriodicRectangle, kAnnulusX };

    Kind kind = Kind::kRectangle;
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;
    double eps1 = 0.0;
    double eps2 = 0.0;

    static Region rectangle(double x0, double x1, double y0, double y1);
    static Region periodic_rectangle(double x0, double x1, double y0, double y1);
    static Region annulus_x(double x0, double x1, double y0, double y1, double eps1,
                            double eps2);
};

/// Tensor-product quadrature rule, one 1D rule per axis. Gauss-Legendre for
/// generic smooth integrands, trapezoid for periodic axes (spectral accuracy
/// on trigonometric polynomials). n counts nodes (Gauss) or subintervals
/// (trapezoid) and must lie in [2, 4096].
struct Rule {
    enum class Kind { kGaussLegendre, kTrapezoid };

    Kind kind_x = Kind::kGaussLegendre;
    int n_x = 64;
    Kind kind_y = Kind::kGaussLegendre;
    int n_y = 64;

    static Rule gauss_legendre(int n);
    static Rule trapezoid(int n);
    static Rule mixed(Kind kx, int nx, Kind ky, int ny);
    /// GL-64 on x, trapezoid-256 on y: the default for y-periodic charts.
    static Rule default_periodic();
};

/// Tensor-product quadrature of a pointwise field over the region, summed
/// pairwise in a fixed order for reproducibility. Throws on a non-finite
/// sample, reporting the node location.
double integrate(const Region& region, const Rule& rule,
                 const std::function<double(double, double)>& field);

/// Energy integral of the moment map, integral of K^2 dx dy.
double energy(const ChartConnection& conn, const Region& region, const Rule& rule);

/// Boundary flux of the one-form K rho over the two y-circles of the
/// connection's domain rectangle:
///   -loop integral at x = x1 - eps2, plus loop integral at x = x0 + eps1,
/// each a 1D trapezoid integral of K rho_y in y with n subintervals.
double boundary_flux_k_rho(const ChartConnection& conn, double eps1, double eps2,
                           int n = 1024);

/// Integral of the pairing density of two equal-degree tensor fields.
double pairing(const SymCovField& a, const SymCovField& b, const Region& region,
               const Rule& rule);

}  // namespace symconn
