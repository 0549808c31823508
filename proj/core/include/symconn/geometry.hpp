#pragma once

#include <string>
#include <vector>

#include "symconn/connection.hpp"
#include "symconn/tensor2d.hpp"

namespace symconn {

/// Instantaneous geodesic data: position, velocity, and parameter time.
struct GeodesicState {
    double x = 0.0;
    double y = 0.0;
    double xdot = 0.0;
    double ydot = 0.0;
    double t = 0.0;
};

/// Why an integration ended.
enum class StopReason {
    kCompleted,     ///< reached the requested final time
    kDomainExit,    ///< a stage evaluation left the connection domain
    kStepCollapse,  ///< step size shrank past the blow-up heuristic floor
};

/// Sampled geodesic with the running value of rho(gammadot).
struct Trajectory {
    std::vector<GeodesicState> samples;
    std::vector<double> rho_gammadot;
    StopReason stop = StopReason::kCompleted;
    double t_end = 0.0;
};

/// Adaptive integrator controls; the defaults favor long-time conservation
/// checks over speed.
struct IntegratorControls {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 1e-3;
    double hmax = 0.1;
};

/// Pointwise structure data of a critical connection where tau - K^2 does
/// not vanish: the closed one-form sigma = (tau - K^2)^{-1} rho, the flat
/// metric k = dT^2 + sigma^2, and the potential T with dT = dK/(tau - K^2).
struct StructureProbe {
    double x = 0.0;
    double y = 0.0;
    double tau = 0.0;
    double moment = 0.0;
    OneFormVal sigma{1};
    double dsigma_residual = 0.0;
    double dk_wedge_sigma_minus_omega = 0.0;
    SymCov k_metric{2};
    double gauss_curvature_of_k = 0.0;
    double t_value = 0.0;
};

/// Integrates the geodesic equations
///   xddot = -A xdot^2 + 2 D xdot ydot - C ydot^2,
///   yddot = -B xdot^2 + 2 A xdot ydot - D ydot^2
/// from init.t to t_max with an embedded 4(5) Runge-Kutta pair, sampling
/// the state at n_samples + 1 uniformly spaced output times (hit exactly by
/// clipping the step). Ends early with a tagged reason when a stage leaves
/// the connection domain or the accepted step collapses below the floor.
/// Throws std::invalid_argument for a bad initial state or sample count.
Trajectory geodesic_integrate(const ChartConnection& conn,
                              const GeodesicState& init, double t_max,
                              int n_samples,
                              const IntegratorControls& controls = {});

/// Max |rho(gammadot)(t) - rho(gammadot)(t0)| over the stored samples.
/// Constant exactly when delta* rho = 0; otherwise the drift is still
/// meaningful as a diagnostic but carries no conservation claim.
double conserved_rho_along(const Trajectory& traj);

/// Structure data at a point. Throws std::invalid_argument when the
/// connection is not critical there (|H(K)| > 1e-6) and std::domain_error
/// at degenerate points (|tau - K^2| <= 1e-8 (1 + |tau|)).
StructureProbe structure_probe(const ChartConnection& conn, double x, double y);

/// Potential T(K) with dT = dK / (tau - K^2) for constant tau, branched by
/// the sign of tau: 1/K when tau vanishes, scaled atanh in K/sqrt(tau) or
/// its reciprocal for tau > 0, a shifted arctangent for tau < 0. Not
/// defined where tau = K^2; callers gate on that.
double structure_t_value(double tau_value, double k_value);

/// First integral of the reduced geodesic equation of the strip family
/// with tau < 0: in the variable u with x + a = sqrt(-tau) sinh(u), the
/// quantity udot^2 + g(u) is constant along geodesics, with g the closed
/// form primitive of -2 f for the conservative force f. The angular
/// constant r = (tau - (x+a)^2) ydot is read from the state. Throws
/// std::invalid_argument when tau >= 0.
double reduced_energy_strip(double a, double p, double q, double tau,
                            const GeodesicState& s);

/// CSV serialization with header t,x,y,xdot,ydot,rho_gammadot and one row
/// per sample at 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace symconn
