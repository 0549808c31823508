#include "symconn/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "symconn/jet.hpp"

namespace symconn {

namespace {

constexpr double kCriticalTol = 1e-6;
constexpr double kStepFloorScale = 1e-14;
constexpr double kNearZeroTau = 1e-12;
constexpr double kProbeStep = 1e-3;

using State = std::array<double, 4>;

State rhs(const ChartConnection& conn, const State& u) {
    const ConnJets cj = conn.jets_at(u[0], u[1], 0);
    const double a = cj.a.value();
    const double b = cj.b.value();
    const double c = cj.c.value();
    const double d = cj.d.value();
    const double xd = u[2];
    const double yd = u[3];
    return {xd, yd, -a * xd * xd + 2.0 * d * xd * yd - c * yd * yd,
            -b * xd * xd + 2.0 * a * xd * yd - d * yd * yd};
}

double rho_pairing(const ChartConnection& conn, const State& u) {
    const OneFormVal r = rho(conn, u[0], u[1]);
    return r[0] * u[2] + r[1] * u[3];
}

bool finite_state(const State& u) {
    for (double v : u) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

// Dormand-Prince 4(5) pair with the first-same-as-last property.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = kB1 - 5179.0 / 57600.0, kE3 = kB3 - 7571.0 / 16695.0,
                 kE4 = kB4 - 393.0 / 640.0, kE5 = kB5 + 92097.0 / 339200.0,
                 kE6 = kB6 - 187.0 / 2100.0, kE7 = -1.0 / 40.0;

State axpy(const State& u, double h, const State& k, double w) {
    State r = u;
    for (int i = 0; i < 4; ++i) {
        r[i] += h * w * k[i];
    }
    return r;
}

struct StepResult {
    State u_new{};
    State k7{};
    double err = 0.0;
};

StepResult try_step(const ChartConnection& conn, const State& u,
                    const State& k1, double h,
                    const IntegratorControls& controls) {
    State s = axpy(u, h, k1, kA21);
    const State k2 = rhs(conn, s);
    s = axpy(axpy(u, h, k1, kA31), h, k2, kA32);
    const State k3 = rhs(conn, s);
    s = axpy(axpy(axpy(u, h, k1, kA41), h, k2, kA42), h, k3, kA43);
    const State k4 = rhs(conn, s);
    s = axpy(axpy(axpy(axpy(u, h, k1, kA51), h, k2, kA52), h, k3, kA53), h, k4,
             kA54);
    const State k5 = rhs(conn, s);
    s = axpy(axpy(axpy(axpy(axpy(u, h, k1, kA61), h, k2, kA62), h, k3, kA63),
                  h, k4, kA64),
             h, k5, kA65);
    const State k6 = rhs(conn, s);

    StepResult out;
    for (int i = 0; i < 4; ++i) {
        out.u_new[i] = u[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                                   kB5 * k5[i] + kB6 * k6[i]);
    }
    out.k7 = rhs(conn, out.u_new);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                              kE5 * k5[i] + kE6 * k6[i] + kE7 * out.k7[i]);
        const double sc = controls.atol +
                          controls.rtol *
                              std::max(std::abs(u[i]), std::abs(out.u_new[i]));
        acc += (e / sc) * (e / sc);
    }
    out.err = std::sqrt(acc / 4.0);
    return out;
}

GeodesicState to_geodesic_state(const State& u, double t) {
    GeodesicState g;
    g.x = u[0];
    g.y = u[1];
    g.xdot = u[2];
    g.ydot = u[3];
    g.t = t;
    return g;
}

/// Components (k_xx, k_xy, k_yy) of the flat metric k at a point; the
/// caller guarantees criticality, this rechecks only degeneracy.
std::array<double, 3> k_metric_values(const ChartConnection& conn, double x,
                                      double y) {
    const ConnJets cj = conn.jets_at(x, y, 4);
    const std::array<Jet2, 2> r = rho_jets(cj);
    const Jet2 mk = moment_k_jet(cj);
    const double tau = tau_jet(cj).value();
    const double denom = tau - mk.value() * mk.value();
    if (std::abs(denom) <= kSingularTol * (1.0 + std::abs(tau))) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "degenerate point (%.17g, %.17g): tau - K^2 vanishes", x,
                      y);
        throw std::domain_error(buf);
    }
    const double tx = mk.partial(1, 0) / denom;
    const double ty = mk.partial(0, 1) / denom;
    const double sx = r[0].value() / denom;
    const double sy = r[1].value() / denom;
    return {tx * tx + sx * sx, tx * ty + sx * sy, ty * ty + sy * sy};
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Gauss curvature of k via the Brioschi formula on central finite
/// differences of a 3 x 3 probe stencil with spacing h.
double gauss_of_k_fd(const ChartConnection& conn, double x, double y,
                     double h) {
    std::array<double, 3> kv[3][3];
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            kv[i + 1][j + 1] = k_metric_values(conn, x + i * h, y + j * h);
        }
    }
    const auto comp = [&kv](int slot, int i, int j) {
        return kv[i + 1][j + 1][slot];
    };
    const double e = comp(0, 0, 0);
    const double f = comp(1, 0, 0);
    const double g = comp(2, 0, 0);
    const double ex = (comp(0, 1, 0) - comp(0, -1, 0)) / (2.0 * h);
    const double ey = (comp(0, 0, 1) - comp(0, 0, -1)) / (2.0 * h);
    const double eyy =
        (comp(0, 0, 1) - 2.0 * comp(0, 0, 0) + comp(0, 0, -1)) / (h * h);
    const double fx = (comp(1, 1, 0) - comp(1, -1, 0)) / (2.0 * h);
    const double fy = (comp(1, 0, 1) - comp(1, 0, -1)) / (2.0 * h);
    const double fxy = (comp(1, 1, 1) - comp(1, 1, -1) - comp(1, -1, 1) +
                        comp(1, -1, -1)) /
                       (4.0 * h * h);
    const double gx = (comp(2, 1, 0) - comp(2, -1, 0)) / (2.0 * h);
    const double gy = (comp(2, 0, 1) - comp(2, 0, -1)) / (2.0 * h);
    const double gxx =
        (comp(2, 1, 0) - 2.0 * comp(2, 0, 0) + comp(2, -1, 0)) / (h * h);

    const std::array<std::array<double, 3>, 3> m1 = {{
        {-0.5 * eyy + fxy - 0.5 * gxx, 0.5 * ex, fx - 0.5 * ey},
        {fy - 0.5 * gx, e, f},
        {0.5 * gy, f, g},
    }};
    const std::array<std::array<double, 3>, 3> m2 = {{
        {0.0, 0.5 * ey, 0.5 * gx},
        {0.5 * ey, e, f},
        {0.5 * gx, f, g},
    }};
    const double det_g = e * g - f * f;
    return (det3(m1) - det3(m2)) / (det_g * det_g);
}

}  // namespace

Trajectory geodesic_integrate(const ChartConnection& conn,
                              const GeodesicState& init, double t_max,
                              int n_samples, const IntegratorControls& controls) {
    const State u0 = {init.x, init.y, init.xdot, init.ydot};
    if (!finite_state(u0) || !std::isfinite(init.t)) {
        throw std::invalid_argument("initial state is not finite");
    }
    if (!conn.domain().contains(init.x, init.y)) {
        throw std::invalid_argument("initial state outside connection domain");
    }
    if (n_samples < 1) {
        throw std::invalid_argument("sample count must be positive");
    }
    if (!(t_max > init.t)) {
        throw std::invalid_argument("final time must exceed initial time");
    }
    if (!(controls.rtol > 0.0) || !(controls.atol > 0.0) ||
        !(controls.h0 > 0.0) || !(controls.hmax > 0.0)) {
        throw std::invalid_argument("integrator controls must be positive");
    }

    Trajectory traj;
    traj.samples.push_back(init);
    traj.rho_gammadot.push_back(rho_pairing(conn, u0));
    traj.t_end = init.t;

    State u = u0;
    double t = init.t;
    double h = std::min(controls.h0, controls.hmax);
    State k1;
    try {
        k1 = rhs(conn, u);
    } catch (const std::domain_error&) {
        traj.stop = StopReason::kDomainExit;
        return traj;
    }

    const double span = t_max - init.t;
    for (int next_out = 1; next_out <= n_samples;) {
        const double t_target =
            init.t + span * (static_cast<double>(next_out) / n_samples);
        const bool clipped = t + 1.01 * h >= t_target;
        const double h_try = clipped ? t_target - t : h;
        if (h_try < kStepFloorScale * std::max(1.0, std::abs(t))) {
            traj.stop = StopReason::kStepCollapse;
            traj.t_end = t;
            return traj;
        }

        StepResult step;
        try {
            step = try_step(conn, u, k1, h_try, controls);
        } catch (const std::domain_error&) {
            traj.stop = StopReason::kDomainExit;
            traj.t_end = t;
            return traj;
        }
        if (!std::isfinite(step.err) || !finite_state(step.u_new)) {
            h = 0.2 * h_try;
            continue;
        }
        if (step.err > 1.0) {
            const double factor =
                std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
            h = h_try * std::min(factor, 1.0);
            continue;
        }

        t = clipped ? t_target : t + h_try;
        u = step.u_new;
        k1 = step.k7;
        traj.t_end = t;
        if (clipped) {
            traj.samples.push_back(to_geodesic_state(u, t));
            try {
                traj.rho_gammadot.push_back(rho_pairing(conn, u));
            } catch (const std::domain_error&) {
                traj.rho_gammadot.push_back(
                    std::numeric_limits<double>::quiet_NaN());
                traj.stop = StopReason::kDomainExit;
                return traj;
            }
            ++next_out;
        } else {
            const double factor =
                std::clamp(0.9 * std::pow(std::max(step.err, 1e-16), -0.2),
                           0.2, 5.0);
            h = std::min(h_try * factor, controls.hmax);
        }
    }
    traj.stop = StopReason::kCompleted;
    return traj;
}

double conserved_rho_along(const Trajectory& traj) {
    if (traj.rho_gammadot.empty()) {
        return 0.0;
    }
    const double base = traj.rho_gammadot.front();
    double drift = 0.0;
    for (double v : traj.rho_gammadot) {
        drift = std::max(drift, std::abs(v - base));
    }
    return drift;
}

StructureProbe structure_probe(const ChartConnection& conn, double x, double y) {
    const SymCov hk = hop_k_closed_form(conn, x, y);
    double hk_max = 0.0;
    for (int j = 0; j <= 3; ++j) {
        hk_max = std::max(hk_max, std::abs(hk[j]));
    }
    if (hk_max > kCriticalTol) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "connection is not critical: |H(K)| = %.3g at "
                      "(%.17g, %.17g)",
                      hk_max, x, y);
        throw std::invalid_argument(buf);
    }

    const ConnJets cj = conn.jets_at(x, y, 6);
    const std::array<Jet2, 2> r = rho_jets(cj);
    const Jet2 mk = moment_k_jet(cj);
    const Jet2 tj = tau_jet(cj);
    const double tau = tj.value();
    const double kval = mk.value();
    const double denom = tau - kval * kval;
    if (std::abs(denom) <= kSingularTol * (1.0 + std::abs(tau))) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "degenerate point (%.17g, %.17g): tau - K^2 vanishes", x,
                      y);
        throw std::domain_error(buf);
    }

    const int ord = tj.order();
    const Jet2 mk_t = jet_truncate(mk, ord);
    const Jet2 recip = jet_reciprocal(tj - mk_t * mk_t);
    const Jet2 sx = recip * jet_truncate(r[0], ord);
    const Jet2 sy = recip * jet_truncate(r[1], ord);

    StructureProbe probe;
    probe.x = x;
    probe.y = y;
    probe.tau = tau;
    probe.moment = kval;
    probe.sigma = OneFormVal(1, {sx.value(), sy.value()});
    probe.dsigma_residual = std::abs(sx.partial(0, 1) - sy.partial(1, 0));
    probe.dk_wedge_sigma_minus_omega = std::abs(
        mk.partial(1, 0) * sy.value() - mk.partial(0, 1) * sx.value() - 1.0);

    const double tx = mk.partial(1, 0) / denom;
    const double ty = mk.partial(0, 1) / denom;
    probe.k_metric = SymCov(
        2, {tx * tx + sx.value() * sx.value(), tx * ty + sx.value() * sy.value(),
            ty * ty + sy.value() * sy.value()});

    probe.t_value = structure_t_value(tau, kval);

    const double coarse = gauss_of_k_fd(conn, x, y, kProbeStep);
    const double fine = gauss_of_k_fd(conn, x, y, 0.5 * kProbeStep);
    probe.gauss_curvature_of_k = (4.0 * fine - coarse) / 3.0;
    return probe;
}

double structure_t_value(double tau_value, double k_value) {
    if (std::abs(tau_value) < kNearZeroTau) {
        return 1.0 / k_value;
    }
    if (tau_value > 0.0) {
        const double root = std::sqrt(tau_value);
        return k_value * k_value < tau_value
                   ? std::atanh(k_value / root) / root
                   : std::atanh(root / k_value) / root;
    }
    const double root = std::sqrt(-tau_value);
    const double half_pi = std::acos(0.0);
    return (half_pi - std::atan(k_value / root)) / root;
}

double reduced_energy_strip(double a, double p, double q, double tau,
                            const GeodesicState& st) {
    if (!(tau < 0.0)) {
        throw std::invalid_argument(
            "reduced energy needs tau < 0 (hyperbolic substitution)");
    }
    const double w = std::sqrt(-tau);
    const double xs = st.x + a;
    const double s = xs / w;
    const double one_plus_s2 = 1.0 + s * s;
    // udot for x + a = w sinh(u): udot = xdot / (w cosh u) and
    // (w cosh u)^2 = w^2 + (x+a)^2.
    const double udot2 = st.xdot * st.xdot / (w * w + xs * xs);
    const double r = (tau - xs * xs) * st.ydot;
    // Closed-form primitive g with g' = -2 f along the substitution.
    const double g = r * r / (6.0 * w * w * w) *
                     ((w * w + q) * std::atan(s) +
                      ((q - w * w) * s - p * w) / one_plus_s2);
    return udot2 + g;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,y,xdot,ydot,rho_gammadot\n";
    char buf[220];
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const GeodesicState& s = traj.samples[i];
        const double rg =
            i < traj.rho_gammadot.size()
                ? traj.rho_gammadot[i]
                : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x, s.y,
                      s.xdot, s.ydot, rg);
        out += buf;
    }
    return out;
}

}  // namespace symconn
