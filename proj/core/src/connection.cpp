#include "symconn/connection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace symconn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Binary jet helpers that reconcile operand orders by truncating to the
// smaller one; the closed forms below mix shifts of different depths.
Jet2 tr(const Jet2& j, int order) {
    return j.order() == order ? j : jet_truncate(j, order);
}

int common(const Jet2& p, const Jet2& q) {
    return std::min(p.order(), q.order());
}

Jet2 mul(const Jet2& p, const Jet2& q) {
    const int n = common(p, q);
    return jet_mul(tr(p, n), tr(q, n));
}

Jet2 add(const Jet2& p, const Jet2& q) {
    const int n = common(p, q);
    return tr(p, n) + tr(q, n);
}

Jet2 sub(const Jet2& p, const Jet2& q) {
    const int n = common(p, q);
    return tr(p, n) - tr(q, n);
}

Jet2 sc(double s, const Jet2& p) { return p * s; }

std::string point_text(double x, double y) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", x, y);
    return buf;
}

}  // namespace

Domain Domain::all_plane() {
    return Domain{-kInf, kInf, -kInf, kInf, false, 0.0};
}

Domain Domain::rectangle(double x0, double x1, double y0, double y1) {
    return Domain{x0, x1, y0, y1, false, 0.0};
}

bool Domain::contains(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (x < x_min || x > x_max) return false;
    if (!periodic_y && (y < y_min || y > y_max)) return false;
    if (exclude_abs_x > 0.0 && std::abs(x) >= exclude_abs_x) return false;
    return true;
}

ChartConnection::ChartConnection(ExprAst a, ExprAst b, ExprAst c, ExprAst d,
                                 Domain domain)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)),
      dom_(domain) {
    if (!a_.root || !b_.root || !c_.root || !d_.root) {
        throw std::invalid_argument("connection field expression is empty");
    }
    if (!(dom_.x_min < dom_.x_max) || !(dom_.y_min < dom_.y_max)) {
        throw std::invalid_argument("connection domain has empty interior");
    }
}

ConnJets ChartConnection::jets_at(double x, double y, int order) const {
    if (!dom_.contains(x, y)) {
        throw std::domain_error("point " + point_text(x, y) +
                                " outside connection domain");
    }
    return ConnJets{eval_jet(a_, x, y, order), eval_jet(b_, x, y, order),
                    eval_jet(c_, x, y, order), eval_jet(d_, x, y, order)};
}

std::vector<std::array<double, 2>> ChartConnection::sample_points(
        int count, unsigned seed) const {
    if (count < 0) {
        throw std::invalid_argument("negative sample count");
    }
    const double x0 = std::isfinite(dom_.x_min) ? dom_.x_min : -1.0;
    const double x1 = std::isfinite(dom_.x_max) ? dom_.x_max : 1.0;
    const double y0 = std::isfinite(dom_.y_min) ? dom_.y_min : -1.0;
    const double y1 = std::isfinite(dom_.y_max) ? dom_.y_max : 1.0;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1);
    std::uniform_real_distribution<double> uy(y0, y1);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    int guard = 0;
    while (static_cast<int>(pts.size()) < count) {
        const double x = ux(rng);
        const double y = uy(rng);
        if (dom_.contains(x, y)) {
            pts.push_back({x, y});
        } else if (++guard > 1000 * (count + 1)) {
            throw std::runtime_error("domain sampling rejection limit reached");
        }
    }
    return pts;
}

std::array<Jet2, 3> ricci_jets(const ConnJets& cj) {
    const Jet2& a = cj.a;
    const Jet2& b = cj.b;
    const Jet2& c = cj.c;
    const Jet2& d = cj.d;
    const Jet2 a_x = jet_shift(a, 1, 0), a_y = jet_shift(a, 0, 1);
    const Jet2 b_y = jet_shift(b, 0, 1);
    const Jet2 c_x = jet_shift(c, 1, 0);
    const Jet2 d_x = jet_shift(d, 1, 0), d_y = jet_shift(d, 0, 1);
    // R_xx = A_x + B_y + 2(BD - A^2)
    const Jet2 r_xx = add(add(a_x, b_y), sc(2.0, sub(mul(b, d), mul(a, a))));
    // R_yy = C_x + D_y + 2(AC - D^2)
    const Jet2 r_yy = add(add(c_x, d_y), sc(2.0, sub(mul(a, c), mul(d, d))));
    // R_xy = -A_y - D_x + AD - BC
    const Jet2 r_xy = add(sub(sc(-1.0, a_y), d_x), sub(mul(a, d), mul(b, c)));
    const int n = cj.order() - 1;
    return {tr(r_xx, n), tr(r_xy, n), tr(r_yy, n)};
}

std::array<Jet2, 2> rho_jets(const ConnJets& cj) {
    const Jet2& a = cj.a;
    const Jet2& b = cj.b;
    const Jet2& c = cj.c;
    const Jet2& d = cj.d;
    const Jet2 a_x = jet_shift(a, 1, 0), a_y = jet_shift(a, 0, 1);
    const Jet2 b_y = jet_shift(b, 0, 1);
    const Jet2 c_x = jet_shift(c, 1, 0);
    const Jet2 d_x = jet_shift(d, 1, 0), d_y = jet_shift(d, 0, 1);
    const Jet2 a_xy = jet_shift(a, 1, 1), a_yy = jet_shift(a, 0, 2);
    const Jet2 b_yy = jet_shift(b, 0, 2);
    const Jet2 c_xx = jet_shift(c, 2, 0);
    const Jet2 d_xx = jet_shift(d, 2, 0), d_xy = jet_shift(d, 1, 1);
    const Jet2 ad_bc = sub(mul(a, d), mul(b, c));
    const Jet2 aa_bd = sub(mul(a, a), mul(b, d));
    const Jet2 ac_dd = sub(mul(a, c), mul(d, d));
    // -rho/2 along dx:
    //   -2A_xy - B_yy - D_xx + (AD-BC)_x + 3(A^2-BD)_y + 2AD_x - DA_x - BC_x
    Jet2 half_x = sc(-2.0, a_xy);
    half_x = sub(half_x, b_yy);
    half_x = sub(half_x, d_xx);
    half_x = add(half_x, jet_shift(ad_bc, 1, 0));
    half_x = add(half_x, sc(3.0, jet_shift(aa_bd, 0, 1)));
    half_x = add(half_x, sc(2.0, mul(a, d_x)));
    half_x = sub(half_x, mul(d, a_x));
    half_x = sub(half_x, mul(b, c_x));
    // -rho/2 along dy:
    //   2D_xy + A_yy + C_xx + 3(AC-D^2)_x - (AD-BC)_y - 2DA_y + AD_y + CB_y
    Jet2 half_y = sc(2.0, d_xy);
    half_y = add(half_y, a_yy);
    half_y = add(half_y, c_xx);
    half_y = add(half_y, sc(3.0, jet_shift(ac_dd, 1, 0)));
    half_y = sub(half_y, jet_shift(ad_bc, 0, 1));
    half_y = sub(half_y, sc(2.0, mul(d, a_y)));
    half_y = add(half_y, mul(a, d_y));
    half_y = add(half_y, mul(c, b_y));
    const int n = cj.order() - 2;
    return {tr(sc(-2.0, half_x), n), tr(sc(-2.0, half_y), n)};
}

Jet2 moment_k_jet(const ConnJets& cj) {
    const Jet2& a = cj.a;
    const Jet2& b = cj.b;
    const Jet2& c = cj.c;
    const Jet2& d = cj.d;
    const Jet2 a_x = jet_shift(a, 1, 0), a_y = jet_shift(a, 0, 1);
    const Jet2 b_x = jet_shift(b, 1, 0), b_y = jet_shift(b, 0, 1);
    const Jet2 c_x = jet_shift(c, 1, 0), c_y = jet_shift(c, 0, 1);
    const Jet2 d_x = jet_shift(d, 1, 0), d_y = jet_shift(d, 0, 1);
    // K = 3A_xyy + 3D_xxy + B_yyy + C_xxx - B_x C_y + B_y C_x
    //     + 3(A_x D_y - A_y D_x) + 3(AC - D^2)_xx + 3(BD - A^2)_yy
    //     - 3(AD - BC)_xy
    Jet2 k = sc(3.0, jet_shift(a, 1, 2));
    k = add(k, sc(3.0, jet_shift(d, 2, 1)));
    k = add(k, jet_shift(b, 0, 3));
    k = add(k, jet_shift(c, 3, 0));
    k = sub(k, mul(b_x, c_y));
    k = add(k, mul(b_y, c_x));
    k = add(k, sc(3.0, sub(mul(a_x, d_y), mul(a_y, d_x))));
    k = add(k, sc(3.0, jet_shift(sub(mul(a, c), mul(d, d)), 2, 0)));
    k = add(k, sc(3.0, jet_shift(sub(mul(b, d), mul(a, a)), 0, 2)));
    k = sub(k, sc(3.0, jet_shift(sub(mul(a, d), mul(b, c)), 1, 1)));
    return tr(k, cj.order() - 3);
}

std::array<Jet2, 6> nabla_ricci_jets(const ConnJets& cj) {
    const Jet2& a = cj.a;
    const Jet2& b = cj.b;
    const Jet2& c = cj.c;
    const Jet2& d = cj.d;
    const Jet2 a_x = jet_shift(a, 1, 0), a_y = jet_shift(a, 0, 1);
    const Jet2 b_y = jet_shift(b, 0, 1);
    const Jet2 c_x = jet_shift(c, 1, 0);
    const Jet2 d_x = jet_shift(d, 1, 0), d_y = jet_shift(d, 0, 1);
    const Jet2 bd_aa = sub(mul(b, d), mul(a, a));
    const Jet2 ac_dd = sub(mul(a, c), mul(d, d));
    const Jet2 ad_bc = sub(mul(a, d), mul(b, c));
    const Jet2 ax_by = add(a_x, b_y);    // A_x + B_y
    const Jet2 ay_dx = add(a_y, d_x);    // A_y + D_x
    const Jet2 cx_dy = add(c_x, d_y);    // C_x + D_y
    // (grad_X Ric)(X,X) = A_xx + B_xy + 2(BD - A^2)_x - 2A(A_x + B_y)
    //                     + 2B(A_y + D_x) - 6ABD + 4A^3 + 2B^2 C
    Jet2 xxx = add(jet_shift(a, 2, 0), jet_shift(b, 1, 1));
    xxx = add(xxx, sc(2.0, jet_shift(bd_aa, 1, 0)));
    xxx = sub(xxx, sc(2.0, mul(a, ax_by)));
    xxx = add(xxx, sc(2.0, mul(b, ay_dx)));
    xxx = sub(xxx, sc(6.0, mul(a, mul(b, d))));
    xxx = add(xxx, sc(4.0, mul(a, mul(a, a))));
    xxx = add(xxx, sc(2.0, mul(b, mul(b, c))));
    // (grad_Y Ric)(Y,Y) = C_xy + D_yy + 2(AC - D^2)_y + 2C(A_y + D_x)
    //                     - 2D(C_x + D_y) - 6ACD + 4D^3 + 2BC^2
    Jet2 yyy = add(jet_shift(c, 1, 1), jet_shift(d, 0, 2));
    yyy = add(yyy, sc(2.0, jet_shift(ac_dd, 0, 1)));
    yyy = add(yyy, sc(2.0, mul(c, ay_dx)));
    yyy = sub(yyy, sc(2.0, mul(d, cx_dy)));
    yyy = sub(yyy, sc(6.0, mul(a, mul(c, d))));
    yyy = add(yyy, sc(4.0, mul(d, mul(d, d))));
    yyy = add(yyy, sc(2.0, mul(b, mul(c, c))));
    // (grad_X Ric)(X,Y) = -A_xy - D_xx + (AD - BC)_x - B(C_x + D_y)
    //                     + D(A_x + B_y) + 4BD^2 - 2A^2 D - 2ABC
    Jet2 xxy = sub(sc(-1.0, jet_shift(a, 1, 1)), jet_shift(d, 2, 0));
    xxy = add(xxy, jet_shift(ad_bc, 1, 0));
    xxy = sub(xxy, mul(b, cx_dy));
    xxy = add(xxy, mul(d, ax_by));
    const Jet2 shared1 = sub(sc(4.0, mul(b, mul(d, d))),
                             add(sc(2.0, mul(a, mul(a, d)))
                                     , sc(2.0, mul(a, mul(b, c)))));
    xxy = add(xxy, shared1);
    // (grad_Y Ric)(X,X) = A_xy + B_yy + 2(BD - A^2)_y + 2D(A_x + B_y)
    //                     - 2A(A_y + D_x) + 4BD^2 - 2A^2 D - 2ABC
    Jet2 yxx = add(jet_shift(a, 1, 1), jet_shift(b, 0, 2));
    yxx = add(yxx, sc(2.0, jet_shift(bd_aa, 0, 1)));
    yxx = add(yxx, sc(2.0, mul(d, ax_by)));
    yxx = sub(yxx, sc(2.0, mul(a, ay_dx)));
    yxx = add(yxx, shared1);
    // (grad_X Ric)(Y,Y) = C_xx + D_xy + 2(AC - D^2)_x - 2D(A_y + D_x)
    //                     + 2A(C_x + D_y) + 4A^2 C - 2AD^2 - 2BCD
    Jet2 xyy = add(jet_shift(c, 2, 0), jet_shift(d, 1, 1));
    xyy = add(xyy, sc(2.0, jet_shift(ac_dd, 1, 0)));
    xyy = sub(xyy, sc(2.0, mul(d, ay_dx)));
    xyy = add(xyy, sc(2.0, mul(a, cx_dy)));
    const Jet2 shared2 = sub(sc(4.0, mul(a, mul(a, c))),
                             add(sc(2.0, mul(a, mul(d, d))),
                                 sc(2.0, mul(b, mul(c, d)))));
    xyy = add(xyy, shared2);
    // (grad_Y Ric)(X,Y) = -A_yy - D_xy + (AD - BC)_y + A(C_x + D_y)
    //                     - C(A_x + B_y) + 4A^2 C - 2AD^2 - 2BCD
    Jet2 yxy = sub(sc(-1.0, jet_shift(a, 0, 2)), jet_shift(d, 1, 1));
    yxy = add(yxy, jet_shift(ad_bc, 0, 1));
    yxy = add(yxy, mul(a, cx_dy));
    yxy = sub(yxy, mul(c, ax_by));
    yxy = add(yxy, shared2);
    const int n = cj.order() - 2;
    return {tr(xxx, n), tr(xxy, n), tr(xyy, n),
            tr(yxx, n), tr(yxy, n), tr(yyy, n)};
}

Jet2 tau_jet(const ConnJets& cj) {
    const Jet2 k = moment_k_jet(cj);
    const auto r = rho_jets(cj);
    const Jet2 k_x = jet_shift(k, 1, 0);
    const Jet2 k_y = jet_shift(k, 0, 1);
    // tau = K^2 + rho(H_K) = K^2 + rho_y K_x - rho_x K_y
    Jet2 t = mul(k, k);
    t = add(t, mul(r[1], k_x));
    t = sub(t, mul(r[0], k_y));
    return tr(t, cj.order() - 4);
}

SymCov ricci(const ChartConnection& conn, double x, double y) {
    const auto r = ricci_jets(conn.jets_at(x, y, 1));
    return SymCov(2, {r[0].value(), r[1].value(), r[2].value()});
}

NablaRicci nabla_ricci(const ChartConnection& conn, double x, double y) {
    const auto n = nabla_ricci_jets(conn.jets_at(x, y, 2));
    return NablaRicci{n[0].value(), n[1].value(), n[2].value(),
                      n[3].value(), n[4].value(), n[5].value()};
}

SymCov rho(const ChartConnection& conn, double x, double y) {
    const auto r = rho_jets(conn.jets_at(x, y, 2));
    return SymCov(1, {r[0].value(), r[1].value()});
}

double moment_k(const ChartConnection& conn, double x, double y) {
    return moment_k_jet(conn.jets_at(x, y, 3)).value();
}

SymCov hop_k_closed_form(const ChartConnection& conn, double x, double y) {
    const ConnJets cj = conn.jets_at(x, y, 6);
    const Jet2 k = moment_k_jet(cj);  // order 3
    const Jet2 k_x = jet_shift(k, 1, 0), k_y = jet_shift(k, 0, 1);
    const Jet2 k_xx = jet_shift(k, 2, 0), k_xy = jet_shift(k, 1, 1),
               k_yy = jet_shift(k, 0, 2);
    const Jet2& a = cj.a;
    const Jet2& b = cj.b;
    const Jet2& c = cj.c;
    const Jet2& d = cj.d;
    const Jet2 a_x = jet_shift(a, 1, 0), a_y = jet_shift(a, 0, 1);
    const Jet2 b_x = jet_shift(b, 1, 0), b_y = jet_shift(b, 0, 1);
    const Jet2 c_x = jet_shift(c, 1, 0), c_y = jet_shift(c, 0, 1);
    const Jet2 d_x = jet_shift(d, 1, 0), d_y = jet_shift(d, 0, 1);
    // The closed form gives -H(K); the returned tensor flips the sign so
    // criticality reads H(K) = 0 with H(f) = L(-df).
    // -H(K)_xxx = K_xxx - 3A K_xx - 3B K_xy + K_x B_y - B_x K_y
    Jet2 p = jet_shift(k, 3, 0);
    p = sub(p, sc(3.0, mul(a, k_xx)));
    p = sub(p, sc(3.0, mul(b, k_xy)));
    p = add(p, mul(k_x, b_y));
    p = sub(p, mul(b_x, k_y));
    // -H(K)_yyy = K_yyy - 3D K_yy - 3C K_xy + K_y C_x - C_y K_x
    Jet2 q = jet_shift(k, 0, 3);
    q = sub(q, sc(3.0, mul(d, k_yy)));
    q = sub(q, sc(3.0, mul(c, k_xy)));
    q = add(q, mul(k_y, c_x));
    q = sub(q, mul(c_y, k_x));
    // -H(K)_xxy = K_xxy + 2D K_xx - B K_yy + A K_xy + A_x K_y - A_y K_x
    Jet2 r = jet_shift(k, 2, 1);
    r = add(r, sc(2.0, mul(d, k_xx)));
    r = sub(r, mul(b, k_yy));
    r = add(r, mul(a, k_xy));
    r = add(r, mul(a_x, k_y));
    r = sub(r, mul(a_y, k_x));
    // -H(K)_xyy = K_xyy + 2A K_yy - C K_xx + D K_xy + D_y K_x - D_x K_y
    Jet2 s = jet_shift(k, 1, 2);
    s = add(s, sc(2.0, mul(a, k_yy)));
    s = sub(s, mul(c, k_xx));
    s = add(s, mul(d, k_xy));
    s = add(s, mul(d_y, k_x));
    s = sub(s, mul(d_x, k_y));
    return SymCov(3, {-p.value(), -r.value(), -s.value(), -q.value()});
}

double tau(const ChartConnection& conn, double x, double y) {
    return tau_jet(conn.jets_at(x, y, 4)).value();
}

SymCov sdast_ricci(const ChartConnection& conn, double x, double y) {
    const NablaRicci n = nabla_ricci(conn, x, y);
    return SymCov(3, {-n.xxx,
                      -(2.0 * n.xxy + n.yxx) / 3.0,
                      -(n.xyy + 2.0 * n.yxy) / 3.0,
                      -n.yyy});
}

SymCov sdast_rho(const ChartConnection& conn, double x, double y) {
    const ConnJets cj = conn.jets_at(x, y, 3);
    const auto r = rho_jets(cj);  // order 1
    const double rx = r[0].value(), ry = r[1].value();
    const double a = cj.a.value(), b = cj.b.value();
    const double c = cj.c.value(), d = cj.d.value();
    const double dxrx = r[0].partial(1, 0) - a * rx - b * ry;
    const double dxry = r[1].partial(1, 0) + d * rx + a * ry;
    const double dyrx = r[0].partial(0, 1) + d * rx + a * ry;
    const double dyry = r[1].partial(0, 1) - c * rx - d * ry;
    return SymCov(2, {-dxrx, -0.5 * (dxry + dyrx), -dyry});
}

CurvatureReport curvature_report(const ChartConnection& conn, double x, double y) {
    CurvatureReport rep;
    rep.x = x;
    rep.y = y;
    rep.ric = ricci(conn, x, y);
    rep.rho = rho(conn, x, y);
    rep.k = moment_k(conn, x, y);
    rep.tau = tau(conn, x, y);
    rep.hop_k = hop_k_closed_form(conn, x, y);
    rep.sdast_ric = sdast_ricci(conn, x, y);
    rep.sdast_rho = sdast_rho(conn, x, y);
    rep.near_singular =
            std::abs(rep.tau - rep.k * rep.k) <= kSingularTol * (1.0 + std::abs(rep.tau));
    return rep;
}

}  // namespace symconn
