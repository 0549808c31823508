#include "symconn/jet.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace symconn {

namespace {

// Triangular diagonal layout: entries sorted by total degree d = i+j,
// within a degree by j ascending. Independent of the jet order, so a
// table shift never re-indexes.
inline int pos(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
}

inline int table_size(int order) {
    return (order + 1) * (order + 2) / 2;
}

constexpr int kBinomMax = Jet2::kMaxOrder + 1;

const double* binom_row(int n) {
    static const auto table = [] {
        static double t[kBinomMax][kBinomMax] = {};
        for (int i = 0; i < kBinomMax; ++i) {
            t[i][0] = 1.0;
            for (int j = 1; j <= i; ++j) {
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0.0);
            }
        }
        return &t;
    }();
    return (*table)[n];
}

std::string describe(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Jet2::Jet2(int order) : order_(order), coeffs_(table_size(order), 0.0) {
    if (order < 0 || order > kMaxOrder) {
        throw std::invalid_argument("jet order out of range");
    }
}

Jet2::Jet2(int order, std::vector<double> coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
    if (order < 0 || order > kMaxOrder) {
        throw std::invalid_argument("jet order out of range");
    }
    validate();
}

void Jet2::validate() const {
    if (static_cast<int>(coeffs_.size()) != table_size(order_)) {
        throw std::invalid_argument("jet coefficient count does not match order");
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw std::domain_error("non-finite jet coefficient");
        }
    }
}

Jet2 Jet2::constant(int order, double c) {
    Jet2 out(order);
    out.coeffs_[0] = c;
    out.validate();
    return out;
}

Jet2 Jet2::variable_x(int order, double x0) {
    Jet2 out(order);
    out.coeffs_[pos(0, 0)] = x0;
    if (order >= 1) out.coeffs_[pos(1, 0)] = 1.0;
    out.validate();
    return out;
}

Jet2 Jet2::variable_y(int order, double y0) {
    Jet2 out(order);
    out.coeffs_[pos(0, 0)] = y0;
    if (order >= 1) out.coeffs_[pos(0, 1)] = 1.0;
    out.validate();
    return out;
}

double Jet2::partial(int dx, int dy) const {
    if (dx < 0 || dy < 0) {
        throw std::invalid_argument("negative derivative order");
    }
    if (dx + dy > order_) {
        throw std::out_of_range("derivative order exceeds jet order");
    }
    return coeffs_[pos(dx, dy)];
}

Jet2 Jet2::operator-() const {
    Jet2 out(*this);
    for (double& c : out.coeffs_) c = -c;
    return out;
}

Jet2& Jet2::operator+=(const Jet2& rhs) {
    *this = *this + rhs;
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& rhs) {
    *this = *this - rhs;
    return *this;
}

Jet2 operator+(const Jet2& a, const Jet2& b) { return jet_add(a, b); }

Jet2 operator-(const Jet2& a, const Jet2& b) {
    if (a.order_ != b.order_) {
        throw std::invalid_argument("incompatible jet orders");
    }
    std::vector<double> c(a.coeffs_);
    for (size_t k = 0; k < c.size(); ++k) c[k] -= b.coeffs_[k];
    return Jet2(a.order_, std::move(c));
}

Jet2 operator*(const Jet2& a, const Jet2& b) { return jet_mul(a, b); }

Jet2 operator/(const Jet2& a, const Jet2& b) {
    return jet_mul(a, jet_reciprocal(b));
}

Jet2 operator+(const Jet2& a, double s) {
    Jet2 out(a);
    out.coeffs_[0] += s;
    out.validate();
    return out;
}

Jet2 operator+(double s, const Jet2& a) { return a + s; }

Jet2 operator-(const Jet2& a, double s) { return a + (-s); }

Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }

Jet2 operator*(const Jet2& a, double s) {
    Jet2 out(a);
    for (double& c : out.coeffs_) c *= s;
    out.validate();
    return out;
}

Jet2 operator*(double s, const Jet2& a) { return a * s; }

Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }

Jet2 operator/(double s, const Jet2& a) { return jet_reciprocal(a) * s; }

Jet2 jet_add(const Jet2& a, const Jet2& b) {
    if (a.order() != b.order()) {
        throw std::invalid_argument("incompatible jet orders");
    }
    std::vector<double> c(a.coeffs());
    for (size_t k = 0; k < c.size(); ++k) c[k] += b.coeffs()[k];
    return Jet2(a.order(), std::move(c));
}

Jet2 jet_mul(const Jet2& a, const Jet2& b) {
    if (a.order() != b.order()) {
        throw std::invalid_argument("incompatible jet orders");
    }
    const int m = a.order();
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<double> c(table_size(m), 0.0);
    for (int d = 0; d <= m; ++d) {
        for (int j = 0; j <= d; ++j) {
            const int i = d - j;
            const double* bi = binom_row(i);
            const double* bj = binom_row(j);
            double acc = 0.0;
            for (int p = 0; p <= i; ++p) {
                for (int q = 0; q <= j; ++q) {
                    acc += bi[p] * bj[q] * ca[pos(p, q)] * cb[pos(i - p, j - q)];
                }
            }
            c[pos(i, j)] = acc;
        }
    }
    return Jet2(m, std::move(c));
}

double jet_partial(const Jet2& a, int dx, int dy) { return a.partial(dx, dy); }

Jet2 jet_shift(const Jet2& a, int p, int q) {
    if (p < 0 || q < 0) {
        throw std::invalid_argument("negative derivative order");
    }
    const int m = a.order() - p - q;
    if (m < 0) {
        throw std::out_of_range("derivative order exceeds jet order");
    }
    std::vector<double> c(table_size(m));
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; i + j <= m; ++j) {
            c[pos(i, j)] = a.partial(i + p, j + q);
        }
    }
    return Jet2(m, std::move(c));
}

Jet2 jet_truncate(const Jet2& a, int new_order) {
    if (new_order < 0 || new_order > a.order()) {
        throw std::invalid_argument("truncation order out of range");
    }
    std::vector<double> c(a.coeffs().begin(),
                          a.coeffs().begin() + table_size(new_order));
    return Jet2(new_order, std::move(c));
}

namespace {

// Composes f(a) = sum_r g[r] * (a - a0)^r where g[r] = f^(r)(a0) / r! and
// a0 is the value of a. The centered part has zero value, so its r-th
// power has no partials below order r and the sum truncates at r = order.
Jet2 compose_series(const Jet2& a, const std::vector<double>& g) {
    const int m = a.order();
    const Jet2 nil = a - a.value();
    Jet2 res = Jet2::constant(m, g[m]);
    for (int r = m - 1; r >= 0; --r) {
        res = res * nil + g[r];
    }
    return res;
}

}  // namespace

Jet2 jet_exp(const Jet2& a) {
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = std::exp(a.value());
    for (int r = 1; r <= m; ++r) g[r] = g[r - 1] / r;
    return compose_series(a, g);
}

Jet2 jet_log(const Jet2& a) {
    const double v = a.value();
    if (v <= 0.0) {
        throw std::domain_error("log of nonpositive value " + describe(v));
    }
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = std::log(v);
    double vpow = 1.0;
    for (int r = 1; r <= m; ++r) {
        vpow *= v;
        g[r] = (r % 2 == 1 ? 1.0 : -1.0) / (r * vpow);
    }
    return compose_series(a, g);
}

Jet2 jet_sin(const Jet2& a) {
    const double v = a.value();
    const int m = a.order();
    const double cycle[4] = {std::sin(v), std::cos(v), -std::sin(v), -std::cos(v)};
    std::vector<double> g(m + 1);
    double fact = 1.0;
    for (int r = 0; r <= m; ++r) {
        if (r > 0) fact *= r;
        g[r] = cycle[r % 4] / fact;
    }
    return compose_series(a, g);
}

Jet2 jet_cos(const Jet2& a) {
    const double v = a.value();
    const int m = a.order();
    const double cycle[4] = {std::cos(v), -std::sin(v), -std::cos(v), std::sin(v)};
    std::vector<double> g(m + 1);
    double fact = 1.0;
    for (int r = 0; r <= m; ++r) {
        if (r > 0) fact *= r;
        g[r] = cycle[r % 4] / fact;
    }
    return compose_series(a, g);
}

Jet2 jet_sinh(const Jet2& a) {
    const double v = a.value();
    const int m = a.order();
    const double even = std::sinh(v);
    const double odd = std::cosh(v);
    std::vector<double> g(m + 1);
    double fact = 1.0;
    for (int r = 0; r <= m; ++r) {
        if (r > 0) fact *= r;
        g[r] = (r % 2 == 0 ? even : odd) / fact;
    }
    return compose_series(a, g);
}

Jet2 jet_cosh(const Jet2& a) {
    const double v = a.value();
    const int m = a.order();
    const double even = std::cosh(v);
    const double odd = std::sinh(v);
    std::vector<double> g(m + 1);
    double fact = 1.0;
    for (int r = 0; r <= m; ++r) {
        if (r > 0) fact *= r;
        g[r] = (r % 2 == 0 ? even : odd) / fact;
    }
    return compose_series(a, g);
}

// Taylor coefficients of tan and tanh about v from the first-order ODEs
// T' = 1 + T^2 and T' = 1 - T^2 via the standard power-series recurrence
// (Knuth, TAOCP vol. 2, section 4.7).
Jet2 jet_tan(const Jet2& a) {
    const double v = a.value();
    const double t0 = std::tan(v);
    if (!std::isfinite(t0)) {
        throw std::domain_error("tan at pole " + describe(v));
    }
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = t0;
    for (int r = 0; r < m; ++r) {
        double conv = 0.0;
        for (int s = 0; s <= r; ++s) conv += g[s] * g[r - s];
        g[r + 1] = ((r == 0 ? 1.0 : 0.0) + conv) / (r + 1);
    }
    return compose_series(a, g);
}

Jet2 jet_tanh(const Jet2& a) {
    const double v = a.value();
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = std::tanh(v);
    for (int r = 0; r < m; ++r) {
        double conv = 0.0;
        for (int s = 0; s <= r; ++s) conv += g[s] * g[r - s];
        g[r + 1] = ((r == 0 ? 1.0 : 0.0) - conv) / (r + 1);
    }
    return compose_series(a, g);
}

namespace {

// Coefficients of v^p about a.value() via the binomial series
// g[r] = binom(p, r) v^(p-r); requires v > 0.
Jet2 pow_series(const Jet2& a, double p) {
    const double v = a.value();
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = std::pow(v, p);
    double coef = 1.0;
    double vpow = g[0];
    for (int r = 1; r <= m; ++r) {
        coef *= (p - (r - 1)) / r;
        vpow /= v;
        g[r] = coef * vpow;
    }
    return compose_series(a, g);
}

}  // namespace

Jet2 jet_sqrt(const Jet2& a) {
    const double v = a.value();
    if (v <= 0.0) {
        throw std::domain_error("sqrt of nonpositive value " + describe(v));
    }
    return pow_series(a, 0.5);
}

Jet2 jet_atan(const Jet2& a) {
    // atan' at v+t is the reciprocal of the quadratic 1 + (v+t)^2; its
    // series comes from the three-term reciprocal recurrence, and the
    // atan coefficients follow by termwise integration.
    const double v = a.value();
    const int m = a.order();
    const double q0 = 1.0 + v * v;
    const double q1 = 2.0 * v;
    std::vector<double> h(m + 1, 0.0);
    h[0] = 1.0 / q0;
    for (int r = 1; r <= m; ++r) {
        double acc = q1 * h[r - 1];
        if (r >= 2) acc += h[r - 2];
        h[r] = -acc / q0;
    }
    std::vector<double> g(m + 1);
    g[0] = std::atan(v);
    for (int r = 1; r <= m; ++r) g[r] = h[r - 1] / r;
    return compose_series(a, g);
}

Jet2 jet_reciprocal(const Jet2& a) {
    const double v = a.value();
    if (v == 0.0) {
        throw std::domain_error("reciprocal of zero value");
    }
    const int m = a.order();
    std::vector<double> g(m + 1);
    g[0] = 1.0 / v;
    for (int r = 1; r <= m; ++r) g[r] = -g[r - 1] / v;
    return compose_series(a, g);
}

Jet2 jet_pow(const Jet2& a, double p) {
    const double rounded = std::round(p);
    if (p == rounded && std::abs(p) <= 40.0) {
        const int n = static_cast<int>(std::abs(rounded));
        Jet2 out = Jet2::constant(a.order(), 1.0);
        for (int k = 0; k < n; ++k) out = out * a;
        if (rounded < 0.0) out = jet_reciprocal(out);
        return out;
    }
    const double v = a.value();
    if (v <= 0.0) {
        throw std::domain_error("pow-const with non-integer exponent needs positive base, got " +
                                describe(v));
    }
    return pow_series(a, p);
}

Jet2 jet_apply(std::string_view fn, const Jet2& a, double param) {
    if (fn == "exp") return jet_exp(a);
    if (fn == "log") return jet_log(a);
    if (fn == "sin") return jet_sin(a);
    if (fn == "cos") return jet_cos(a);
    if (fn == "tan") return jet_tan(a);
    if (fn == "sinh") return jet_sinh(a);
    if (fn == "cosh") return jet_cosh(a);
    if (fn == "tanh") return jet_tanh(a);
    if (fn == "sqrt") return jet_sqrt(a);
    if (fn == "atan") return jet_atan(a);
    if (fn == "reciprocal") return jet_reciprocal(a);
    if (fn == "pow-const") return jet_pow(a, param);
    throw std::invalid_argument("unknown elementary function: " + std::string(fn));
}

}  // namespace symconn
