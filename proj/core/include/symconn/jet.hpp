#pragma once

#include <string_view>
#include <vector>

namespace symconn {

/// Truncated Taylor jet of a bivariate scalar field at a point.
///
/// Stores raw partial derivatives c[i][j] = d_x^i d_y^j f evaluated at the
/// base point, for all i+j <= order, in a triangular layout. No factorial
/// scaling is applied anywhere; every formula in this library is written in
/// raw partials. Values are immutable after construction and every
/// constructor rejects non-finite coefficients, so arithmetic fails fast
/// instead of propagating NaN out of a singular locus.
class Jet2 {
public:
    static constexpr int kMaxOrder = 12;

    /// Zero jet of the given order.
    explicit Jet2(int order);

    /// Jet with the given raw-partial table, triangular diagonal layout:
    /// entries sorted by total degree d = i+j, within a degree by j
    /// ascending, so c[i][j] sits at (d*(d+1))/2 + j.
    Jet2(int order, std::vector<double> coeffs);

    /// Constant field c.
    static Jet2 constant(int order, double c);
    /// Coordinate field x evaluated at x0.
    static Jet2 variable_x(int order, double x0);
    /// Coordinate field y evaluated at y0.
    static Jet2 variable_y(int order, double y0);

    int order() const { return order_; }

    /// Raw partial d_x^dx d_y^dy f at the base point. Throws if
    /// dx + dy exceeds the jet order.
    double partial(int dx, int dy) const;

    /// Field value at the base point; same as partial(0, 0).
    double value() const { return coeffs_[0]; }

    /// Number of stored coefficients, (order+1)(order+2)/2.
    int size() const { return static_cast<int>(coeffs_.size()); }

    const std::vector<double>& coeffs() const { return coeffs_; }

    Jet2 operator-() const;
    Jet2& operator+=(const Jet2& rhs);
    Jet2& operator-=(const Jet2& rhs);

    friend Jet2 operator+(const Jet2& a, const Jet2& b);
    friend Jet2 operator-(const Jet2& a, const Jet2& b);
    friend Jet2 operator*(const Jet2& a, const Jet2& b);
    friend Jet2 operator/(const Jet2& a, const Jet2& b);
    friend Jet2 operator+(const Jet2& a, double s);
    friend Jet2 operator+(double s, const Jet2& a);
    friend Jet2 operator-(const Jet2& a, double s);
    friend Jet2 operator-(double s, const Jet2& a);
    friend Jet2 operator*(const Jet2& a, double s);
    friend Jet2 operator*(double s, const Jet2& a);
    friend Jet2 operator/(const Jet2& a, double s);
    friend Jet2 operator/(double s, const Jet2& a);

private:
    int order_;
    std::vector<double> coeffs_;

    void validate() const;
};

/// Coefficientwise sum. Orders must match.
Jet2 jet_add(const Jet2& a, const Jet2& b);

/// Truncated Leibniz product:
/// c[i][j] = sum_{p<=i, q<=j} binom(i,p) binom(j,q) a[p][q] b[i-p][j-q].
Jet2 jet_mul(const Jet2& a, const Jet2& b);

/// Raw partial d_x^dx d_y^dy of the field represented by a.
double jet_partial(const Jet2& a, int dx, int dy);

/// Jet of the derivative field d_x^p d_y^q f, of order a.order() - p - q.
/// With raw-partial storage this is a plain table shift.
Jet2 jet_shift(const Jet2& a, int p, int q);

/// Copy of a truncated to a lower order.
Jet2 jet_truncate(const Jet2& a, int new_order);

Jet2 jet_exp(const Jet2& a);
Jet2 jet_log(const Jet2& a);
Jet2 jet_sin(const Jet2& a);
Jet2 jet_cos(const Jet2& a);
Jet2 jet_tan(const Jet2& a);
Jet2 jet_sinh(const Jet2& a);
Jet2 jet_cosh(const Jet2& a);
Jet2 jet_tanh(const Jet2& a);
Jet2 jet_sqrt(const Jet2& a);
Jet2 jet_atan(const Jet2& a);
Jet2 jet_reciprocal(const Jet2& a);

/// f^p for a real constant p. Integer exponents of magnitude <= 40 are
/// computed by repeated multiplication and accept any base value (nonzero
/// for negative exponents); non-integer exponents require a positive base.
Jet2 jet_pow(const Jet2& a, double p);

/// Composition dispatch by function name. fn is one of exp, log, sin, cos,
/// tan, sinh, cosh, tanh, sqrt, atan, reciprocal, pow-const; pow-const
/// reads its exponent from param and is the only name that uses it.
Jet2 jet_apply(std::string_view fn, const Jet2& a, double param = 0.0);

}  // namespace symconn
