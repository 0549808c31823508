#pragma once

#include <vector>

#include "symconn/jet.hpp"

namespace symconn {

/// Conventions fixed once for the whole library, on the Darboux chart
/// with coordinates (x, y):
///   Om = dx ^ dy, Om_xy = +1;
///   the dual bivector satisfies Om^ip Om_pj = -delta_j^i, so Om^xy = +1;
///   indices raise as X^i = Om^ip X_p, i.e. T^x = T_y and T^y = -T_x
///   per raised slot;
///   H_f = (-f_y, f_x) in the (d/dx, d/dy) frame;
///   {f, g} = f_x g_y - f_y g_x.
/// Every sign in the operator modules traces back to these five lines.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Value of a symmetric covariant k-tensor at a point. Component t[j] is
/// the coefficient with j indices equal to y and k - j equal to x; the
/// layout has k + 1 entries. Degree 0 is a scalar, degree 1 a one-form.
class SymCov {
public:
    explicit SymCov(int degree);
    SymCov(int degree, std::vector<double> components);

    int degree() const { return degree_; }
    double operator[](int j) const { return components_[j]; }
    double& operator[](int j) { return components_[j]; }
    const std::vector<double>& components() const { return components_; }

    SymCov operator-() const;
    friend SymCov operator+(const SymCov& a, const SymCov& b);
    friend SymCov operator-(const SymCov& a, const SymCov& b);
    friend SymCov operator*(const SymCov& a, double s);
    friend SymCov operator*(double s, const SymCov& a);

private:
    int degree_;
    std::vector<double> components_;
};

/// One-forms are degree-1 symmetric covariant tensors.
using OneFormVal = SymCov;

/// Hamiltonian vector field of f at the jet's base point: (-f_y, f_x).
Vec2 hamiltonian_vf(const Jet2& f_jet);

/// Poisson bracket {f, g} = f_x g_y - f_y g_x at the base point.
double poisson(const Jet2& f_jet, const Jet2& g_jet);

/// Pointwise pairing integrand alpha_{i...} beta^{i...} with all of b's
/// indices raised by Om. In components this is
///   sum_j (-1)^j binom(k, j) a[j] b[k-j];
/// the sign (-1)^j counts the y indices of a's slot string, since raising
/// maps each x slot of b to its y component and each y slot to minus its
/// x component. Satisfies the graded symmetry
/// pairing_density(a, b) = (-1)^k pairing_density(b, a).
double pairing_density(const SymCov& a, const SymCov& b);

}  // namespace symconn
