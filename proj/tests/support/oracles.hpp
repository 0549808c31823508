#pragma once

// Numerical oracles shared across the test suite. Everything here reaches
// derivative and expansion values through routes independent of the jet
// calculus under test: pointwise finite differences and dense polynomial
// interpolation.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace symconn::testing {

using Field = std::function<double(double, double)>;

// Fourth-order central difference in one variable.
inline double fd_first(const std::function<double(double)>& f, double t,
                       double h) {
    return (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) /
           (12.0 * h);
}

// Partial of mixed order (dx, dy) by recursive central differencing. The
// step should shrink with the total order; h around 1e-2 keeps 3rd-order
// mixed partials of smooth fields accurate to ~1e-7.
inline double fd_partial(const Field& f, double x, double y, int dx, int dy,
                         double h) {
    if (dx > 0) {
        return fd_first(
            [&](double t) { return fd_partial(f, t, y, dx - 1, dy, h); }, x, h);
    }
    if (dy > 0) {
        return fd_first(
            [&](double t) { return fd_partial(f, x, t, dx, dy - 1, h); }, y, h);
    }
    return f(x, y);
}

// Coefficients of the unique interpolating polynomial through the nodes,
// by Gaussian elimination with partial pivoting on the Vandermonde system.
inline std::vector<double> poly_fit(const std::vector<double>& ts,
                                    const std::vector<double>& vs) {
    const std::size_t n = ts.size();
    if (vs.size() != n || n == 0) {
        throw std::invalid_argument("poly_fit needs matching nonempty nodes");
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    std::vector<double> b = vs;
    for (std::size_t r = 0; r < n; ++r) {
        double p = 1.0;
        for (std::size_t c = 0; c < n; ++c) {
            a[r][c] = p;
            p *= ts[r];
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace symconn::testing
