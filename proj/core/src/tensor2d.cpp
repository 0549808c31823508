#include "symconn/tensor2d.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace symconn {

namespace {

double binom(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) {
        out *= static_cast<double>(n - k + i) / i;
    }
    return out;
}

}  // namespace

SymCov::SymCov(int degree) : degree_(degree), components_(degree + 1, 0.0) {
    if (degree < 0) {
        throw std::invalid_argument("negative tensor degree");
    }
}

SymCov::SymCov(int degree, std::vector<double> components)
    : degree_(degree), components_(std::move(components)) {
    if (degree < 0) {
        throw std::invalid_argument("negative tensor degree");
    }
    if (static_cast<int>(components_.size()) != degree + 1) {
        throw std::invalid_argument("tensor component count does not match degree");
    }
    for (double c : components_) {
        if (!std::isfinite(c)) {
            throw std::domain_error("non-finite tensor component");
        }
    }
}

SymCov SymCov::operator-() const {
    SymCov out(*this);
    for (double& c : out.components_) c = -c;
    return out;
}

SymCov operator+(const SymCov& a, const SymCov& b) {
    if (a.degree_ != b.degree_) {
        throw std::invalid_argument("incompatible tensor degrees");
    }
    SymCov out(a);
    for (int j = 0; j <= a.degree_; ++j) out.components_[j] += b.components_[j];
    return out;
}

SymCov operator-(const SymCov& a, const SymCov& b) {
    if (a.degree_ != b.degree_) {
        throw std::invalid_argument("incompatible tensor degrees");
    }
    SymCov out(a);
    for (int j = 0; j <= a.degree_; ++j) out.components_[j] -= b.components_[j];
    return out;
}

SymCov operator*(const SymCov& a, double s) {
    SymCov out(a);
    for (double& c : out.components_) c *= s;
    return out;
}

SymCov operator*(double s, const SymCov& a) { return a * s; }

Vec2 hamiltonian_vf(const Jet2& f_jet) {
    if (f_jet.order() < 1) {
        throw std::invalid_argument("insufficient jet order");
    }
    return Vec2{-f_jet.partial(0, 1), f_jet.partial(1, 0)};
}

double poisson(const Jet2& f_jet, const Jet2& g_jet) {
    if (f_jet.order() < 1 || g_jet.order() < 1) {
        throw std::invalid_argument("insufficient jet order");
    }
    return f_jet.partial(1, 0) * g_jet.partial(0, 1) -
           f_jet.partial(0, 1) * g_jet.partial(1, 0);
}

double pairing_density(const SymCov& a, const SymCov& b) {
    if (a.degree() != b.degree()) {
        throw std::invalid_argument("incompatible tensor degrees");
    }
    const int k = a.degree();
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double term = binom(k, j) * a[j] * b[k - j];
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

}  // namespace symconn
