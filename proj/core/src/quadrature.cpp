#include "symconn/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symconn {

namespace {

void validate_extent(double lo, double hi, const char* axis) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw std::invalid_argument(std::string("region has empty ") + axis +
                                    " extent");
    }
}

void validate_rule_size(int n) {
    if (n < 2 || n > 4096) {
        throw std::invalid_argument("rule size must lie in [2, 4096]");
    }
}

struct Nodes1D {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n, cached per n.
const Nodes1D& gauss_reference_nodes(int n) {
    static std::map<int, Nodes1D> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    Nodes1D nodes;
    nodes.x.assign(n, 0.0);
    nodes.w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                break;
            }
        }
        nodes.x[i] = -t;
        nodes.x[n - 1 - i] = t;
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes.w[i] = w;
        nodes.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(nodes)).first->second;
}

Nodes1D axis_nodes(Rule::Kind kind, int n, double a, double b) {
    validate_rule_size(n);
    Nodes1D out;
    if (kind == Rule::Kind::kGaussLegendre) {
        const Nodes1D& ref = gauss_reference_nodes(n);
        out.x.reserve(n);
        out.w.reserve(n);
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int i = 0; i < n; ++i) {
            out.x.push_back(mid + half * ref.x[i]);
            out.w.push_back(half * ref.w[i]);
        }
    } else {
        const double h = (b - a) / n;
        out.x.reserve(n + 1);
        out.w.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            out.x.push_back(a + h * i);
            out.w.push_back(i == 0 || i == n ? 0.5 * h : h);
        }
    }
    return out;
}

// Deterministic pairwise reduction; the summation order depends only on the
// node count, so equal inputs give bit-identical results.
double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += v[i];
        }
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

std::string point_text(double x, double y) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", x, y);
    return buf;
}

}  // namespace

Region Region::rectangle(double x0, double x1, double y0, double y1) {
    validate_extent(x0, x1, "x");
    validate_extent(y0, y1, "y");
    return Region{Kind::kRectangle, x0, x1, y0, y1, 0.0, 0.0};
}

Region Region::periodic_rectangle(double x0, double x1, double y0, double y1) {
    validate_extent(x0, x1, "x");
    validate_extent(y0, y1, "y");
    return Region{Kind::kPeriodicRectangle, x0, x1, y0, y1, 0.0, 0.0};
}

Region Region::annulus_x(double x0, double x1, double y0, double y1, double eps1,
                         double eps2) {
    validate_extent(x0, x1, "x");
    validate_extent(y0, y1, "y");
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) {
        throw std::invalid_argument("annulus margins must be positive");
    }
    validate_extent(x0 + eps1, x1 - eps2, "trimmed x");
    return Region{Kind::kAnnulusX, x0, x1, y0, y1, eps1, eps2};
}

Rule Rule::gauss_legendre(int n) {
    validate_rule_size(n);
    return Rule{Kind::kGaussLegendre, n, Kind::kGaussLegendre, n};
}

Rule Rule::trapezoid(int n) {
    validate_rule_size(n);
    return Rule{Kind::kTrapezoid, n, Kind::kTrapezoid, n};
}

Rule Rule::mixed(Kind kx, int nx, Kind ky, int ny) {
    validate_rule_size(nx);
    validate_rule_size(ny);
    return Rule{kx, nx, ky, ny};
}

Rule Rule::default_periodic() {
    return Rule{Kind::kGaussLegendre, 64, Kind::kTrapezoid, 256};
}

double integrate(const Region& region, const Rule& rule,
                 const std::function<double(double, double)>& field) {
    double x0 = region.x0;
    double x1 = region.x1;
    if (region.kind == Region::Kind::kAnnulusX) {
        x0 += region.eps1;
        x1 -= region.eps2;
    }
    const Nodes1D nx = axis_nodes(rule.kind_x, rule.n_x, x0, x1);
    const Nodes1D ny = axis_nodes(rule.kind_y, rule.n_y, region.y0, region.y1);
    std::vector<double> terms;
    terms.reserve(nx.x.size() * ny.x.size());
    for (std::size_t i = 0; i < nx.x.size(); ++i) {
        for (std::size_t j = 0; j < ny.x.size(); ++j) {
            const double v = field(nx.x[i], ny.x[j]);
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite sample at " +
                                         point_text(nx.x[i], ny.x[j]));
            }
            terms.push_back(v * nx.w[i] * ny.w[j]);
        }
    }
    return pairwise_sum(terms, 0, terms.size());
}

double energy(const ChartConnection& conn, const Region& region, const Rule& rule) {
    return integrate(region, rule, [&](double x, double y) {
        const double k = moment_k(conn, x, y);
        return k * k;
    });
}

double boundary_flux_k_rho(const ChartConnection& conn, double eps1, double eps2,
                           int n) {
    validate_rule_size(n);
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) {
        throw std::invalid_argument("annulus margins must be positive");
    }
    const Domain& dom = conn.domain();
    if (!std::isfinite(dom.x_min) || !std::isfinite(dom.x_max) ||
        !std::isfinite(dom.y_min) || !std::isfinite(dom.y_max)) {
        throw std::invalid_argument("boundary flux needs a bounded domain rectangle");
    }
    auto loop_integral = [&](double xs) {
        const double h = (dom.y_max - dom.y_min) / n;
        std::vector<double> terms;
        terms.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double y = dom.y_min + h * i;
            const double k = moment_k(conn, xs, y);
            const SymCov r = rho(conn, xs, y);
            const double v = k * r[1];
            if (!std::isfinite(v)) {
                throw std::runtime_error("non-finite sample at " + point_text(xs, y));
            }
            terms.push_back((i == 0 || i == n ? 0.5 * h : h) * v);
        }
        return pairwise_sum(terms, 0, terms.size());
    };
    return -loop_integral(dom.x_max - eps2) + loop_integral(dom.x_min + eps1);
}

double pairing(const SymCovField& a, const SymCovField& b, const Region& region,
               const Rule& rule) {
    if (a.degree() != b.degree()) {
        throw std::invalid_argument("pairing degree mismatch");
    }
    return integrate(region, rule, [&](double x, double y) {
        return pairing_density(a.value_at(x, y), b.value_at(x, y));
    });
}

}  // namespace symconn
