// Command line front end: evaluate curvature quantities, run verification
// suites, integrate geodesics, compute energies, sweep family parameters.
// Output is CSV or JSON with 17 significant digits and no locale; identical
// arguments and seed produce byte-identical output.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symconn/connection.hpp"
#include "symconn/connection_spec.hpp"
#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/geometry.hpp"
#include "symconn/metricsurf.hpp"
#include "symconn/operators.hpp"
#include "symconn/quadrature.hpp"
#include "symconn/tensor2d.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace symconn;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Shared option plumbing.

struct GlobalOpts {
    std::string spec_path;
    std::string out_path;
    std::string format = "csv";
    int jobs = 1;
    unsigned seed = 0;
    std::vector<std::string> tol_kv;
};

void add_global_options(CLI::App* cmd, GlobalOpts& g, bool spec_required) {
    auto* spec =
        cmd->add_option("--spec", g.spec_path, "Connection spec JSON file");
    if (spec_required) {
        spec->required();
    }
    cmd->add_option("--out", g.out_path, "Output file (default: stdout)");
    cmd->add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--jobs", g.jobs, "Worker threads for grids and sweeps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", g.seed, "Seed for sampled checks")
        ->capture_default_str();
    cmd->add_option("--tol", g.tol_kv,
                    "Tolerance override NAME=VALUE (repeatable)");
}

std::map<std::string, double> parse_tol_overrides(
    const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const std::string& kv : kvs) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
            throw std::invalid_argument("tolerance override '" + kv +
                                        "' is not NAME=VALUE");
        }
        const std::string name = kv.substr(0, eq);
        std::size_t used = 0;
        const double value = std::stod(kv.substr(eq + 1), &used);
        if (used != kv.size() - eq - 1 || !(value > 0.0)) {
            throw std::invalid_argument("tolerance '" + name +
                                        "' needs a positive numeric value");
        }
        out[name] = value;
    }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json json_number(double v) {
    if (std::isfinite(v)) {
        return json(v);
    }
    return json(nullptr);
}

void write_output(const GlobalOpts& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(g.out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + g.out_path);
    }
    out << text;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index owns its
// output slot, so scheduling order cannot change results.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, n);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
}

// Max of fn over the points, evaluated in parallel. Max is order
// independent, so the reduction stays deterministic.
double max_over(const std::vector<std::array<double, 2>>& pts, int jobs,
                const std::function<double(double, double)>& fn) {
    std::vector<double> vals(pts.size(), 0.0);
    parallel_for(static_cast<int>(pts.size()), jobs, [&](int i) {
        vals[static_cast<std::size_t>(i)] = fn(pts[static_cast<std::size_t>(i)][0],
                                               pts[static_cast<std::size_t>(i)][1]);
    });
    double m = 0.0;
    for (double v : vals) {
        m = std::max(m, v);
    }
    return m;
}

double max_abs(const SymCov& t) {
    double m = 0.0;
    for (int j = 0; j <= t.degree(); ++j) {
        m = std::max(m, std::abs(t[j]));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Seeded fixtures.

ExprAst expr_ipow(const ExprAst& base, int k) {
    ExprAst acc = expr_number(1.0);
    for (int i = 0; i < k; ++i) {
        acc = expr_mul(acc, base);
    }
    return acc;
}

ExprAst random_poly(std::mt19937& gen, int degree) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    ExprAst sum = expr_number(0.0);
    for (int i = 0; i <= degree; ++i) {
        for (int j = 0; i + j <= degree; ++j) {
            const ExprAst term = expr_mul(
                expr_number(coeff(gen)),
                expr_mul(expr_ipow(expr_x(), i), expr_ipow(expr_y(), j)));
            sum = expr_add(sum, term);
        }
    }
    return sum;
}

ChartConnection random_poly_connection(unsigned seed) {
    std::mt19937 gen(seed);
    ExprAst a = random_poly(gen, 4);
    ExprAst b = random_poly(gen, 4);
    ExprAst c = random_poly(gen, 4);
    ExprAst d = random_poly(gen, 4);
    return ChartConnection(std::move(a), std::move(b), std::move(c),
                           std::move(d), Domain::all_plane());
}

std::vector<std::array<double, 2>> box_points(int count, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = dist(gen);
        const double y = dist(gen);
        pts.push_back({x, y});
    }
    return pts;
}

// Keeps points with |x| <= bound. Sphere-chart jets grow like powers of
// (1 - x^2)^-1, so closed-form residuals near the chart edge measure
// conditioning rather than correctness.
std::vector<std::array<double, 2>> trim_edge(
    const std::vector<std::array<double, 2>>& pts, double bound) {
    std::vector<std::array<double, 2>> out;
    for (const std::array<double, 2>& pt : pts) {
        if (std::abs(pt[0]) <= bound) {
            out.push_back(pt);
        }
    }
    return out;
}

// Connection with trigonometric polynomial fields, fully periodic over
// [0, 2pi]^2 so closed trapezoid quadrature is spectrally exact on every
// derived integrand.
ChartConnection trig_connection() {
    return ChartConnection(parse_or_throw("0.2*sin(x)*cos(y)"),
                           parse_or_throw("0.15*cos(x)"),
                           parse_or_throw("0.25*sin(y)"),
                           parse_or_throw("0.1*sin(x)*sin(y)"),
                           Domain::rectangle(0.0, kTwoPi, 0.0, kTwoPi));
}

// ---------------------------------------------------------------------------
// Small dense linear solve for Vandermonde fits (partial pivoting).

std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)])) {
                piv = r;
            }
        }
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        const double lead = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / lead;
            for (int c = col; c < n; ++c) {
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) {
            s -= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                 x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    return x;
}

// Coefficients of the polynomial through (ts[i], vs[i]), degree ts.size()-1.
std::vector<double> poly_fit(const std::vector<double>& ts,
                             const std::vector<double>& vs) {
    const int n = static_cast<int>(ts.size());
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (int r = 0; r < n; ++r) {
        double p = 1.0;
        for (int c = 0; c < n; ++c) {
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = p;
            p *= ts[static_cast<std::size_t>(r)];
        }
    }
    return solve_dense(std::move(a), vs);
}

// Gradient of a scalar field by fourth-order central differences.
OneFormVal fd_gradient(const std::function<double(double, double)>& f, double x,
                       double y, double h) {
    const double gx = (8.0 * (f(x + h, y) - f(x - h, y)) -
                       (f(x + 2.0 * h, y) - f(x - 2.0 * h, y))) /
                      (12.0 * h);
    const double gy = (8.0 * (f(x, y + h) - f(x, y - h)) -
                       (f(x, y + 2.0 * h) - f(x, y - 2.0 * h))) /
                      (12.0 * h);
    return OneFormVal(1, {gx, gy});
}

// ---------------------------------------------------------------------------
// Verification suites.

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

class SuiteRunner {
public:
    SuiteRunner(unsigned seed, int jobs, std::map<std::string, double> overrides)
        : seed_(seed), jobs_(jobs), overrides_(std::move(overrides)) {}

    unsigned seed() const { return seed_; }
    int jobs() const { return jobs_; }

    void check(const std::string& name, double default_tol,
               const std::function<double()>& residual) {
        CheckResult r;
        r.name = name;
        auto it = overrides_.find(name);
        r.tolerance = it != overrides_.end() ? it->second : default_tol;
        if (it != overrides_.end()) {
            consumed_.insert(name);
        }
        r.max_residual = residual();
        r.pass = std::isfinite(r.max_residual) && r.max_residual <= r.tolerance;
        results_.push_back(std::move(r));
    }

    void finish() const {
        for (const auto& [name, value] : overrides_) {
            (void)value;
            if (consumed_.count(name) == 0) {
                throw std::invalid_argument("unknown tolerance name '" + name +
                                            "' for this suite");
            }
        }
    }

    const std::vector<CheckResult>& results() const { return results_; }

private:
    unsigned seed_;
    int jobs_;
    std::map<std::string, double> overrides_;
    std::set<std::string> consumed_;
    std::vector<CheckResult> results_;
};

// Identities that hold for every symplectic connection, on seeded random
// polynomial connections: the exterior derivative of rho against the moment
// map, and closed forms against the generic operator pipeline.
void run_core_suite(SuiteRunner& sr) {
    const int conn_count = 10;
    const int point_count = 100;

    std::vector<ChartConnection> conns;
    conns.reserve(conn_count);
    for (int c = 0; c < conn_count; ++c) {
        conns.push_back(random_poly_connection(sr.seed() + static_cast<unsigned>(c)));
    }
    const std::vector<std::array<double, 2>> pts =
        box_points(point_count, sr.seed() + 1000u);

    auto over_all = [&](const std::function<double(const ChartConnection&, double,
                                                   double)>& fn) {
        double m = 0.0;
        for (const ChartConnection& conn : conns) {
            m = std::max(m, max_over(pts, sr.jobs(), [&](double x, double y) {
                             return fn(conn, x, y);
                         }));
        }
        return m;
    };

    sr.check("drho-plus-2k-omega", 1e-9, [&]() {
        return over_all([](const ChartConnection& conn, double x, double y) {
            const ConnJets cj = conn.jets_at(x, y, 6);
            const std::array<Jet2, 2> r = rho_jets(cj);
            const double k = moment_k_jet(cj).value();
            const double curl = r[1].partial(1, 0) - r[0].partial(0, 1);
            return std::abs(curl + 2.0 * k) / (1.0 + std::abs(k));
        });
    });

    sr.check("rho-vs-twice-div-ricci", 1e-8, [&]() {
        return over_all([](const ChartConnection& conn, double x, double y) {
            const ConnJets cj = conn.jets_at(x, y, 6);
            const std::array<Jet2, 2> closed = rho_jets(cj);
            const TensorJets ric = ricci_tensor_jets(cj);
            const TensorJets div = delta_jets(cj, ric);
            const double rx = 2.0 * div.comps[0].value();
            const double ry = 2.0 * div.comps[1].value();
            const double scale =
                1.0 + std::max(std::abs(closed[0].value()), std::abs(closed[1].value()));
            return std::max(std::abs(closed[0].value() - rx),
                            std::abs(closed[1].value() - ry)) /
                   scale;
        });
    });

    sr.check("moment-vs-div-rho", 1e-8, [&]() {
        return over_all([](const ChartConnection& conn, double x, double y) {
            const ConnJets cj = conn.jets_at(x, y, 6);
            const double closed = moment_k_jet(cj).value();
            const std::array<Jet2, 2> r = rho_jets(cj);
            TensorJets rho_t{1, {r[0], r[1]}};
            const TensorJets div = delta_jets(cj, rho_t);
            const double generic = -0.5 * div.comps[0].value();
            return std::abs(closed - generic) / (1.0 + std::abs(closed));
        });
    });

    sr.check("hopk-closed-vs-generic", 1e-8, [&]() {
        return over_all([](const ChartConnection& conn, double x, double y) {
            const SymCov closed = hop_k_closed_form(conn, x, y);
            const ConnJets cj = conn.jets_at(x, y, 8);
            const Jet2 k = moment_k_jet(cj);
            const TensorJets generic = hop_jets(cj, k);
            double m = 0.0;
            for (int j = 0; j <= 3; ++j) {
                m = std::max(m, std::abs(closed[j] - generic.comps[static_cast<std::size_t>(j)].value()));
            }
            return m / (1.0 + max_abs(closed));
        });
    });

    sr.check("nabla-ricci-vs-generic", 1e-8, [&]() {
        return over_all([](const ChartConnection& conn, double x, double y) {
            const NablaRicci nr = nabla_ricci(conn, x, y);
            const ConnJets cj = conn.jets_at(x, y, 6);
            const TensorJets ric = ricci_tensor_jets(cj);
            const TensorJets dx = covd_x_jets(cj, ric);
            const TensorJets dy = covd_y_jets(cj, ric);
            const double gen[6] = {dx.comps[0].value(), dx.comps[1].value(),
                                   dx.comps[2].value(), dy.comps[0].value(),
                                   dy.comps[1].value(), dy.comps[2].value()};
            const double cls[6] = {nr.xxx, nr.xxy, nr.xyy,
                                   nr.yxx, nr.yxy, nr.yyy};
            double m = 0.0;
            double scale = 1.0;
            for (int i = 0; i < 6; ++i) {
                m = std::max(m, std::abs(cls[i] - gen[i]));
                scale = std::max(scale, 1.0 + std::abs(cls[i]));
            }
            return m / scale;
        });
    });
}

// Closed-form facts of the built-in families.
void run_families_suite(SuiteRunner& sr) {
    const double a = 0.4;
    const double p = -0.3;
    const double tau0 = -1.0;
    const ChartConnection bc = bourgeois_cahen_family(a, p, tau0, tau0);
    const std::vector<std::array<double, 2>> bc_pts = bc.sample_points(40, sr.seed());

    sr.check("bc-moment-equals-x-plus-a", 1e-10, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(moment_k(bc, x, y) - (x + a));
        });
    });
    sr.check("bc-hopk-vanishes", 1e-8, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            return max_abs(hop_k_closed_form(bc, x, y));
        });
    });
    sr.check("bc-tau-constant-equals-parameter", 1e-8, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(tau(bc, x, y) - tau0);
        });
    });
    sr.check("bc-rho-matches-strip-form", 1e-9, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(bc, x, y);
            const double s = x + a;
            return std::max(std::abs(r[0]), std::abs(r[1] - (tau0 - s * s)));
        });
    });
    sr.check("bc-preferred-sdast-rho-vanishes", 1e-9, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            return max_abs(sdast_rho(bc, x, y));
        });
    });

    const double q_off = -2.0;
    const ChartConnection bc_off = bourgeois_cahen_family(a, p, q_off, tau0);
    sr.check("bc-sdast-ricci-offset-component", 1e-8, [&]() {
        return max_over(bc_pts, sr.jobs(), [&](double x, double y) {
            const SymCov s = sdast_ricci(bc_off, x, y);
            double m = std::abs(9.0 * s[2] - (tau0 - q_off));
            m = std::max(m, std::abs(s[0]));
            m = std::max(m, std::abs(s[1]));
            m = std::max(m, std::abs(s[3]));
            return m;
        });
    });

    const ChartConnection sphere1 = sphere_family(1.0);
    const std::vector<std::array<double, 2>> sp_pts =
        trim_edge(sphere1.sample_points(40, sr.seed() + 1u), 0.99);
    sr.check("sphere-rho-closed-form", 1e-9, [&]() {
        return max_over(sp_pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(sphere1, x, y);
            const double want = 0.5 * (1.0 - 3.0 * x * x);
            return std::max(std::abs(r[0]), std::abs(r[1] - want));
        });
    });
    const ChartConnection sphere07 = sphere_family(0.7);
    sr.check("sphere-moment-linear", 1e-10, [&]() {
        return max_over(sp_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(moment_k(sphere07, x, y) - 1.5 * 0.7 * x);
        });
    });
    sr.check("sphere-energy-three-pi-t-squared", 1e-6, [&]() {
        const Region region = Region::periodic_rectangle(-1.0, 1.0, 0.0, kTwoPi);
        const Rule rule = Rule::default_periodic();
        double rel = 0.0;
        for (double t : {0.5, 1.0}) {
            const double e = energy(sphere_family(t), region, rule);
            const double want = 3.0 * std::acos(-1.0) * t * t;
            rel = std::max(rel, std::abs(e - want) / want);
        }
        return rel;
    });
    sr.check("sphere-jacobi-rotation-kernel", 1e-7, [&]() {
        const SymCovField gen(3, {parse_or_throw("0"), parse_or_throw("0"),
                                  parse_or_throw("0"),
                                  parse_or_throw("0.25*(1-x*x)*(1-x*x)")});
        return max_over(trim_edge(sp_pts, 0.9), sr.jobs(), [&](double x, double y) {
            return max_abs(jacobi(sphere1, gen, x, y));
        });
    });

    const ChartConnection quartic = quartic_family(0.3, -0.2, 0.1, 0.05);
    const std::vector<std::array<double, 2>> q_pts =
        quartic.sample_points(30, sr.seed() + 2u);
    sr.check("quartic-moment-and-criticality", 1e-9, [&]() {
        return max_over(q_pts, sr.jobs(), [&](double x, double y) {
            const double dk = std::abs(moment_k(quartic, x, y) - (x + 0.3));
            return std::max(dk, max_abs(hop_k_closed_form(quartic, x, y)));
        });
    });

    const ChartConnection cube = cube_of_exact(
        parse_or_throw("x*y + x*x*x"));
    const std::vector<std::array<double, 2>> c_pts =
        cube.sample_points(30, sr.seed() + 3u);
    sr.check("cube-moment-flat", 1e-9, [&]() {
        return max_over(c_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(moment_k(cube, x, y));
        });
    });
    sr.check("cube-rho-closed-form", 1e-8, [&]() {
        return max_over(c_pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(cube, x, y);
            const double want_x = -8.0 * (y + 3.0 * x * x) - 12.0 * x * x;
            const double want_y = -8.0 * x;
            return std::max(std::abs(r[0] - want_x), std::abs(r[1] - want_y));
        });
    });

    const ChartConnection busemann = busemann_example();
    const std::vector<std::array<double, 2>> b_pts =
        busemann.sample_points(30, sr.seed() + 4u);
    sr.check("busemann-moment-flat", 1e-9, [&]() {
        return max_over(b_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(moment_k(busemann, x, y));
        });
    });
    sr.check("busemann-rho-closed-form", 1e-8, [&]() {
        return max_over(b_pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(busemann, x, y);
            return std::max(std::abs(r[0]), std::abs(r[1] + 12.0 * y * y));
        });
    });

    const ChartConnection harm = harmonic_deformation(
        MetricChart::hyperbolic_chart(), parse_or_throw("1"), parse_or_throw("0"));
    const std::vector<std::array<double, 2>> h_pts =
        harm.sample_points(30, sr.seed() + 5u);
    sr.check("harmonic-du-rho", 1e-8, [&]() {
        return max_over(h_pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(harm, x, y);
            return std::max(std::abs(r[0] - 12.0), std::abs(r[1]));
        });
    });
    sr.check("harmonic-moment-flat", 1e-9, [&]() {
        return max_over(h_pts, sr.jobs(), [&](double x, double y) {
            return std::abs(moment_k(harm, x, y));
        });
    });
}

// Operator algebra: the six pointwise identities, quadrature adjointness,
// and the variation machinery against polynomial-fit oracles.
void run_operators_suite(SuiteRunner& sr) {
    const ChartConnection conn = random_poly_connection(sr.seed() + 7u);
    const std::vector<std::array<double, 2>> pts = box_points(30, sr.seed() + 17u);
    const IdentityReport rep = identity_suite(conn, pts);

    sr.check("grad-decomposition", 1e-9, [&]() { return rep.grad_decompose; });
    sr.check("divergence-commutator", 1e-9,
             [&]() { return rep.delta_commutator; });
    sr.check("hstar-h-poisson-bracket", 1e-9, [&]() { return rep.hsth_bracket; });
    sr.check("sdast-rho-chain", 1e-8, [&]() { return rep.sdast_rho_chain; });
    sr.check("nabla-dk-five-term", 1e-8, [&]() { return rep.full_nabla_dk; });

    sr.check("preferred-nabla-dk-on-strip-family", 1e-8, [&]() {
        const ChartConnection bc = bourgeois_cahen_family(0.4, -0.3, -1.0, -1.0);
        const IdentityReport r = identity_suite(bc, bc.sample_points(20, sr.seed()));
        return r.preferred_nabla_dk;
    });

    const ChartConnection trig = trig_connection();
    const Region box = Region::rectangle(0.0, kTwoPi, 0.0, kTwoPi);
    const Rule rule = Rule::mixed(Rule::Kind::kTrapezoid, 64,
                                  Rule::Kind::kTrapezoid, 64);
    const ExprAst f = parse_or_throw("sin(x)*cos(y) + 0.3*cos(2*y)");
    const ExprAst g = parse_or_throw("cos(x) + sin(y)");
    const SymCovField xflat(1, {parse_or_throw("0.4*sin(y)"),
                                parse_or_throw("0.3*cos(x)")});
    const SymCovField pi_field(3, {parse_or_throw("sin(x)"),
                                   parse_or_throw("0.2*cos(y)"),
                                   parse_or_throw("0.1*sin(x)*cos(y)"),
                                   parse_or_throw("0.3*cos(x)")});

    sr.check("adjoint-h", 1e-9, [&]() {
        const double lhs = integrate(box, rule, [&](double x, double y) {
            return pairing_density(hop(trig, f, x, y), pi_field.value_at(x, y));
        });
        const double rhs = integrate(box, rule, [&](double x, double y) {
            return eval_jet(f, x, y, 0).value() * hop_adjoint(trig, pi_field, x, y);
        });
        return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    });

    sr.check("adjoint-l", 1e-9, [&]() {
        const double lhs = integrate(box, rule, [&](double x, double y) {
            return pairing_density(lop(trig, xflat, x, y), pi_field.value_at(x, y));
        });
        const double rhs = integrate(box, rule, [&](double x, double y) {
            return pairing_density(xflat.value_at(x, y),
                                   lop_adjoint(trig, pi_field, x, y));
        });
        return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    });

    sr.check("h-bracket-pairing", 1e-9, [&]() {
        const double lhs = integrate(box, rule, [&](double x, double y) {
            return pairing_density(hop(trig, f, x, y), hop(trig, g, x, y));
        });
        const double rhs = integrate(box, rule, [&](double x, double y) {
            const Jet2 fj = eval_jet(f, x, y, 1);
            const Jet2 gj = eval_jet(g, x, y, 1);
            return poisson(fj, gj) * moment_k(trig, x, y);
        });
        return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    });

    sr.check("bracket-integrates-to-zero", 1e-12, [&]() {
        const double v = integrate(box, rule, [&](double x, double y) {
            const Jet2 fj = eval_jet(f, x, y, 1);
            const Jet2 gj = eval_jet(g, x, y, 1);
            return poisson(fj, gj);
        });
        return std::abs(v);
    });

    const SymCovField var_pi(3, {parse_or_throw("0.3 + x"),
                                 parse_or_throw("0.2*y"),
                                 parse_or_throw("0.05 - 0.1*x"),
                                 parse_or_throw("0.4")});
    const std::vector<double> fit_ts = {-0.2, -0.1, 0.1, 0.2};
    const std::vector<std::array<double, 2>> var_pts = box_points(6, sr.seed() + 29u);

    sr.check("variation-rho-matches-fit", 1e-9, [&]() {
        double m = 0.0;
        for (const std::array<double, 2>& pt : var_pts) {
            const VariationCoeffs vc = variation_rho(conn, var_pi, pt[0], pt[1]);
            for (int comp = 0; comp < 2; ++comp) {
                std::vector<double> vals;
                for (double t : fit_ts) {
                    const ChartConnection moved = deform(conn, var_pi, t);
                    vals.push_back(rho(moved, pt[0], pt[1])[comp]);
                }
                const std::vector<double> coeffs = poly_fit(fit_ts, vals);
                for (int i = 0; i < 4; ++i) {
                    m = std::max(m, std::abs(coeffs[static_cast<std::size_t>(i)] -
                                             vc.c[static_cast<std::size_t>(i)][comp]));
                }
            }
        }
        return m;
    });

    sr.check("variation-k-matches-fit", 1e-9, [&]() {
        double m = 0.0;
        for (const std::array<double, 2>& pt : var_pts) {
            const VariationCoeffs vc = variation_k(conn, var_pi, pt[0], pt[1]);
            std::vector<double> vals;
            for (double t : fit_ts) {
                const ChartConnection moved = deform(conn, var_pi, t);
                vals.push_back(moment_k(moved, pt[0], pt[1]));
            }
            const std::vector<double> coeffs = poly_fit(fit_ts, vals);
            for (int i = 0; i < 4; ++i) {
                m = std::max(m, std::abs(coeffs[static_cast<std::size_t>(i)] -
                                         vc.c[static_cast<std::size_t>(i)][0]));
            }
        }
        return m;
    });

    sr.check("second-variation-matches-energy-fit", 1e-6, [&]() {
        const SymCovField alpha(3, {parse_or_throw("0.2*sin(y)"),
                                    parse_or_throw("0.1*cos(x)"),
                                    parse_or_throw("0.15*sin(x)"),
                                    parse_or_throw("0.25*cos(y)")});
        const double hess = second_variation(trig, alpha, alpha, box, rule);
        std::vector<double> ts;
        std::vector<double> es;
        for (int i = -3; i <= 3; ++i) {
            const double t = 0.1 * i;
            ts.push_back(t);
            es.push_back(energy(deform(trig, alpha, t), box, rule));
        }
        const std::vector<double> coeffs = poly_fit(ts, es);
        const double fit_hess = 2.0 * coeffs[2];
        return std::abs(hess - fit_hess) / (1.0 + std::abs(fit_hess));
    });
}

// Metric-side pipeline: Levi-Civita moments against the Laplacian of scalar
// curvature, the star-sign calibration, constant-curvature sanity, the
// holomorphic cubic differential identity, and the unit-determinant guard.
void run_metric_suite(SuiteRunner& sr) {
    const MetricChart bumpy(
        parse_or_throw("exp(0.3*sin(x)*cos(y))"),
        parse_or_throw("0.2*exp(0.3*sin(x)*cos(y))"),
        parse_or_throw("exp(-0.3*sin(x)*cos(y)) + 0.04*exp(0.3*sin(x)*cos(y))"),
        Domain::all_plane());
    const std::vector<std::array<double, 2>> pts = bumpy.sample_points(50, sr.seed());

    sr.check("kahler-moment-identity", 1e-7, [&]() {
        return max_over(pts, sr.jobs(), [&](double x, double y) {
            return kahler_moment_residual(bumpy, x, y);
        });
    });

    sr.check("star-calibration", 1e-7, [&]() {
        const ChartConnection lc = levi_civita(bumpy);
        return max_over(pts, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(lc, x, y);
            const OneFormVal dr = fd_gradient(
                [&](double u, double v) { return scalar_curvature(bumpy, u, v); },
                x, y, 1e-4);
            const OneFormVal star = hodge_star_oneform(bumpy, dr, x, y);
            return std::max(std::abs(r[0] + star[0]), std::abs(r[1] + star[1]));
        });
    });

    sr.check("constant-curvature-flat", 1e-10, [&]() {
        const ChartConnection lc = levi_civita(MetricChart::flat());
        return max_over(box_points(20, sr.seed() + 3u), sr.jobs(),
                        [&](double x, double y) {
                            return std::max(std::abs(moment_k(lc, x, y)),
                                            max_abs(rho(lc, x, y)));
                        });
    });
    sr.check("constant-curvature-sphere", 1e-10, [&]() {
        const MetricChart m = MetricChart::sphere_chart();
        const ChartConnection lc = levi_civita(m);
        return max_over(trim_edge(m.sample_points(20, sr.seed() + 4u), 0.97),
                        sr.jobs(), [&](double x, double y) {
                            return std::max(std::abs(moment_k(lc, x, y)),
                                            max_abs(rho(lc, x, y)));
                        });
    });
    sr.check("constant-curvature-hyperbolic", 1e-10, [&]() {
        const MetricChart m = MetricChart::hyperbolic_chart();
        const ChartConnection lc = levi_civita(m);
        return max_over(m.sample_points(20, sr.seed() + 5u), sr.jobs(),
                        [&](double x, double y) {
                            return std::max(std::abs(moment_k(lc, x, y)),
                                            max_abs(rho(lc, x, y)));
                        });
    });

    auto holo_residual = [&](const MetricChart& m, const ExprAst& re,
                             const ExprAst& im, const SymCovField& pi_field,
                             const std::vector<std::array<double, 2>>& at) {
        const ChartConnection conn = cubic_diff_deformation(m, re, im);
        return max_over(at, sr.jobs(), [&](double x, double y) {
            const SymCov r = rho(conn, x, y);
            const OneFormVal dg = fd_gradient(
                [&](double u, double v) {
                    return cubic_norm(m, pi_field, u, v) -
                           scalar_curvature(m, u, v);
                },
                x, y, 1e-4);
            const OneFormVal star = hodge_star_oneform(m, dg, x, y);
            return std::max(std::abs(r[0] - star[0]), std::abs(r[1] - star[1]));
        });
    };

    const MetricChart flat = MetricChart::flat();
    const std::vector<std::array<double, 2>> flat_pts = box_points(20, sr.seed() + 6u);
    sr.check("holomorphic-cubic-rho-linear", 1e-7, [&]() {
        const SymCovField pi_field(3, {parse_or_throw("x"), parse_or_throw("-y"),
                                       parse_or_throw("-x"), parse_or_throw("y")});
        return holo_residual(flat, parse_or_throw("x"), parse_or_throw("y"),
                             pi_field, flat_pts);
    });
    sr.check("holomorphic-cubic-rho-quadratic", 1e-7, [&]() {
        const SymCovField pi_field(3, {parse_or_throw("x*x - y*y"),
                                       parse_or_throw("-2*x*y"),
                                       parse_or_throw("-(x*x - y*y)"),
                                       parse_or_throw("2*x*y")});
        return holo_residual(flat, parse_or_throw("x*x - y*y"),
                             parse_or_throw("2*x*y"), pi_field, flat_pts);
    });

    sr.check("volume-not-parallel-negative", 0.5, [&]() {
        const MetricChart skew(parse_or_throw("1 + 0.1*x*x"), parse_or_throw("0"),
                               parse_or_throw("1"), Domain::all_plane());
        try {
            levi_civita(skew);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what()).find("volume not parallel") !=
                           std::string::npos
                       ? 0.0
                       : 1.0;
        }
        return 1.0;
    });
}

// Structure theory of verified-critical members away from tau = K^2: sigma
// closed, dK wedge sigma the volume form, the pair metric flat, and unit
// rate of the potential T along the raised rho flow.
void run_structure_suite(SuiteRunner& sr) {
    const ChartConnection bc = bourgeois_cahen_family(0.4, -0.3, -1.0, -1.0);
    const ChartConnection sphere1 = sphere_family(1.0);

    std::vector<std::array<double, 2>> pts = bc.sample_points(10, sr.seed());
    std::vector<std::array<double, 2>> sphere_pts;
    for (double x : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        sphere_pts.push_back({x, 1.0});
        sphere_pts.push_back({x, 3.0});
    }

    std::vector<StructureProbe> probes;
    for (const std::array<double, 2>& pt : pts) {
        probes.push_back(structure_probe(bc, pt[0], pt[1]));
    }
    for (const std::array<double, 2>& pt : sphere_pts) {
        probes.push_back(structure_probe(sphere1, pt[0], pt[1]));
    }

    sr.check("sigma-closed", 1e-7, [&]() {
        double m = 0.0;
        for (const StructureProbe& p : probes) {
            m = std::max(m, p.dsigma_residual);
        }
        return m;
    });
    sr.check("dk-wedge-sigma-is-volume", 1e-7, [&]() {
        double m = 0.0;
        for (const StructureProbe& p : probes) {
            m = std::max(m, p.dk_wedge_sigma_minus_omega);
        }
        return m;
    });
    sr.check("k-metric-flat", 1e-5, [&]() {
        double m = 0.0;
        for (const StructureProbe& p : probes) {
            m = std::max(m, std::abs(p.gauss_curvature_of_k));
        }
        return m;
    });

    auto t_rate_residual = [](const ChartConnection& conn, double x0, double y0) {
        const double dt = 0.05;
        const int steps = 50;
        const double h = dt / steps;
        double x = x0;
        double y = y0;
        auto vf = [&](double px, double py, double& vx, double& vy) {
            const SymCov r = rho(conn, px, py);
            vx = r[1];
            vy = -r[0];
        };
        for (int i = 0; i < steps; ++i) {
            double k1x;
            double k1y;
            double k2x;
            double k2y;
            double k3x;
            double k3y;
            double k4x;
            double k4y;
            vf(x, y, k1x, k1y);
            vf(x + 0.5 * h * k1x, y + 0.5 * h * k1y, k2x, k2y);
            vf(x + 0.5 * h * k2x, y + 0.5 * h * k2y, k3x, k3y);
            vf(x + h * k3x, y + h * k3y, k4x, k4y);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        }
        const double t0 =
            structure_t_value(tau(conn, x0, y0), moment_k(conn, x0, y0));
        const double t1 = structure_t_value(tau(conn, x, y), moment_k(conn, x, y));
        return std::abs((t1 - t0) / dt - 1.0);
    };

    sr.check("t-unit-rate-along-rho-flow", 1e-6, [&]() {
        double m = 0.0;
        for (int i = 0; i < 3 && i < static_cast<int>(pts.size()); ++i) {
            m = std::max(m, t_rate_residual(bc, pts[static_cast<std::size_t>(i)][0],
                                            pts[static_cast<std::size_t>(i)][1]));
        }
        for (double x : {-0.3, 0.0, 0.3}) {
            m = std::max(m, t_rate_residual(sphere1, x, 2.0));
        }
        return m;
    });

    sr.check("noncritical-rejected", 0.5, [&]() {
        const ChartConnection generic = random_poly_connection(sr.seed() + 11u);
        try {
            structure_probe(generic, 0.3, 0.2);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what()).find("not critical") != std::string::npos
                       ? 0.0
                       : 1.0;
        }
        return 1.0;
    });

    sr.check("degenerate-rejected", 0.5, [&]() {
        const ChartConnection q = quartic_family(0.0, 0.0, 0.1, 0.05);
        try {
            structure_probe(q, 0.0, 0.5);
        } catch (const std::domain_error& e) {
            return std::string(e.what()).find("degenerate") != std::string::npos
                       ? 0.0
                       : 1.0;
        }
        return 1.0;
    });
}

int run_verify(const GlobalOpts& g, const std::string& suite) {
    SuiteRunner sr(g.seed, g.jobs, parse_tol_overrides(g.tol_kv));
    if (suite == "core") {
        run_core_suite(sr);
    } else if (suite == "families") {
        run_families_suite(sr);
    } else if (suite == "operators") {
        run_operators_suite(sr);
    } else if (suite == "metric") {
        run_metric_suite(sr);
    } else if (suite == "structure") {
        run_structure_suite(sr);
    } else {
        throw std::invalid_argument("unknown suite '" + suite + "'");
    }
    sr.finish();

    bool all_pass = true;
    for (const CheckResult& r : sr.results()) {
        all_pass = all_pass && r.pass;
    }

    std::string text;
    if (g.format == "csv") {
        text = "check,max_residual,tolerance,pass\n";
        for (const CheckResult& r : sr.results()) {
            text += r.name + "," + fmt17(r.max_residual) + "," +
                    fmt17(r.tolerance) + "," + (r.pass ? "1" : "0") + "\n";
        }
    } else {
        json rep;
        rep["suite"] = suite;
        rep["seed"] = g.seed;
        rep["checks"] = json::array();
        for (const CheckResult& r : sr.results()) {
            json c;
            c["name"] = r.name;
            c["max_residual"] = json_number(r.max_residual);
            c["tolerance"] = r.tolerance;
            c["pass"] = r.pass;
            rep["checks"].push_back(std::move(c));
        }
        rep["pass"] = all_pass;
        text = rep.dump(2) + "\n";
    }
    write_output(g, text);
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval: quantity table over points or a grid.

const std::vector<std::string>& eval_quantities() {
    static const std::vector<std::string> q = {
        "ric",  "nabla_ric", "rho",       "K",     "tau",
        "hopK", "sdast_ric", "sdast_rho", "sigma", "T"};
    return q;
}

std::vector<std::string> quantity_columns(const std::string& q) {
    if (q == "ric") {
        return {"ric_xx", "ric_xy", "ric_yy"};
    }
    if (q == "nabla_ric") {
        return {"nabla_ric_xxx", "nabla_ric_xxy", "nabla_ric_xyy",
                "nabla_ric_yxx", "nabla_ric_yxy", "nabla_ric_yyy"};
    }
    if (q == "rho") {
        return {"rho_x", "rho_y"};
    }
    if (q == "K") {
        return {"K"};
    }
    if (q == "tau") {
        return {"tau"};
    }
    if (q == "hopK") {
        return {"hopK_xxx", "hopK_xxy", "hopK_xyy", "hopK_yyy"};
    }
    if (q == "sdast_ric") {
        return {"sdast_ric_xxx", "sdast_ric_xxy", "sdast_ric_xyy",
                "sdast_ric_yyy"};
    }
    if (q == "sdast_rho") {
        return {"sdast_rho_xx", "sdast_rho_xy", "sdast_rho_yy"};
    }
    if (q == "sigma") {
        return {"sigma_x", "sigma_y"};
    }
    if (q == "T") {
        return {"T"};
    }
    throw std::invalid_argument("unknown quantity '" + q + "'");
}

struct EvalOpts {
    std::vector<int> grid = {5, 5};
    std::vector<double> window;
    std::vector<std::string> points;
    std::vector<std::string> quantities;
};

std::array<double, 4> default_window(const Domain& d) {
    std::array<double, 4> w = {-1.0, 1.0, -1.0, 1.0};
    if (std::isfinite(d.x_min) && std::isfinite(d.x_max)) {
        w[0] = d.x_min;
        w[1] = d.x_max;
    }
    if (std::isfinite(d.y_min) && std::isfinite(d.y_max)) {
        w[2] = d.y_min;
        w[3] = d.y_max;
    }
    return w;
}

int run_eval(const GlobalOpts& g, const EvalOpts& e) {
    const ChartConnection conn = load_connection_spec(g.spec_path);
    const std::map<std::string, double> tols = parse_tol_overrides(g.tol_kv);
    for (const auto& [name, value] : tols) {
        (void)value;
        if (name != "sing") {
            throw std::invalid_argument("unknown tolerance name '" + name +
                                        "' for eval (expected: sing)");
        }
    }
    const double sing_tol = tols.count("sing") ? tols.at("sing") : kSingularTol;

    std::vector<std::string> quantities =
        e.quantities.empty() ? eval_quantities() : e.quantities;
    std::set<std::string> requested;
    for (const std::string& q : quantities) {
        quantity_columns(q);
        requested.insert(q);
    }
    // Emit in canonical order regardless of flag order.
    std::vector<std::string> ordered;
    for (const std::string& q : eval_quantities()) {
        if (requested.count(q)) {
            ordered.push_back(q);
        }
    }

    std::vector<std::array<double, 2>> pts;
    if (!e.points.empty()) {
        for (const std::string& s : e.points) {
            double x = 0.0;
            double y = 0.0;
            if (std::sscanf(s.c_str(), "%lf,%lf", &x, &y) != 2) {
                throw std::invalid_argument("point '" + s + "' is not x,y");
            }
            pts.push_back({x, y});
        }
    } else {
        std::array<double, 4> w = default_window(conn.domain());
        if (!e.window.empty()) {
            w = {e.window[0], e.window[1], e.window[2], e.window[3]};
        }
        const int nx = e.grid[0];
        const int ny = e.grid.size() > 1 ? e.grid[1] : e.grid[0];
        if (nx < 1 || ny < 1) {
            throw std::invalid_argument("grid extents must be positive");
        }
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double x =
                    nx == 1 ? w[0] : w[0] + (w[1] - w[0]) * i / (nx - 1);
                const double y =
                    ny == 1 ? w[2] : w[2] + (w[3] - w[2]) * j / (ny - 1);
                pts.push_back({x, y});
            }
        }
    }

    std::vector<std::string> columns = {"x", "y"};
    for (const std::string& q : ordered) {
        for (const std::string& c : quantity_columns(q)) {
            columns.push_back(c);
        }
    }
    columns.push_back("near_singular");
    columns.push_back("in_domain");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows(pts.size());
    parallel_for(static_cast<int>(pts.size()), g.jobs, [&](int idx) {
        const double x = pts[static_cast<std::size_t>(idx)][0];
        const double y = pts[static_cast<std::size_t>(idx)][1];
        std::vector<double>& row = rows[static_cast<std::size_t>(idx)];
        row.push_back(x);
        row.push_back(y);
        bool inside = conn.domain().contains(x, y);
        if (inside) {
            try {
                const CurvatureReport rep = curvature_report(conn, x, y);
                const double gap = rep.tau - rep.k * rep.k;
                const bool singular =
                    std::abs(gap) <= sing_tol * (1.0 + std::abs(rep.tau));
                for (const std::string& q : ordered) {
                    if (q == "ric") {
                        row.insert(row.end(),
                                   {rep.ric[0], rep.ric[1], rep.ric[2]});
                    } else if (q == "nabla_ric") {
                        const NablaRicci nr = nabla_ricci(conn, x, y);
                        row.insert(row.end(), {nr.xxx, nr.xxy, nr.xyy, nr.yxx,
                                               nr.yxy, nr.yyy});
                    } else if (q == "rho") {
                        row.insert(row.end(), {rep.rho[0], rep.rho[1]});
                    } else if (q == "K") {
                        row.push_back(rep.k);
                    } else if (q == "tau") {
                        row.push_back(rep.tau);
                    } else if (q == "hopK") {
                        row.insert(row.end(), {rep.hop_k[0], rep.hop_k[1],
                                               rep.hop_k[2], rep.hop_k[3]});
                    } else if (q == "sdast_ric") {
                        row.insert(row.end(),
                                   {rep.sdast_ric[0], rep.sdast_ric[1],
                                    rep.sdast_ric[2], rep.sdast_ric[3]});
                    } else if (q == "sdast_rho") {
                        row.insert(row.end(),
                                   {rep.sdast_rho[0], rep.sdast_rho[1],
                                    rep.sdast_rho[2]});
                    } else if (q == "sigma") {
                        if (singular) {
                            row.insert(row.end(), {nan, nan});
                        } else {
                            row.insert(row.end(),
                                       {rep.rho[0] / gap, rep.rho[1] / gap});
                        }
                    } else if (q == "T") {
                        row.push_back(singular
                                          ? nan
                                          : structure_t_value(rep.tau, rep.k));
                    }
                }
                row.push_back(singular ? 1.0 : 0.0);
                row.push_back(1.0);
                return;
            } catch (const std::domain_error&) {
                inside = false;
                row.resize(2);
            }
        }
        for (const std::string& q : ordered) {
            for (std::size_t i = 0; i < quantity_columns(q).size(); ++i) {
                row.push_back(nan);
            }
        }
        row.push_back(0.0);
        row.push_back(inside ? 1.0 : 0.0);
    });

    std::string text;
    if (g.format == "csv") {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            text += (i == 0 ? "" : ",") + columns[i];
        }
        text += "\n";
        for (const std::vector<double>& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i > 0) {
                    text += ",";
                }
                if (i >= row.size() - 2) {
                    text += row[i] > 0.5 ? "1" : "0";
                } else {
                    text += fmt17(row[i]);
                }
            }
            text += "\n";
        }
    } else {
        json arr = json::array();
        for (const std::vector<double>& row : rows) {
            json obj;
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (i >= row.size() - 2) {
                    obj[columns[i]] = row[i] > 0.5;
                } else {
                    obj[columns[i]] = json_number(row[i]);
                }
            }
            arr.push_back(std::move(obj));
        }
        text = arr.dump(2) + "\n";
    }
    write_output(g, text);
    return 0;
}

// ---------------------------------------------------------------------------
// geodesic: trajectory CSV/JSON.

struct GeodesicOpts {
    std::vector<double> init;
    double t_max = 10.0;
    int samples = 200;
};

int run_geodesic(const GlobalOpts& g, const GeodesicOpts& o) {
    const ChartConnection conn = load_connection_spec(g.spec_path);
    const std::map<std::string, double> tols = parse_tol_overrides(g.tol_kv);
    IntegratorControls controls;
    for (const auto& [name, value] : tols) {
        if (name == "rtol") {
            controls.rtol = value;
        } else if (name == "atol") {
            controls.atol = value;
        } else {
            throw std::invalid_argument("unknown tolerance name '" + name +
                                        "' for geodesic (expected: rtol, atol)");
        }
    }
    GeodesicState init;
    init.x = o.init[0];
    init.y = o.init[1];
    init.xdot = o.init[2];
    init.ydot = o.init[3];
    const Trajectory traj =
        geodesic_integrate(conn, init, o.t_max, o.samples, controls);

    const char* stop = traj.stop == StopReason::kCompleted    ? "completed"
                       : traj.stop == StopReason::kDomainExit ? "domain-exit"
                                                              : "step-collapse";
    std::string text;
    if (g.format == "csv") {
        text = trajectory_csv(traj);
        std::fprintf(stderr, "stop: %s at t = %.17g\n", stop, traj.t_end);
    } else {
        json rep;
        rep["stop"] = stop;
        rep["t_end"] = traj.t_end;
        rep["samples"] = json::array();
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const GeodesicState& s = traj.samples[i];
            json row;
            row["t"] = s.t;
            row["x"] = s.x;
            row["y"] = s.y;
            row["xdot"] = s.xdot;
            row["ydot"] = s.ydot;
            row["rho_gammadot"] = json_number(
                i < traj.rho_gammadot.size()
                    ? traj.rho_gammadot[i]
                    : std::numeric_limits<double>::quiet_NaN());
            rep["samples"].push_back(std::move(row));
        }
        text = rep.dump(2) + "\n";
    }
    write_output(g, text);
    return 0;
}

// ---------------------------------------------------------------------------
// energy + sweep.

struct QuadOpts {
    std::vector<double> window;
    bool periodic_y = false;
    int nx = 64;
    int ny = 0;  // 0: 64, or 256 when the y axis is periodic
};

Region region_for(const Domain& d, const QuadOpts& q) {
    std::array<double, 4> w = default_window(d);
    if (!q.window.empty()) {
        w = {q.window[0], q.window[1], q.window[2], q.window[3]};
    }
    const bool periodic = q.periodic_y || (q.window.empty() && d.periodic_y);
    return periodic ? Region::periodic_rectangle(w[0], w[1], w[2], w[3])
                    : Region::rectangle(w[0], w[1], w[2], w[3]);
}

Rule rule_for(const Region& region, const QuadOpts& q) {
    const bool periodic = region.kind == Region::Kind::kPeriodicRectangle;
    const int ny = q.ny > 0 ? q.ny : (periodic ? 256 : 64);
    return Rule::mixed(Rule::Kind::kGaussLegendre, q.nx,
                       periodic ? Rule::Kind::kTrapezoid
                                : Rule::Kind::kGaussLegendre,
                       ny);
}

int run_energy(const GlobalOpts& g, const QuadOpts& q) {
    const ChartConnection conn = load_connection_spec(g.spec_path);
    const Region region = region_for(conn.domain(), q);
    const Rule rule = rule_for(region, q);
    const double e = energy(conn, region, rule);
    if (g.format == "csv") {
        write_output(g, "energy\n" + fmt17(e) + "\n");
    } else {
        json rep;
        rep["energy"] = e;
        write_output(g, rep.dump(2) + "\n");
    }
    return 0;
}

struct SweepOpts {
    std::string family;
    std::string param;
    std::vector<double> values;
    std::vector<std::string> fixed;
    std::string quantity = "energy";
    QuadOpts quad;
};

int run_sweep(const GlobalOpts& g, const SweepOpts& o) {
    static const std::set<std::string> kQuantities = {"energy", "tau",
                                                      "max-sdast-ric",
                                                      "max-hopk"};
    if (kQuantities.count(o.quantity) == 0) {
        throw std::invalid_argument("unknown sweep quantity '" + o.quantity +
                                    "' (expected: energy, tau, max-sdast-ric, "
                                    "max-hopk)");
    }
    nlohmann::json params;
    for (const std::string& kv : o.fixed) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("fixed parameter '" + kv +
                                        "' is not NAME=VALUE");
        }
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }

    std::vector<double> results(o.values.size(), 0.0);
    parallel_for(static_cast<int>(o.values.size()), g.jobs, [&](int i) {
        nlohmann::json spec;
        spec["type"] = "family";
        spec["name"] = o.family;
        nlohmann::json p = params;
        p[o.param] = o.values[static_cast<std::size_t>(i)];
        spec["params"] = p;
        const ChartConnection conn = parse_connection_spec(spec.dump());
        double value = 0.0;
        if (o.quantity == "energy") {
            const Region region = region_for(conn.domain(), o.quad);
            value = energy(conn, region, rule_for(region, o.quad));
        } else if (o.quantity == "tau") {
            const std::array<double, 2> pt = conn.sample_points(1, g.seed)[0];
            value = tau(conn, pt[0], pt[1]);
        } else {
            const std::vector<std::array<double, 2>> pts =
                conn.sample_points(25, g.seed);
            double m = 0.0;
            for (const std::array<double, 2>& pt : pts) {
                const SymCov v = o.quantity == "max-sdast-ric"
                                     ? sdast_ricci(conn, pt[0], pt[1])
                                     : hop_k_closed_form(conn, pt[0], pt[1]);
                m = std::max(m, max_abs(v));
            }
            value = m;
        }
        results[static_cast<std::size_t>(i)] = value;
    });

    std::string text;
    if (g.format == "csv") {
        text = o.param + "," + o.quantity + "\n";
        for (std::size_t i = 0; i < o.values.size(); ++i) {
            text += fmt17(o.values[i]) + "," + fmt17(results[i]) + "\n";
        }
    } else {
        json arr = json::array();
        for (std::size_t i = 0; i < o.values.size(); ++i) {
            json row;
            row[o.param] = o.values[i];
            row[o.quantity] = json_number(results[i]);
            arr.push_back(std::move(row));
        }
        text = arr.dump(2) + "\n";
    }
    write_output(g, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Curvature calculus of symplectic connections on Darboux charts"};
    app.require_subcommand(1);

    GlobalOpts g_eval;
    EvalOpts e;
    auto* eval =
        app.add_subcommand("eval", "Evaluate curvature quantities on a grid");
    add_global_options(eval, g_eval, true);
    eval->add_option("--grid", e.grid, "Grid extents NX NY")
        ->expected(1, 2)
        ->delimiter(',');
    eval->add_option("--window", e.window, "Grid window x0,x1,y0,y1")
        ->expected(4)
        ->delimiter(',');
    eval->add_option("--points", e.points,
                     "Explicit point 'x,y' (repeatable; overrides the grid)");
    eval->add_option("--quantity", e.quantities,
                     "Quantity to evaluate (repeatable; default: all)");

    GlobalOpts g_verify;
    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    add_global_options(verify, g_verify, false);
    verify
        ->add_option("--suite", suite,
                     "Suite: core, families, operators, metric, structure")
        ->required()
        ->check(CLI::IsMember(
            {"core", "families", "operators", "metric", "structure"}));

    GlobalOpts g_geo;
    GeodesicOpts geo;
    auto* geodesic =
        app.add_subcommand("geodesic", "Integrate a geodesic trajectory");
    add_global_options(geodesic, g_geo, true);
    geodesic
        ->add_option("--init", geo.init, "Initial state x,y,xdot,ydot")
        ->required()
        ->expected(4)
        ->delimiter(',');
    geodesic->add_option("--t-max", geo.t_max, "Final time")
        ->capture_default_str();
    geodesic->add_option("--samples", geo.samples, "Output sample count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    GlobalOpts g_energy;
    QuadOpts quad_energy;
    auto* energy_cmd =
        app.add_subcommand("energy", "Integrate K^2 over a region");
    add_global_options(energy_cmd, g_energy, true);
    energy_cmd
        ->add_option("--region", quad_energy.window, "Region x0,x1,y0,y1")
        ->expected(4)
        ->delimiter(',');
    energy_cmd->add_flag("--periodic-y", quad_energy.periodic_y,
                         "Treat the y axis as one full period");
    energy_cmd->add_option("--nx", quad_energy.nx, "Quadrature nodes in x")
        ->capture_default_str();
    energy_cmd->add_option("--ny", quad_energy.ny,
                           "Quadrature nodes in y (default 64, periodic 256)");

    GlobalOpts g_sweep;
    SweepOpts sweep;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Evaluate a quantity across a parameter");
    add_global_options(sweep_cmd, g_sweep, false);
    sweep_cmd->add_option("--family", sweep.family, "Family name")->required();
    sweep_cmd->add_option("--param", sweep.param, "Swept parameter name")
        ->required();
    sweep_cmd->add_option("--values", sweep.values, "Swept values v1,v2,...")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--fixed", sweep.fixed,
                          "Fixed parameter NAME=VALUE (repeatable)");
    sweep_cmd
        ->add_option("--quantity", sweep.quantity,
                     "energy, tau, max-sdast-ric, or max-hopk")
        ->capture_default_str();
    sweep_cmd->add_option("--region", sweep.quad.window, "Region x0,x1,y0,y1")
        ->expected(4)
        ->delimiter(',');
    sweep_cmd->add_flag("--periodic-y", sweep.quad.periodic_y,
                        "Treat the y axis as one full period");
    sweep_cmd->add_option("--nx", sweep.quad.nx, "Quadrature nodes in x");
    sweep_cmd->add_option("--ny", sweep.quad.ny, "Quadrature nodes in y");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) {
            return run_eval(g_eval, e);
        }
        if (verify->parsed()) {
            return run_verify(g_verify, suite);
        }
        if (geodesic->parsed()) {
            return run_geodesic(g_geo, geo);
        }
        if (energy_cmd->parsed()) {
            return run_energy(g_energy, quad_energy);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(g_sweep, sweep);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
