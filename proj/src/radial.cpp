// Radial grids, quadrature weights, norms, derivatives, scaling, bumps.
#include "sps/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sps {

namespace {

constexpr double kPi = 3.14159265358979323846;

double jacobian(double r) { return 4.0 * kPi * r * r; }

// Compensated (Kahan) summation of element-wise products.
double kahan_sum(const std::vector<double>& w, const std::vector<double>& v) {
    double sum = 0.0, carry = 0.0;
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double term = w[i] * v[i] - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

// Three-term Gregory correction at the outer end of a uniform-step composite
// trapezoid rule: adjusts the last four weights so the boundary error drops
// from O(h^2) to O(h^5).  `step` is the (uniform) spacing at that end and
// `factor[i]` the integrand factor multiplying the sample at node n-1-i.
void gregory_outer(std::vector<double>& w, double step,
                   const std::vector<double>& factor) {
    const std::size_t n = w.size();
    if (n < 8) return;  // toy grids keep the plain trapezoid rule
    w[n - 1] -= step * (109.0 / 720.0) * factor[n - 1];
    w[n - 2] += step * (177.0 / 720.0) * factor[n - 2];
    w[n - 3] -= step * (87.0 / 720.0) * factor[n - 3];
    w[n - 4] += step * (19.0 / 720.0) * factor[n - 4];
}

void check_same_grid(const RadialFunction& a, const RadialFunction& b) {
    if (a.grid != b.grid)
        throw std::invalid_argument("radial functions live on different grids");
}

}  // namespace

GridPtr make_grid(GridKind kind, std::size_t n, double r_max, double r_min) {
    if (n < 2) throw std::invalid_argument("make_grid: need at least 2 nodes");
    if (!(r_max > 0.0)) throw std::invalid_argument("make_grid: r_max must be positive");

    auto grid = std::make_shared<RadialGrid>();
    grid->kind = kind;
    grid->r_max = r_max;
    grid->nodes.resize(n);
    grid->weights.assign(n, 0.0);

    if (kind == GridKind::uniform) {
        const double h = r_max / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            grid->nodes[i] = h * static_cast<double>(i + 1);
        grid->nodes[n - 1] = r_max;
        grid->r_min = grid->nodes[0];

        // Composite trapezoid in r with a virtual node at r = 0 (integrand 0).
        std::vector<double> jac(n);
        for (std::size_t i = 0; i < n; ++i) jac[i] = jacobian(grid->nodes[i]);
        grid->weights[0] += 0.5 * grid->nodes[0] * jac[0];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double hi = grid->nodes[i + 1] - grid->nodes[i];
            grid->weights[i] += 0.5 * hi * jac[i];
            grid->weights[i + 1] += 0.5 * hi * jac[i + 1];
        }
        gregory_outer(grid->weights, h, jac);
    } else {
        if (!(r_min > 0.0) || !(r_min < r_max))
            throw std::invalid_argument("make_grid: need 0 < r_min < r_max for logarithmic grids");
        const double t0 = std::log(r_min);
        const double tau = (std::log(r_max) - t0) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            grid->nodes[i] = std::exp(t0 + tau * static_cast<double>(i));
        grid->nodes[0] = r_min;
        grid->nodes[n - 1] = r_max;
        grid->r_min = r_min;

        // Trapezoid in t = ln r: int g dr = int g(r(t)) r(t) dt, so the sample
        // factor is 4*pi*r^3; plus the exact constant-f remainder for [0, r_min].
        std::vector<double> factor(n);
        for (std::size_t i = 0; i < n; ++i)
            factor[i] = jacobian(grid->nodes[i]) * grid->nodes[i];
        for (std::size_t i = 0; i < n; ++i)
            grid->weights[i] = tau * factor[i];
        grid->weights[0] *= 0.5;
        grid->weights[n - 1] *= 0.5;
        gregory_outer(grid->weights, tau, factor);
        grid->weights[0] += (4.0 * kPi / 3.0) * r_min * r_min * r_min;
    }
    return grid;
}

RadialFunction make_function(const GridPtr& grid, const std::function<double(double)>& f) {
    RadialFunction u(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) u.values[i] = f(grid->nodes[i]);
    return u;
}

double integrate(const RadialFunction& f) {
    return kahan_sum(f.grid->weights, f.values);
}

double inner_product(const RadialFunction& a, const RadialFunction& b) {
    check_same_grid(a, b);
    const auto& w = a.grid->weights;
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double term = w[i] * a.values[i] * b.values[i] - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

double lp_norm(const RadialFunction& u, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: need p >= 1");
    const auto& w = u.grid->weights;
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double term = w[i] * std::pow(std::abs(u.values[i]), p) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return std::pow(sum, 1.0 / p);
}

namespace {

// First-derivative weights at x0 of the Lagrange interpolant through the
// nodes xs: w[j] = l_j'(x0).  Exact for polynomials of degree < xs.size().
void lagrange_derivative_weights(const double* xs, std::size_t m, double x0,
                                 double* w) {
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (k != j) denom *= xs[j] - xs[k];
        }
        double num = 0.0;
        for (std::size_t mm = 0; mm < m; ++mm) {
            if (mm == j) continue;
            double prod = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (k != j && k != mm) prod *= x0 - xs[k];
            }
            num += prod;
        }
        w[j] = num / denom;
    }
}

}  // namespace

RadialFunction derivative(const RadialFunction& u) {
    const auto& r = u.grid->nodes;
    const auto& v = u.values;
    const std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("derivative: need at least 3 nodes");

    RadialFunction d(u.grid);
    if (n < 5) {  // toy grids: centred/one-sided second-order stencils
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t w0 = (i == 0) ? 0 : (i + 1 == n ? n - 3 : i - 1);
            double w[3];
            lagrange_derivative_weights(&r[w0], 3, r[i], w);
            d.values[i] = w[0] * v[w0] + w[1] * v[w0 + 1] + w[2] * v[w0 + 2];
        }
        return d;
    }
    // fourth-order five-point stencils, windows clamped at the boundaries
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w0 = (i >= 2) ? i - 2 : 0;
        if (w0 + 5 > n) w0 = n - 5;
        double w[5];
        lagrange_derivative_weights(&r[w0], 5, r[i], w);
        double acc = 0.0;
        for (std::size_t j = 0; j < 5; ++j) acc += w[j] * v[w0 + j];
        d.values[i] = acc;
    }
    return d;
}

double dirichlet_energy(const RadialFunction& u) {
    RadialFunction d = derivative(u);
    for (double& x : d.values) x *= x;
    return integrate(d);
}

namespace {

// Linear interpolation of sampled values at radius r, with constant extension
// below the first node and zero beyond r_max.
double interp(const RadialGrid& g, const std::vector<double>& v, double r) {
    if (r > g.r_max) return 0.0;
    if (r <= g.nodes.front()) return v.front();
    const auto it = std::upper_bound(g.nodes.begin(), g.nodes.end(), r);
    const std::size_t hi = static_cast<std::size_t>(it - g.nodes.begin());
    const std::size_t lo = hi - 1;
    const double t = (r - g.nodes[lo]) / (g.nodes[hi] - g.nodes[lo]);
    return (1.0 - t) * v[lo] + t * v[hi];
}

}  // namespace

RadialFunction scale_function(const RadialFunction& u, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale_function: lambda must be positive");
    const double amp = std::pow(lambda, 1.5);
    RadialFunction out(u.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = amp * interp(*u.grid, u.values, lambda * u.grid->nodes[i]);
    return out;
}

RadialFunction annulus_bump(int i, const GridPtr& grid) {
    if (i < 1) throw std::invalid_argument("annulus_bump: index must be positive");
    const double lo = static_cast<double>(i), hi = 2.0 * lo;
    if (hi > grid->r_max)
        throw std::invalid_argument("annulus_bump: annulus exceeds the grid");

    const double center = 0.5 * (lo + hi), width = hi - lo;
    RadialFunction u = make_function(grid, [&](double r) {
        if (r <= lo || r >= hi) return 0.0;
        const double c = std::cos(kPi * (r - center) / width);
        return c * c;
    });
    const double norm = std::sqrt(inner_product(u, u));
    if (!(norm > 0.0))
        throw std::invalid_argument("annulus_bump: grid cannot resolve the annulus");
    for (double& v : u.values) v /= norm;
    return u;
}

RadialFunction resample(const RadialFunction& u, const GridPtr& grid) {
    RadialFunction out(grid);
    for (std::size_t i = 0; i < grid->size(); ++i)
        out.values[i] = interp(*u.grid, u.values, grid->nodes[i]);
    return out;
}

}  // namespace sps
