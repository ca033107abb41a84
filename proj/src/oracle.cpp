#include "sps/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sps {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// generalized symmetric tridiagonal pencil (A, M), M diagonal positive
struct Pencil {
    std::vector<double> diag;  // A diagonal
    std::vector<double> off;   // A off-diagonal, off[i] couples i and i+1
    std::vector<double> mass;  // M diagonal
};

// Number of eigenvalues of (A, M) strictly below lambda (Sturm count via the
// LDL^T recurrence of A - lambda M).
int count_below(const Pencil& p, double lambda) {
    const std::size_t m = p.diag.size();
    int count = 0;
    double d = p.diag[0] - lambda * p.mass[0];
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < m; ++i) {
        const double e = p.off[i - 1];
        double next = (p.diag[i] - lambda * p.mass[i]) - e * e / d;
        if (next == 0.0) next = -std::numeric_limits<double>::min();
        if (next < 0.0) ++count;
        d = next;
    }
    return count;
}

// k-th smallest eigenvalue (k is 1-based) by bisection.
double bisect_eigenvalue(const Pencil& p, int k, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(p, mid) >= k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Solve (A - sigma M) x = b with partial pivoting (tridiagonal LU with fill).
void shifted_solve(const Pencil& p, double sigma, std::vector<double>& x) {
    const std::size_t m = p.diag.size();
    std::vector<double> a(m), b(m - 1), c(m - 1), fill(m >= 2 ? m - 2 : 0, 0.0);
    for (std::size_t i = 0; i < m; ++i) a[i] = p.diag[i] - sigma * p.mass[i];
    for (std::size_t i = 0; i + 1 < m; ++i) b[i] = c[i] = p.off[i];
    // forward elimination with row swaps; x carries the right-hand side
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(c[i]) > std::abs(a[i])) {
            std::swap(a[i], c[i]);
            double upper = a[i + 1];
            a[i + 1] = b[i];
            b[i] = upper;
            if (i + 2 < m) {
                fill[i] = b[i + 1];
                b[i + 1] = 0.0;
            }
            std::swap(x[i], x[i + 1]);
        }
        double piv = a[i];
        if (piv == 0.0) piv = std::numeric_limits<double>::min();
        const double f = c[i] / piv;
        a[i + 1] -= f * b[i];
        if (i + 2 < m) b[i + 1] -= f * (i < fill.size() ? fill[i] : 0.0);
        x[i + 1] -= f * x[i];
    }
    // back substitution
    for (std::size_t ii = m; ii-- > 0;) {
        double rhs = x[ii];
        if (ii + 1 < m) rhs -= b[ii] * x[ii + 1];
        if (ii + 2 < m && ii < fill.size()) rhs -= fill[ii] * x[ii + 2];
        double piv = a[ii];
        if (piv == 0.0) piv = std::numeric_limits<double>::min();
        x[ii] = rhs / piv;
    }
}

// ---------------------------------------------------------------------------
// independent composite Simpson weights over sample abscissae, with an
// optional leading 3/8 block when the panel count is odd
std::vector<double> simpson_weights(const std::vector<double>& t) {
    const std::size_t n = t.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    if (n == 2) {  // single panel: trapezoid
        const double h = t[1] - t[0];
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    std::size_t start = 0;
    const std::size_t panels = n - 1;
    if (panels % 2 == 1) {
        if (n >= 4) {  // 3/8 rule on the first three panels
            const double h = (t[3] - t[0]) / 3.0;
            w[0] += 3.0 * h / 8.0;
            w[1] += 9.0 * h / 8.0;
            w[2] += 9.0 * h / 8.0;
            w[3] += 3.0 * h / 8.0;
            start = 3;
        } else {  // n == 3 with odd... cannot happen (2 panels is even)
            start = 0;
        }
    }
    for (std::size_t i = start; i + 2 < n; i += 2) {
        const double h = (t[i + 2] - t[i]) / 2.0;
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

}  // namespace

std::pair<double, RadialFunction> hydrogen_eigen(int n, double Z, const GridPtr& grid) {
    if (n < 1) throw std::invalid_argument("hydrogen_eigen: n must be >= 1");
    if (!(Z > 0.0)) throw std::invalid_argument("hydrogen_eigen: Z must be positive");
    const double omega = -Z * Z / (2.0 * n * n);
    RadialFunction u = make_function(grid, [n, Z](double r) {
        const double x = 2.0 * Z * r / n;
        return std::exp(-0.5 * x) * std::assoc_laguerre(unsigned(n - 1), 1, x);
    });
    const double norm = lp_norm(u, 2.0);
    if (norm > 0.0) {
        for (double& v : u.values) v /= norm;
    }
    return {omega, u};
}

LinearSpectrum linear_eigensolve(const Potential& V, const GridPtr& grid, int count) {
    const std::size_t n = grid->size();
    if (count < 1) throw std::invalid_argument("linear_eigensolve: count must be >= 1");
    if (static_cast<std::size_t>(count) >= n) {
        throw std::invalid_argument("linear_eigensolve: count exceeds grid size");
    }
    const auto& r = grid->nodes;

    // unknowns w at nodes 0..n-2; w = 0 at the virtual origin and at r_max
    const std::size_t m = n - 1;
    Pencil p{std::vector<double>(m), std::vector<double>(m - 1), std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) {
        const double hl = i == 0 ? r[0] : r[i] - r[i - 1];
        const double hr = r[i + 1] - r[i];
        p.mass[i] = 0.5 * (hl + hr);
        p.diag[i] = 0.5 * (1.0 / hl + 1.0 / hr) - V.eval(r[i]) * p.mass[i];
        if (i + 1 < m) p.off[i] = -0.5 / hr;
    }

    // spectral bounds from the generalized Gershgorin discs
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(p.off[i - 1]);
        if (i + 1 < m) radius += std::abs(p.off[i]);
        lo = std::min(lo, (p.diag[i] - radius) / p.mass[i]);
        hi = std::max(hi, (p.diag[i] + radius) / p.mass[i]);
    }

    LinearSpectrum out;
    for (int k = 1; k <= count; ++k) {
        const double lambda = bisect_eigenvalue(p, k, lo, hi);
        out.eigenvalues.push_back(lambda);

        // inverse iteration at a shift nudged off the eigenvalue
        const double sigma = lambda + 1e-9 * (std::abs(lambda) + 1.0);
        std::vector<double> w(m);
        for (std::size_t i = 0; i < m; ++i) {
            w[i] = std::sin((k * kPi * (i + 1.0)) / (m + 1.0)) + 1e-3 * ((i * 2654435761u) % 97);
        }
        for (int it = 0; it < 6; ++it) {
            // right-hand side M w
            std::vector<double> rhs(m);
            for (std::size_t i = 0; i < m; ++i) rhs[i] = p.mass[i] * w[i];
            shifted_solve(p, sigma, rhs);
            double norm = 0.0;
            for (std::size_t i = 0; i < m; ++i) norm += p.mass[i] * rhs[i] * rhs[i];
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < m; ++i) rhs[i] /= norm;
            w.swap(rhs);
        }

        // map back u = w / r, zero at the boundary node, unit L2 norm
        RadialFunction u(grid);
        for (std::size_t i = 0; i < m; ++i) u.values[i] = w[i] / r[i];
        u.values[n - 1] = 0.0;
        const double norm = lp_norm(u, 2.0);
        for (double& v : u.values) v /= norm;
        // fix the overall sign: positive where the profile first becomes large
        double peak = 0.0;
        for (double v : u.values) peak = std::max(peak, std::abs(v));
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(u.values[i]) > 0.1 * peak) {
                if (u.values[i] < 0.0) {
                    for (double& v : u.values) v = -v;
                }
                break;
            }
        }
        out.eigenfunctions.push_back(std::move(u));
    }
    return out;
}

RadialFunction brute_force_phi(const RadialFunction& u) {
    const auto& grid = u.grid;
    const auto& r = grid->nodes;
    const std::size_t n = grid->size();

    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho[i] = 4.0 * kPi * u.values[i] * u.values[i];
    }

    // independent quadrature weights: Simpson in r (uniform grids, with a
    // virtual zero sample where the integrand vanishes) or Simpson in
    // t = ln r (log grids, plus an analytic inner cap below r_min)
    std::vector<double> sample_w;   // weight attached to each grid node
    double cap_mass3 = 0.0;         // int_0^{r_min} rho s^2 ds approximation
    if (grid->kind == GridKind::uniform) {
        std::vector<double> abscissae(n + 1);
        abscissae[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) abscissae[i + 1] = r[i];
        auto w = simpson_weights(abscissae);  // weight at the virtual node unused
        sample_w.assign(w.begin() + 1, w.end());
    } else {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = std::log(r[i]);
        sample_w = simpson_weights(t);
        for (std::size_t i = 0; i < n; ++i) sample_w[i] *= r[i];  // ds = s dt
        cap_mass3 = rho[0] * r[0] * r[0] * r[0] / 3.0;
    }

    RadialFunction phi(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = r[i];
        double acc = 0.0, carry = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double kernel = r[j] <= ri ? 1.0 / ri : 1.0 / r[j];
            const double term = sample_w[j] * rho[j] * kernel * r[j] * r[j] - carry;
            const double next = acc + term;
            carry = (next - acc) - term;
            acc = next;
        }
        phi.values[i] = -(acc + cap_mass3 / ri);
    }
    return phi;
}

}  // namespace sps
